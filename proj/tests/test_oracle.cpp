#include <gtest/gtest.h>

#include "palin/backward_error.hpp"
#include "palin/oracle.hpp"
#include "palin/perturbations.hpp"

using namespace palin;

namespace {

CVector seeded_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_complex_vector(n, rng);
}

double sumsq(const std::vector<Complex>& a) {
  double s = 0.0;
  for (auto z : a) s += std::norm(z);
  return s;
}

}  // namespace

TEST(MinNormScalar, Examples) {
  auto a = min_norm_scalar(2.0, 1, 5.0, ScalarMode::Unconstrained);
  EXPECT_NEAR(std::abs(a[0] - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(a[1] - 2.0), 0.0, 1e-15);

  a = min_norm_scalar(2.0, 1, -3.0, ScalarMode::Symmetric, 1);
  EXPECT_NEAR(std::abs(a[0] + 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(a[1] + 1.0), 0.0, 1e-15);

  a = min_norm_scalar(1.0, 1, 0.0, ScalarMode::Symmetric, -1);
  EXPECT_EQ(sumsq(a), 0.0);
  EXPECT_THROW(min_norm_scalar(1.0, 1, 1.0, ScalarMode::Symmetric, -1), InconsistencyError);
}

TEST(MinNormScalar, MeetsConstraintAndIsStationary) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 90; ++trial) {
    const Complex lam(u(rng), u(rng));
    if (std::abs(std::abs(lam) - 1.0) < 1e-3) continue;
    const int m = 1 + trial % 6;
    const int eps = trial % 2 ? 1 : -1;
    const Complex rhs(u(rng), u(rng));
    const auto mode = static_cast<ScalarMode>(trial % 3);
    const auto a = min_norm_scalar(lam, m, rhs, mode, eps);
    const auto p = powers(lam, m);
    Complex s = 0.0;
    for (int j = 0; j <= m; ++j) s += p[j] * a[j];
    EXPECT_NEAR(std::abs(s - rhs), 0.0, 1e-10 * (1.0 + std::abs(rhs)));

    if (mode == ScalarMode::Symmetric) {
      for (int j = 0; 2 * j < m; ++j) {
        EXPECT_NEAR(std::abs(a[m - j] - double(eps) * a[j]), 0.0, 1e-12 * (1.0 + std::abs(a[j])));
      }
    }
    if (mode == ScalarMode::ConjugateSymmetric) {
      for (int j = 0; 2 * j < m; ++j)
        EXPECT_NEAR(std::abs(a[m - j] - double(eps) * std::conj(a[j])), 0.0, 1e-12 * (1.0 + std::abs(a[j])));
    }
  }
}

TEST(MinNormScalar, UnconstrainedMatchesVectorSolver) {
  const Complex lam(0.7, -1.2);
  const auto a = min_norm_scalar(lam, 4, Complex(1.0, 2.0), ScalarMode::Unconstrained);
  const auto x = min_norm_vector(lam, 4, CVector::Constant(1, Complex(1.0, 2.0)));
  for (int j = 0; j <= 4; ++j) EXPECT_NEAR(std::abs(a[j] - x[j](0)), 0.0, 1e-15);
}

TEST(MinNormScalar, SymmetricIsNoWorseThanRandomFeasiblePoints) {
  const Complex lam(1.5, 0.3);
  const int m = 3;
  const Complex rhs(0.4, -0.9);
  const auto a = min_norm_scalar(lam, m, rhs, ScalarMode::Symmetric, 1);
  const auto p = powers(lam, m);
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    // Move a_1 = a_2 freely, then fix a_0 = a_3 to meet the constraint.
    std::vector<Complex> b(m + 1);
    b[1] = b[2] = Complex(g(rng), g(rng));
    b[0] = b[3] = (rhs - (p[1] + p[2]) * b[1]) / (p[0] + p[3]);
    EXPECT_GE(sumsq(b), sumsq(a) - 1e-12);
  }
}

TEST(MinNormVector, Examples) {
  CVector y(2);
  y << 1.0, Complex(0.0, 3.0);
  auto x = min_norm_vector(2.0, 1, y);
  EXPECT_LE((x[0] - y / 5.0).norm(), 1e-15);
  EXPECT_LE((x[1] - 2.0 * y / 5.0).norm(), 1e-15);
  EXPECT_LE((x[0] + 2.0 * x[1] - y).norm(), 1e-15);

  x = min_norm_vector(Complex(0.3, 0.1), 3, CVector::Zero(2));
  for (const auto& v : x) EXPECT_EQ(v.norm(), 0.0);

  x = min_norm_vector(0.0, 3, y);
  EXPECT_LE((x[0] - y).norm(), 1e-15);
  for (int j = 1; j <= 3; ++j) EXPECT_EQ(x[j].norm(), 0.0);
}

TEST(StructureBasis, IsOrthonormalAndSpansTheClass) {
  for (const auto& s : kAllClasses)
    for (int m = 1; m <= 4; ++m) {
      const Index n = 2;
      const auto basis = structure_basis(n, m, s);
      // Real dimension of each class: pairs contribute 2 n^2 per j < m/2, the
      // middle coefficient n^2 (symmetric, skew, Hermitian or skew-Hermitian).
      const std::size_t pairs = static_cast<std::size_t>((m + 1) / 2);
      std::size_t expect = pairs * 2 * n * n;
      if (m % 2 == 0) {
        const std::size_t off = n * (n - 1);
        if (s.adjoint == Adjoint::ConjugateTranspose)
          expect += n * n;
        else
          expect += off + (s.sign > 0 ? 2 * n : 0);
      }
      ASSERT_EQ(basis.size(), expect) << to_string(s) << " m=" << m;

      std::vector<MatrixPolynomial> polys;
      for (const auto& atom : basis) {
        auto c = MatrixPolynomial::zero(n, m);
        for (const auto& e : atom.entries) c[e.j](e.row, e.col) += e.value;
        EXPECT_LE(structure_residual(c, s), 1e-15);
        polys.push_back(c);
      }
      for (std::size_t i = 0; i < polys.size(); ++i)
        for (std::size_t k = i; k < polys.size(); ++k) {
          double ip = 0.0;
          for (int j = 0; j <= m; ++j) ip += (polys[i][j].adjoint() * polys[k][j]).trace().real();
          EXPECT_NEAR(ip, i == k ? 1.0 : 0.0, 1e-14);
        }
    }
}

TEST(FrobeniusOracle, ScalarExample) {
  const MatrixPolynomial P({CMatrix::Ones(1, 1), CMatrix::Ones(1, 1)});
  const auto o = frobenius_oracle(P, kTPal, 2.0, CVector::Ones(1));
  EXPECT_NEAR(o.eta, std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(std::abs(o.delta[0](0, 0) + 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(o.delta[1](0, 0) + 1.0), 0.0, 1e-14);
  EXPECT_NEAR(frobenius_oracle(P, kTPal, -1.0, CVector::Ones(1)).eta, 0.0, 1e-15);
}

TEST(FrobeniusOracle, AgreesWithClosedFormsAcrossClasses) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto& s = kAllClasses[seed % 4];
    const int m = 1 + (seed / 4) % 4;
    const auto P = random_structured(1 + seed % 3, m, s, 9000 + seed);
    const CVector x = seeded_vector(P.n(), seed + 77);
    Complex lam(0.9 - 0.05 * seed, 0.3 + 0.02 * seed);
    if (seed % 5 == 0) lam = std::polar(1.0, 0.4 * seed + 0.1);
    const auto rep = backward_error_report(P, s, lam, x);
    const auto o = frobenius_oracle(P, s, lam, x);
    EXPECT_NEAR(o.eta, rep.eta_structured_F, 1e-8 * rep.eta_structured_F)
        << to_string(s) << " seed " << seed;
    const auto p = minimal_perturbation(P, s, lam, x, Norm::Frobenius);
    for (int j = 0; j <= m; ++j) EXPECT_LE((o.delta[j] - p.delta[j]).norm(), 1e-8 * (1.0 + o.eta));
  }
}

TEST(FrobeniusOracle, HPalSeededInstance) {
  const auto P = random_structured(3, 2, kHPal, 20240601);
  const CVector x = seeded_vector(3, 1);
  const Complex lam(0.4, 0.8);
  const double ref = eta_structured_H(P, kHPal, lam, x).eta_F;
  EXPECT_NEAR(frobenius_oracle(P, kHPal, lam, x).eta, ref, 1e-8 * ref);
}

TEST(FrobeniusOracle, InconsistentForcedZero) {
  const MatrixPolynomial P({CMatrix::Ones(1, 1), CMatrix::Constant(1, 1, 1.0 + 1e-3)});
  // x^T P(-1) x = 1e-3, but every T-palindromic dP has x^T dP(-1) x = 0.
  EXPECT_THROW(frobenius_oracle(P, kTPal, -1.0, CVector::Ones(1)), InconsistencyError);
}

TEST(UnstructuredOracle, AgreesWithFormula) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto P = random_unstructured(3, 1 + seed % 5, seed);
    const CVector x = seeded_vector(3, seed);
    const Complex lam(0.2 * seed - 2.0, 0.5);
    const double e = eta_unstructured(P, lam, x);
    EXPECT_NEAR(unstructured_oracle(P, lam, x), e, 1e-12 * e);
  }
  const auto P = random_unstructured(2, 2, 3);
  const CVector x = seeded_vector(2, 4);
  EXPECT_NEAR(unstructured_oracle(P, 0.0, x), (P[0] * x.normalized()).norm(), 1e-14);
  const MatrixPolynomial S({CMatrix::Ones(1, 1), CMatrix::Ones(1, 1)});
  EXPECT_EQ(unstructured_oracle(S, -1.0, CVector::Ones(1)), 0.0);
}

TEST(DkwGridOracle, Examples) {
  const double step = 2e-3;
  EXPECT_NEAR(dkw_grid_oracle(0.0, 1.0, 1.0, step, 1.05).min_norm, 1.0, 2.0 * step);
  EXPECT_NEAR(dkw_grid_oracle(1.0, 0.0, 0.0, step, 1.05).min_norm, 1.0, 2.0 * step);
  EXPECT_NEAR(dkw_grid_oracle(0.6, 0.8, 0.8, step, 1.05).min_norm, 1.0, 2.0 * step);
  EXPECT_THROW(dkw_grid_oracle(0.0, 1.0, 1.0, 0.0, 1.0), ValidationError);
}
