#include <gtest/gtest.h>

#include "palin/backward_error.hpp"
#include "palin/oracle.hpp"

using namespace palin;

namespace {

const double rt2 = std::sqrt(2.0);

CMatrix scalar(Complex z) { return CMatrix::Constant(1, 1, z); }

MatrixPolynomial one_plus_z() { return MatrixPolynomial({scalar(1.0), scalar(1.0)}); }

MatrixPolynomial h_example() {
  CMatrix A0(2, 2);
  A0 << 1.0, 1.0, 0.0, 1.0;
  return MatrixPolynomial({A0, A0.adjoint()});
}

CVector e1(Index n) {
  CVector x = CVector::Zero(n);
  x(0) = 1.0;
  return x;
}

}  // namespace

TEST(Projections, ValuesAtOneAndTwo) {
  const auto p1 = projections(1.0, 1);
  EXPECT_NEAR(std::abs(p1.pi_plus(0) - rt2), 0.0, 1e-15);
  EXPECT_EQ(p1.pi_minus(0), Complex(0.0));

  const auto p2 = projections(2.0, 2);
  ASSERT_EQ(p2.pi_plus.size(), 2);
  EXPECT_NEAR(std::abs(p2.pi_plus(0) - 5.0 / rt2), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(p2.pi_plus(1) - 2.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(p2.pi_minus(0) - 3.0 / rt2), 0.0, 1e-14);
  EXPECT_EQ(p2.pi_minus(1), Complex(0.0));
  EXPECT_NEAR(p2.pi_plus.squaredNorm() + p2.pi_minus.squaredNorm(), 21.0, 1e-13);
}

TEST(Projections, AlternatingCancellationAtMinusOne) {
  for (int m : {1, 3, 5, 7}) EXPECT_LE(projections(-1.0, m).pi_plus.norm(), 1e-15) << m;
}

TEST(Projections, IdentitiesOnRandomPoints) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Complex lam(u(rng), u(rng));
    const int m = 1 + trial % 7;
    const auto pr = projections(lam, m);
    const double L2 = power_vector_ascending(lam, m).squaredNorm();
    const double tol = 1e-12 * L2;
    EXPECT_NEAR(pr.pi_plus.squaredNorm() + pr.pi_minus.squaredNorm(), L2, tol);

    const auto hs = half_power_sums(lam, m);
    const double mid = m % 2 == 0 ? std::norm(std::pow(lam, m / 2)) : 0.0;
    EXPECT_NEAR(2.0 * hs.hi, (pr.pi_plus + pr.pi_minus).squaredNorm() + mid, tol);
    EXPECT_NEAR(2.0 * hs.lo, (pr.pi_plus - pr.pi_minus).squaredNorm() + mid, tol);
  }
}

TEST(HalfPowerSums, Examples) {
  auto s = half_power_sums(1.0, 3);
  EXPECT_DOUBLE_EQ(s.hi, 2.0);
  EXPECT_DOUBLE_EQ(s.lo, 2.0);
  s = half_power_sums(2.0, 1);
  EXPECT_DOUBLE_EQ(s.hi, 4.0);
  EXPECT_DOUBLE_EQ(s.lo, 1.0);
  s = half_power_sums(2.0, 2);
  EXPECT_DOUBLE_EQ(s.hi, 20.0);
  EXPECT_DOUBLE_EQ(s.lo, 5.0);
}

TEST(EtaUnstructured, Examples) {
  EXPECT_EQ(eta_unstructured(one_plus_z(), -1.0, CVector::Ones(1)), 0.0);
  const auto P = random_structured(3, 2, kTPal, 31);
  CVector x(3);
  x << 1.0, Complex(0, 2), -1.0;
  EXPECT_NEAR(eta_unstructured(P, 0.0, x), (P[0] * x.normalized()).norm(), 1e-14);
  EXPECT_NEAR(eta_unstructured(h_example(), kI, e1(2)), std::sqrt(1.5), 1e-14);
}

TEST(EtaUnstructured, ScaleInvariantInX) {
  const auto P = random_structured(3, 3, kHPal, 32);
  CVector x = CVector::Ones(3);
  EXPECT_NEAR(eta_unstructured(P, Complex(0.3, 0.4), x),
              eta_unstructured(P, Complex(0.3, 0.4), Complex(0, -7) * x), 1e-14);
}

TEST(TCoefficients, TableRows) {
  auto c = t_coefficients(kTPal, 1, 2.0, Norm::Frobenius);
  EXPECT_NEAR(c.a, 2.0 / 5.0, 1e-15);
  EXPECT_NEAR(c.b, 2.0 / 9.0 - 2.0 / 5.0, 1e-15);

  for (int m : {2, 4, 6}) {
    c = t_coefficients(kTPal, m, 1.0, Norm::Frobenius);
    EXPECT_NEAR(c.a, 2.0 / (m + 1), 1e-15) << m;
    EXPECT_NEAR(c.b, -1.0 / (m + 1), 1e-15) << m;
  }

  c = t_coefficients(kTPal, 1, 2.0, Norm::Spectral);
  EXPECT_NEAR(c.a, 8.0 / 25.0, 1e-15);
  EXPECT_NEAR(c.b, 2.0 / 9.0 - 8.0 / 25.0, 1e-15);
}

TEST(TCoefficients, RowsSumToInverseProjectionNorm) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Complex lam(u(rng), u(rng));
    const int m = 1 + trial % 6;
    for (const auto& s : {kTPal, kTAnti})
      for (Norm nm : {Norm::Frobenius, Norm::Spectral}) {
        const auto c = t_coefficients(s, m, lam, nm);
        const auto pr = projections(lam, m);
        const double pis2 = (s.sign > 0 ? pr.pi_plus : pr.pi_minus).squaredNorm();
        EXPECT_NEAR(c.a + c.b, 1.0 / pis2, 1e-10 / pis2);
      }
  }
}

TEST(TCoefficients, ForcedZeroRowsAtRealUnits) {
  // Odd m: the palindromic projection vanishes at -1, the anti one at +1.
  auto c = t_coefficients(kTPal, 3, -1.0, Norm::Frobenius);
  EXPECT_TRUE(c.forced_zero_inner_product);
  EXPECT_EQ(c.b, 0.0);
  c = t_coefficients(kTAnti, 1, 1.0 + 1e-14, Norm::Spectral);
  EXPECT_TRUE(c.forced_zero_inner_product);
  EXPECT_EQ(c.lambda_used, Complex(1.0));
  c = t_coefficients(kTAnti, 2, -1.0, Norm::Frobenius);
  EXPECT_TRUE(c.forced_zero_inner_product);
  EXPECT_FALSE(t_coefficients(kTPal, 2, -1.0, Norm::Frobenius).forced_zero_inner_product);
}

TEST(TCoefficients, RejectsHClasses) {
  EXPECT_THROW(t_coefficients(kHPal, 1, 2.0, Norm::Frobenius), ValidationError);
}

TEST(EtaStructuredT, ScalarExample) {
  const auto P = one_plus_z();
  EXPECT_NEAR(eta_structured_T(P, kTPal, 2.0, CVector::Ones(1), Norm::Frobenius).eta, rt2, 1e-14);
  EXPECT_NEAR(eta_structured_T(P, kTPal, 2.0, CVector::Ones(1), Norm::Spectral).eta, rt2, 1e-14);
  EXPECT_EQ(eta_structured_T(P, kTPal, -1.0, CVector::Ones(1), Norm::Frobenius).eta, 0.0);
}

TEST(EtaStructuredT, ExactPairGivesZeroOnEveryBranch) {
  // 1 - z is T-anti-palindromic with root 1.
  const MatrixPolynomial A({scalar(1.0), scalar(-1.0)});
  EXPECT_EQ(eta_structured_T(A, kTAnti, 1.0, CVector::Ones(1), Norm::Frobenius).eta, 0.0);
  EXPECT_EQ(eta_structured_T(A, kTAnti, 1.0, CVector::Ones(1), Norm::Spectral).eta, 0.0);
}

TEST(EtaStructuredT, ForcedZeroViolationIsInconsistent) {
  const MatrixPolynomial P({scalar(1.0), scalar(1.0 + 5e-11)});
  // Within the structure tolerance, yet x^T P(-1) x = 5e-11 should be zero.
  EXPECT_THROW(eta_structured_T(P, kTPal, -1.0, CVector::Ones(1), Norm::Frobenius),
               InconsistencyError);
}

TEST(EtaStructuredT, RejectsUnstructuredInput) {
  EXPECT_THROW(eta_structured_T(random_unstructured(2, 2, 1), kTPal, 0.5, CVector::Ones(2),
                                Norm::Frobenius),
               ValidationError);
}

TEST(EtaStructuredT, BoundsAgainstUnstructured) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto& s = seed % 2 ? kTAnti : kTPal;
    const int m = 1 + seed % 4;
    const auto P = random_structured(3, m, s, 700 + seed);
    std::mt19937_64 rng(seed);
    const CVector x = random_complex_vector(3, rng);
    const Complex lam(0.3 + 0.1 * seed, -0.5 + 0.07 * seed);
    const double e = eta_unstructured(P, lam, x);
    const double f = eta_structured_T(P, s, lam, x, Norm::Frobenius).eta;
    const double two = eta_structured_T(P, s, lam, x, Norm::Spectral).eta;
    EXPECT_GE(f, e * (1.0 - 1e-12));
    EXPECT_GE(two, e * (1.0 - 1e-12));
    EXPECT_LE(two, f * (1.0 + 1e-12)) << "seed " << seed;
  }
}

TEST(EtaStructuredT, ScalarNormsCoincide) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto P = random_structured(1, 1 + seed % 5, seed % 2 ? kTAnti : kTPal, seed);
    const auto& s = seed % 2 ? kTAnti : kTPal;
    const Complex lam(0.9 - 0.2 * seed, 0.4);
    const double f = eta_structured_T(P, s, lam, CVector::Ones(1), Norm::Frobenius).eta;
    const double two = eta_structured_T(P, s, lam, CVector::Ones(1), Norm::Spectral).eta;
    EXPECT_NEAR(f, two, 1e-12 * f);
  }
}

TEST(HRhat, Examples) {
  const auto h = h_rhat(2.0, 1, 1.0, 1);
  ASSERT_EQ(h.blocks.size(), 1u);
  RMatrix H0(2, 2);
  H0 << 3.0, 0.0, 0.0, -1.0;
  EXPECT_LE((h.blocks[0] - H0).norm(), 1e-15);
  EXPECT_NEAR(h.rhat(0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(h.rhat(1), 0.0, 1e-15);
  const auto a = h.diagonal(1, 1);
  EXPECT_NEAR(std::abs(a[0] - 1.0 / 3.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(a[1] - 1.0 / 3.0), 0.0, 1e-15);

  EXPECT_EQ(h_rhat(Complex(0.3, 0.2), 3, 0.0, 1).rhat.norm(), 0.0);

  const auto even = h_rhat(2.0, 2, Complex(0.7, -0.4), 1);
  EXPECT_EQ(even.stacked.rows(), 2);
  EXPECT_EQ(even.stacked.cols(), 3);
  EXPECT_LE((even.stacked * even.rhat - vec(Complex(0.7, -0.4))).norm(), 1e-12);
}

TEST(HRhat, MatchesScalarOracle) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 60; ++trial) {
    Complex lam(u(rng), u(rng));
    if (std::abs(std::abs(lam) - 1.0) < 1e-3) continue;
    const int m = 1 + trial % 6;
    const int eps = trial % 3 ? 1 : -1;
    const Complex inner(u(rng), u(rng));
    const auto h = h_rhat(lam, m, inner, eps);
    const auto ref = min_norm_scalar(lam, m, inner, ScalarMode::ConjugateSymmetric, eps);
    const auto got = h.diagonal(m, eps);
    for (int j = 0; j <= m; ++j) EXPECT_NEAR(std::abs(got[j] - ref[j]), 0.0, 1e-10);
    double cost = 0.0;
    for (auto z : ref) cost += std::norm(z);
    EXPECT_NEAR(h.cost, cost, 1e-10 * cost);
  }
}

TEST(EtaStructuredH, UnitCircleExample) {
  const auto h = eta_structured_H(h_example(), kHPal, kI, e1(2));
  EXPECT_TRUE(h.unit_circle);
  EXPECT_NEAR(h.eta_F, rt2, 1e-14);
  EXPECT_NEAR(h.eta_2, std::sqrt(1.5), 1e-14);
  EXPECT_NEAR(h.eta_2, eta_unstructured(h_example(), kI, e1(2)), 1e-14);
}

TEST(EtaStructuredH, AntiPalindromicReducesToPalindromic) {
  const auto P = random_structured(3, 3, kHAnti, 77);
  const CVector x = CVector::Ones(3);
  const Complex lam(1.4, -0.3);
  const auto a = eta_structured_H(P, kHAnti, lam, x);
  const auto p = eta_structured_H(P * kI, kHPal, lam, x);
  EXPECT_NEAR(a.eta_F, p.eta_F, 1e-14 * p.eta_F);
  EXPECT_NEAR(a.eta_2, p.eta_2, 1e-14 * p.eta_2);
}

TEST(EtaStructuredH, OrderingAndExactPairs) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto P = random_structured(2, 1 + seed % 4, kHPal, 900 + seed);
    const CVector x = CVector::Ones(2);
    const Complex lam = seed % 3 == 0 ? std::polar(1.0, 0.3 * seed) : Complex(0.2 * seed - 1.5, 0.6);
    const auto h = eta_structured_H(P, kHPal, lam, x);
    const double e = eta_unstructured(P, h.lambda_used, x);
    EXPECT_GE(h.eta_F, e * (1.0 - 1e-12));
    EXPECT_GE(h.eta_2, e * (1.0 - 1e-12));
    EXPECT_LE(h.eta_2, h.eta_F * (1.0 + 1e-12));
  }
}

TEST(BackwardErrorReport, CarriesBranchAndFlags) {
  const auto rep = backward_error_report(one_plus_z(), kTPal, -1.0 + 1e-14, CVector::Ones(1));
  EXPECT_EQ(rep.eta_structured_F, 0.0);
  ASSERT_TRUE(rep.coeffs_F.has_value());
  EXPECT_NE(std::find(rep.flags.begin(), rep.flags.end(), "lambda_snapped"), rep.flags.end());
  EXPECT_NE(std::find(rep.flags.begin(), rep.flags.end(), "forced_zero_inner_product"),
            rep.flags.end());

  const auto h = backward_error_report(h_example(), kHPal, kI, e1(2));
  EXPECT_FALSE(h.coeffs_F.has_value());
  EXPECT_NEAR(h.eta_structured_F, rt2, 1e-14);
}
