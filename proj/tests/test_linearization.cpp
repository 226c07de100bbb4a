#include <gtest/gtest.h>

#include "palin/linearization.hpp"
#include "palin/oracle.hpp"

using namespace palin;

namespace {

const double rt2 = std::sqrt(2.0);

CVector vec2(Complex a, Complex b) {
  CVector v(2);
  v << a, b;
  return v;
}

CVector seeded_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_complex_vector(n, rng);
}

const PencilRatio& pencil_of(const RatioReport& r, const StructureClass& s) {
  for (const auto& p : r.pencils)
    if (p.pencil == s) return p;
  throw std::logic_error("pencil missing from report");
}

}  // namespace

TEST(Ansatz, TableConditions) {
  auto c = ansatz_admissible(vec2(1.0, 1.0) / rt2, kTPal, kTPal);
  EXPECT_EQ(c.condition, "Rv=v");
  EXPECT_EQ(c.residual, 0.0);
  EXPECT_TRUE(c.admissible);

  c = ansatz_admissible(vec2(1.0, -1.0) / rt2, kTPal, kTAnti);
  EXPECT_EQ(c.condition, "Rv=-v");
  EXPECT_EQ(c.residual, 0.0);

  c = ansatz_admissible(vec2(1.0, 0.0), kTPal, kTPal);
  EXPECT_NEAR(c.residual, rt2, 1e-15);
  EXPECT_FALSE(c.admissible);

  c = ansatz_admissible(vec2(kI, -kI) / rt2, kHPal, kHPal);
  EXPECT_EQ(c.condition, "Rv=conj(v)");
  EXPECT_TRUE(c.admissible);
  EXPECT_EQ(ansatz_admissible(vec2(1.0, 1.0), kHAnti, kHPal).condition, "Rv=-conj(v)");
}

TEST(Ansatz, MixedAdjointsRejected) {
  EXPECT_THROW(ansatz_admissible(vec2(1.0, 1.0), kTPal, kHPal), ValidationError);
}

TEST(Ansatz, DefaultsAreAdmissible) {
  for (int m = 1; m <= 7; ++m)
    for (int sigma : {1, -1}) {
      if (m == 1 && sigma < 0) {
        EXPECT_THROW(default_ansatz(m, sigma), ValidationError);
        continue;
      }
      const CVector v = default_ansatz(m, sigma);
      EXPECT_NEAR(v.norm(), 1.0, 1e-15);
      for (const auto& p : kAllClasses) {
        const StructureClass L{p.adjoint, p.sign * sigma};
        EXPECT_TRUE(ansatz_admissible(v, p, L).admissible) << m << " " << sigma;
      }
    }
}

TEST(BuildPencil, DegreeOneIsThePolynomial) {
  const auto P = random_structured(3, 1, kTPal, 1);
  const auto L = build_structured_pencil(P, kTPal, CVector::Ones(1), kTPal);
  EXPECT_LE((L.X - P[1]).norm(), 1e-14);
  EXPECT_LE((L.Y - P[0]).norm(), 1e-14);
  EXPECT_LE(verify_pencil(L, P).identity, 1e-14);
}

TEST(BuildPencil, SeededQuadratics) {
  const auto P = random_structured(2, 2, kTPal, 20240601);
  const auto Lp = build_structured_pencil(P, kTPal, vec2(1.0, 1.0) / rt2, kTPal);
  auto ver = verify_pencil(Lp, P);
  EXPECT_LE(ver.identity, 1e-10);
  EXPECT_LE(ver.structure, 1e-10);
  EXPECT_LE((Lp.Y - Lp.X.transpose()).norm(), 1e-12 * Lp.X.norm());

  const auto La = build_structured_pencil(P, kTPal, vec2(1.0, -1.0) / rt2, kTAnti);
  ver = verify_pencil(La, P);
  EXPECT_LE(ver.identity, 1e-10);
  EXPECT_LE((La.Y + La.X.transpose()).norm(), 1e-12 * La.X.norm());
}

TEST(BuildPencil, EveryClassAndDegree) {
  for (const auto& s : kAllClasses)
    for (int m = 1; m <= 5; ++m)
      for (int sigma : {1, -1}) {
        if (m == 1 && sigma < 0) continue;
        const auto P = random_structured(2, m, s, 60 + m);
        const StructureClass target{s.adjoint, s.sign * sigma};
        const auto L = build_structured_pencil(P, s, default_ansatz(m, sigma), target);
        const auto ver = verify_pencil(L, P);
        EXPECT_LE(ver.identity, 1e-10) << to_string(s) << " -> " << to_string(target) << " m=" << m;
        EXPECT_LE(ver.structure, 1e-10);
      }
}

TEST(BuildPencil, InadmissibleAnsatz) {
  const auto P = random_structured(2, 2, kTPal, 3);
  try {
    build_structured_pencil(P, kTPal, vec2(1.0, 0.0), kTPal);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("Rv=v violated"), std::string::npos);
  }
  EXPECT_THROW(build_structured_pencil(random_unstructured(2, 2, 1), kTPal, vec2(1.0, 1.0), kTPal),
               ValidationError);
}

TEST(LiftedEigenvector, Examples) {
  const CVector x = seeded_vector(3, 2).normalized();
  EXPECT_LE((lifted_eigenvector(0.7, x, 1) - x).norm(), 1e-15);

  CVector e = CVector::Zero(2);
  e(0) = 1.0;
  CVector expect(4);
  expect << 2.0, 0.0, 1.0, 0.0;
  EXPECT_LE((lifted_eigenvector(2.0, e, 2) - expect / std::sqrt(5.0)).norm(), 1e-15);

  const CVector z = lifted_eigenvector(0.0, x, 3);
  EXPECT_EQ(z.head(6).norm(), 0.0);
  EXPECT_LE((z.tail(3) - x).norm(), 1e-15);
}

TEST(RelationChecks, HoldForRandomPairs) {
  const auto P = random_structured(2, 2, kTPal, 20240601);
  const auto L = build_structured_pencil(P, kTPal, default_ansatz(2, 1), kTPal);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Complex lam(0.3 * seed - 2.0, 0.8 - 0.1 * seed);
    const auto r = relation_checks(L, P, L.v, lam, seeded_vector(2, seed));
    EXPECT_LE(r.norm, 1e-10);
    EXPECT_LE(r.transpose, 1e-10);
    EXPECT_LE(r.conjugate, 1e-10);
  }
}

TEST(RelationChecks, ExactPairAndHomogeneity) {
  const MatrixPolynomial P({CMatrix::Ones(1, 1), CMatrix::Zero(1, 1), CMatrix::Ones(1, 1)});
  const auto L = build_structured_pencil(P, kTPal, default_ansatz(2, 1), kTPal);
  const auto r = relation_checks(L, P, L.v, kI, CVector::Ones(1));
  EXPECT_LE(r.norm, 1e-10);
  EXPECT_LE((L.at(kI) * lifted_eigenvector(kI, CVector::Ones(1), 2)).norm(), 1e-14);

  Pencil twice = L;
  twice.X *= 2.0;
  twice.Y *= 2.0;
  twice.v *= 2.0;
  const Complex lam(0.4, 1.1);
  const CVector x = CVector::Ones(1);
  const CVector z = lifted_eigenvector(lam, x, 2);
  EXPECT_NEAR((twice.at(lam) * z).norm(), 2.0 * (L.at(lam) * z).norm(), 1e-14);
  EXPECT_LE(relation_checks(twice, P, twice.v, lam, x).norm, 1e-12);
}

TEST(PencilBackwardError, DegreeOneIsThePolynomial) {
  const auto P = random_structured(3, 1, kTAnti, 71);
  const auto L = build_structured_pencil(P, kTAnti, CVector::Ones(1), kTAnti);
  const CVector x = seeded_vector(3, 72);
  const Complex lam(1.7, 0.3);
  const auto pe = pencil_backward_error(L, lam, x, 1);
  const auto rep = backward_error_report(P, kTAnti, lam, x);
  EXPECT_NEAR(pe.eta_F, rep.eta_structured_F, 1e-13 * rep.eta_structured_F);
  EXPECT_NEAR(pe.eta_2, rep.eta_structured_2, 1e-13 * rep.eta_structured_2);
}

TEST(PencilBackwardError, ExactPairAndOracle) {
  const MatrixPolynomial S({CMatrix::Ones(1, 1), CMatrix::Zero(1, 1), CMatrix::Ones(1, 1)});
  const auto LS = build_structured_pencil(S, kTPal, default_ansatz(2, 1), kTPal);
  EXPECT_LE(pencil_backward_error(LS, kI, CVector::Ones(1), 2).eta_F, 1e-15);

  const auto P = random_structured(2, 2, kTPal, 20240601);
  const auto L = build_structured_pencil(P, kTPal, default_ansatz(2, 1), kTPal);
  const CVector x = seeded_vector(2, 5);
  const auto pe = pencil_backward_error(L, 0.5, x, 2);
  const auto o = frobenius_oracle(L.as_polynomial(), kTPal, 0.5, lifted_eigenvector(0.5, x, 2));
  EXPECT_TRUE(std::isfinite(pe.eta_F));
  EXPECT_NEAR(pe.eta_F, o.eta, 1e-8 * o.eta);
}

TEST(RatioReport, TPalAtHalf) {
  const auto P = random_structured(2, 2, kTPal, 20240601);
  const auto r = ratio_report(P, kTPal, 0.5, seeded_vector(2, 9));
  const auto& p = pencil_of(r, kTPal);
  ASSERT_TRUE(p.available);
  const double lo = std::sqrt(5.0 / 9.0) * std::sqrt(1.5);
  EXPECT_NEAR(p.lower_F, lo, 1e-14);
  EXPECT_NEAR(p.upper_F, rt2, 1e-15);
  EXPECT_GE(p.ratio_F, lo - 1e-12);
  EXPECT_LE(p.ratio_F, rt2 + 1e-12);
  EXPECT_TRUE(p.in_bounds);
}

TEST(RatioReport, HPalOnTheCircle) {
  const int m = 3;
  const auto P = random_structured(2, m, kHPal, 20240601);
  const Complex lam = std::polar(1.0, std::numbers::pi / 4.0);
  const auto r = ratio_report(P, kHPal, lam, seeded_vector(2, 10));
  for (const auto& p : r.pencils) {
    ASSERT_TRUE(p.available);
    EXPECT_GE(p.ratio_2, std::sqrt((m + 1.0) / (2.0 * m)) - 1e-12);
    EXPECT_LE(p.ratio_2, rt2 + 1e-12);
    EXPECT_TRUE(p.in_bounds) << to_string(p.pencil);
  }
}

TEST(RatioReport, DegreeOneRatiosAreOne) {
  const auto P = random_structured(3, 1, kTPal, 12);
  const auto r = ratio_report(P, kTPal, Complex(0.3, -2.0), seeded_vector(3, 13));
  const auto& p = pencil_of(r, kTPal);
  EXPECT_NEAR(p.ratio_unstructured, 1.0, 1e-13);
  EXPECT_NEAR(p.ratio_structured_F, 1.0, 1e-13);
  EXPECT_FALSE(pencil_of(r, kTAnti).available);
}

TEST(RatioReport, OutOfDomainBranchesAreFlagged) {
  const auto P = random_structured(2, 2, kTPal, 14);
  const auto r = ratio_report(P, kTPal, -1.0, seeded_vector(2, 15));
  const auto& p = pencil_of(r, kTPal);
  EXPECT_NE(p.branch.find("2-norm bounds out of domain"), std::string::npos);
  EXPECT_NE(p.branch.find("F bounds out of domain"), std::string::npos);
}

TEST(Sandwich, PowerVectorRatio) {
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Complex lam(u(rng), u(rng));
    const int m = 1 + trial % 8;
    const double q = power_vector_ascending(lam, m).norm() /
                     (power_vector_ascending(lam, m - 1).norm() * std::sqrt(1.0 + std::norm(lam)));
    EXPECT_GE(q, sandwich_lower(m) - 1e-12);
    EXPECT_LE(q, 1.0 + 1e-12);
  }
}

TEST(Sandwich, UnstructuredRatiosOnSeededPencils) {
  for (std::uint64_t seed = 0; seed < 16; ++seed) {
    const auto& s = kAllClasses[seed % 4];
    const int m = 2 + seed % 3;
    const auto P = random_structured(2, m, s, 1100 + seed);
    const auto r = ratio_report(P, s, Complex(0.6 - 0.1 * seed, 0.7), seeded_vector(2, seed));
    for (const auto& p : r.pencils) {
      ASSERT_TRUE(p.available);
      EXPECT_GE(p.ratio_unstructured, sandwich_lower(m) - 1e-12);
      EXPECT_LE(p.ratio_unstructured, 1.0 + 1e-12);
      EXPECT_GE(p.ratio_F, sandwich_lower(m) - 1e-12);
      EXPECT_GT(p.ansatz_ratio, 1e-12);
      EXPECT_LE(p.ansatz_ratio, 1.0 + 1e-12);
    }
  }
}

TEST(Advice, TClasses) {
  EXPECT_EQ(advise_T(0.5), Advice::Palindromic);
  EXPECT_EQ(advise_T(-2.0), Advice::AntiPalindromic);
  EXPECT_EQ(advise_T(kI), Advice::Palindromic);
  EXPECT_EQ(to_string(Advice::AntiPalindromic), "anti-palindromic");
}

TEST(Advice, HClasses) {
  const auto P = random_structured(2, 2, kHPal, 17);
  const CVector v = default_ansatz(2, 1);
  EXPECT_EQ(advise_H(P, std::polar(1.0, 1.0), seeded_vector(2, 1), v).advice, Advice::Either);

  const auto a = advise_H(P, 2.5, seeded_vector(2, 2), v);
  EXPECT_NE(a.advice, Advice::Either);
  EXPECT_EQ(a.advice, a.rhat_p <= a.rhat_ap ? Advice::Palindromic : Advice::AntiPalindromic);

  // x^H P(lambda) x = 0 for an isotropic x.
  CMatrix A0(2, 2);
  A0 << 0.0, 1.0, 0.0, 0.0;
  const MatrixPolynomial Z({A0, A0.adjoint()});
  CVector e = CVector::Zero(2);
  e(0) = 1.0;
  const auto z = advise_H(Z, 3.0, e, CVector::Ones(1));
  EXPECT_EQ(z.advice, Advice::Either);
  EXPECT_EQ(z.rhat_p, 0.0);
}
