#pragma once
//
// Backward errors of an approximate eigenpair (lambda, x):
//   unstructured  eta   = ||r|| / ||Lambda_m||,  r = -P(lambda) x
//   structured    eta^S = min |||dP||| over dP in the class with (P + dP)(lambda) x = 0
// for Frobenius (F) and spectral (2) polynomial norms.
//
// Both structured cases reduce, after the unitary change of basis Q = [x, Q_1],
// to one scalar problem on the (1,1) entries and one vector problem on the
// first block column. The vector problem always costs 2 ||Q_1^* r||^2 / ||Lambda||^2
// in the Frobenius norm; the scalar problem depends on the class and on lambda.
//

#include <optional>
#include <string>
#include <vector>

#include "palin/polynomial.hpp"

namespace palin {

inline constexpr double kDefaultBranchTol = 1e-12;

// ---------------------------------------------------------------------------
// Projections of the power vector onto symmetric / antisymmetric combinations.

struct ProjectionPair {
  CVector pi_plus;
  CVector pi_minus;
};

inline ProjectionPair projections(Complex lambda, int m) {
  require(m >= 1, "projections: degree must be at least 1");
  const auto p = powers(lambda, m);
  const int len = (m + 2) / 2;
  ProjectionPair out{CVector(len), CVector(len)};
  const double rt2 = std::sqrt(2.0);
  for (int k = 0; 2 * k < m; ++k) {
    out.pi_plus(k) = (p[m - k] + p[k]) / rt2;
    out.pi_minus(k) = (p[m - k] - p[k]) / rt2;
  }
  if (m % 2 == 0) {
    out.pi_plus(m / 2) = (p[m / 2] + p[m / 2]) / 2.0;
    out.pi_minus(m / 2) = (p[m / 2] - p[m / 2]) / 2.0;
  }
  return out;
}

struct HalfPowerSums {
  double hi = 0.0;  // sum_{j=0}^{J} |lambda^{m-j}|^2
  double lo = 0.0;  // sum_{j=0}^{J} |lambda^j|^2
};

inline HalfPowerSums half_power_sums(Complex lambda, int m) {
  require(m >= 1, "half_power_sums: degree must be at least 1");
  const auto p = powers(lambda, m);
  HalfPowerSums s;
  for (int j = 0; j <= m / 2; ++j) {
    s.hi += std::norm(p[m - j]);
    s.lo += std::norm(p[j]);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Realification of complex scalars.

inline RVector vec(Complex z) { return RVector{{z.real(), z.imag()}}; }

inline RMatrix mmap(Complex z) {
  RMatrix M(2, 2);
  M << z.real(), -z.imag(), z.imag(), z.real();
  return M;
}

inline RMatrix sigma() {
  RMatrix S(2, 2);
  S << 1.0, 0.0, 0.0, -1.0;
  return S;
}

// ---------------------------------------------------------------------------
// Unstructured backward error.

inline double eta_unstructured(const MatrixPolynomial& P, Complex lambda, const CVector& x) {
  return residual(P, lambda, x).norm() / power_vector_ascending(lambda, P.m()).norm();
}

// ---------------------------------------------------------------------------
// T classes.

struct CoefficientPair {
  double a = 0.0;
  double b = 0.0;
  std::string branch;
  bool forced_zero_inner_product = false;  // x^T r vanishes identically for this class and lambda
  bool pi_s_singular = false;              // ||Pi_s|| == 0
  Complex lambda_used;                     // lambda after snapping to +-1
  double inv_pi_s2 = 0.0;                  // 1 / ||Pi_s||^2, zero when singular
};

inline void require_structured(const MatrixPolynomial& P, const StructureClass& s,
                               const char* who) {
  const double tol = 1e-10 * std::max(poly_norm(P, Norm::Frobenius), 1e-300);
  if (!(structure_residual(P, s) <= tol))
    throw ValidationError(std::string(who) + ": polynomial is not " + to_string(s));
}

// lambda within tol of +-1 is treated as exactly +-1.
inline Complex snap_real_unit(Complex lambda, double tol, int* which = nullptr) {
  if (which) *which = 0;
  if (std::abs(lambda - 1.0) <= tol) {
    if (which) *which = 1;
    return 1.0;
  }
  if (std::abs(lambda + 1.0) <= tol) {
    if (which) *which = -1;
    return -1.0;
  }
  return lambda;
}

// eta^2 = a ||r||^2 + b |x^T r|^2 for the T classes.
//
// With t = x^T r, the scalar problem sum_j lambda^j a_jj = t under
// a_{m-j,m-j} = sign a_jj costs |t|^2 / ||Pi_s||^2 at its minimizer, so
// a + b = 1 / ||Pi_s||^2 in every row. The spectral rows replace 2/||Lambda||^2
// by the sum over blocks of max(|lambda^j|^2, |lambda^{m-j}|^2) / ||Lambda||^4.
inline CoefficientPair t_coefficients(const StructureClass& s, int m, Complex lambda, Norm norm,
                                      double branch_tol = kDefaultBranchTol) {
  require(s.adjoint == Adjoint::Transpose, "t_coefficients: structure class must be T");
  require(m >= 1, "t_coefficients: degree must be at least 1");
  CoefficientPair c;
  int which = 0;
  const Complex lam = snap_real_unit(lambda, branch_tol, &which);
  c.lambda_used = lam;

  const double L2 = power_vector_ascending(lam, m).squaredNorm();
  const auto pr = projections(lam, m);
  const double pis2 = (s.sign > 0 ? pr.pi_plus : pr.pi_minus).squaredNorm();
  c.pi_s_singular = (which != 0) && pis2 == 0.0;
  c.forced_zero_inner_product = c.pi_s_singular;
  c.inv_pi_s2 = c.pi_s_singular ? 0.0 : 1.0 / pis2;

  if (norm == Norm::Frobenius) {
    c.a = 2.0 / L2;
  } else {
    const auto hs = half_power_sums(lam, m);
    const double S = std::abs(lam) > 1.0 ? hs.hi : hs.lo;
    const double mid = m % 2 == 0 ? std::norm(powers(lam, m / 2).back()) : 0.0;
    c.a = (2.0 * S - mid) / (L2 * L2);
  }
  c.b = c.pi_s_singular ? 0.0 : c.inv_pi_s2 - c.a;

  c.branch = std::string(m % 2 ? "m odd" : "m even") + ", " + to_string(s) + ", ";
  c.branch += which == 1 ? "lambda=1" : which == -1 ? "lambda=-1" : "lambda generic";
  if (norm == Norm::Spectral) c.branch += std::abs(lam) > 1.0 ? ", |lambda|>1" : ", |lambda|<=1";
  c.branch += ", norm " + to_string(norm);
  if (c.forced_zero_inner_product) c.branch += ", x^T r forced to zero";
  return c;
}

struct StructuredEta {
  double eta = 0.0;
  CoefficientPair coeffs;
};

// Tolerance used when deciding that an inner product the structure forces to
// vanish is in fact nonzero.
inline double forced_zero_tolerance(const MatrixPolynomial& P, Complex lambda, double rnorm) {
  const double L = power_vector_ascending(lambda, P.m()).norm();
  return 1e-8 * rnorm + 1e-12 * poly_norm(P, Norm::Frobenius) * L;
}

inline StructuredEta eta_structured_T(const MatrixPolynomial& P, const StructureClass& s,
                                      Complex lambda, const CVector& x, Norm norm,
                                      double branch_tol = kDefaultBranchTol) {
  require(s.adjoint == Adjoint::Transpose, "eta_structured_T: structure class must be T");
  require_structured(P, s, "eta_structured_T");
  StructuredEta out;
  out.coeffs = t_coefficients(s, P.m(), lambda, norm, branch_tol);
  const Complex lam = out.coeffs.lambda_used;
  const CVector xu = normalized(x);
  const CVector r = residual(P, lam, xu);
  const Complex t = xu.transpose() * r;
  const double rho2 = (r - xu.conjugate() * t).squaredNorm();

  if (out.coeffs.forced_zero_inner_product) {
    if (std::abs(t) > forced_zero_tolerance(P, lam, r.norm()))
      throw InconsistencyError("inconsistent structure: x^T P(lambda) x must vanish for " +
                               to_string(s) + " at lambda=" + (lam.real() > 0 ? "1" : "-1"));
    out.eta = std::sqrt(out.coeffs.a * r.squaredNorm());
  } else {
    out.eta = std::sqrt(out.coeffs.a * rho2 + out.coeffs.inv_pi_s2 * std::norm(t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// H classes.

// Realified scalar problem sum_j lambda^j a_jj = inner with
// a_{m-j,m-j} = eps conj(a_jj): unknowns are vec(a_jj) for j < m/2 (and one
// real middle parameter for even m).
struct HRhatResult {
  RVector rhat;                 // [vec(a_00); vec(a_11); ...; middle]
  std::vector<RMatrix> blocks;  // H_j, 2 x 2
  RVector middle;               // 2 x 1 middle block (even m), empty otherwise
  RMatrix stacked;              // [H_0 ... H_{m/2}]
  double cost = 0.0;            // sum_{j=0}^m |a_jj|^2 at the minimizer

  // a_jj for j = 0..m.
  std::vector<Complex> diagonal(int m, int eps) const {
    std::vector<Complex> a(m + 1);
    for (int j = 0; 2 * j < m; ++j) {
      a[j] = Complex(rhat(2 * j), rhat(2 * j + 1));
      a[m - j] = double(eps) * std::conj(a[j]);
    }
    if (m % 2 == 0) a[m / 2] = eps > 0 ? Complex(rhat(m), 0.0) : Complex(0.0, rhat(m));
    return a;
  }
};

// Pairs (a_jj, a_{m-j,m-j}) carry twice the weight of the middle entry in the
// cost, so the pseudoinverse is taken in weighted coordinates; for odd m the
// weights are uniform and this is the plain [H_0 ... ]^+ vec(inner).
inline HRhatResult h_rhat(Complex lambda, int m, Complex inner, int eps) {
  require(m >= 1, "h_rhat: degree must be at least 1");
  require(eps == 1 || eps == -1, "h_rhat: eps must be +1 or -1");
  const auto p = powers(lambda, m);
  const int pairs = (m + 1) / 2;
  const int cols = m + 1;
  HRhatResult h;
  h.stacked = RMatrix::Zero(2, cols);
  RVector w = RVector::Ones(cols);
  for (int j = 0; j < pairs; ++j) {
    RMatrix Hj = mmap(p[j]) + double(eps) * mmap(p[m - j]) * sigma();
    h.blocks.push_back(Hj);
    h.stacked.block(0, 2 * j, 2, 2) = Hj;
    w(2 * j) = w(2 * j + 1) = std::sqrt(2.0);
  }
  if (m % 2 == 0) {
    const Complex c = p[m / 2];
    h.middle = eps > 0 ? RVector{{c.real(), c.imag()}} : RVector{{-c.imag(), c.real()}};
    h.stacked.col(m) = h.middle;
  }
  const RMatrix G = h.stacked * w.cwiseInverse().asDiagonal();
  const RVector u = pseudoinverse(G) * vec(inner);
  h.rhat = u.cwiseQuotient(w);
  h.cost = u.squaredNorm();
  return h;
}

struct HEta {
  double eta_F = 0.0;
  double eta_2 = 0.0;
  std::string branch;
  bool unit_circle = false;
  Complex lambda_used;
  std::optional<HRhatResult> rhat;
};

inline HEta eta_structured_H(const MatrixPolynomial& P, const StructureClass& s, Complex lambda,
                             const CVector& x, double branch_tol = kDefaultBranchTol) {
  require(s.adjoint == Adjoint::ConjugateTranspose, "eta_structured_H: structure class must be H");
  require_structured(P, s, "eta_structured_H");
  if (s.sign < 0) {
    HEta h = eta_structured_H(P * kI, kHPal, lambda, x, branch_tol);
    h.branch = "H-anti-palindromic via i*P, " + h.branch;
    return h;
  }

  const int m = P.m();
  const CVector xu = normalized(x);
  HEta out;
  const bool on_circle = std::abs(std::abs(lambda) - 1.0) <= branch_tol;
  const Complex lam = on_circle ? lambda / std::abs(lambda) : lambda;
  out.lambda_used = lam;
  out.unit_circle = on_circle;

  const CVector r = residual(P, lam, xu);
  const Complex t = xu.adjoint() * r;
  const double rho2 = (r - xu * t).squaredNorm();
  const double L2 = power_vector_ascending(lam, m).squaredNorm();

  if (on_circle) {
    const Complex lhs = std::conj(t);
    const Complex rhs = std::pow(std::conj(lam), m) * t;
    if (std::abs(lhs - rhs) > forced_zero_tolerance(P, lam, r.norm()))
      throw InconsistencyError(
          "inconsistent structure: conj(x^H r) must equal conj(lambda)^m x^H r on the unit circle");
    out.eta_F = std::sqrt((std::norm(t) + 2.0 * rho2) / (m + 1));
    out.eta_2 = r.norm() / std::sqrt(double(m + 1));
    out.branch = "H-palindromic, |lambda|=1";
    return out;
  }

  HRhatResult h = h_rhat(lam, m, t, 1);
  const auto hs = half_power_sums(lam, m);
  const double S = std::abs(lam) > 1.0 ? hs.hi : hs.lo;
  const double mid = m % 2 == 0 ? std::norm(powers(lam, m / 2).back()) : 0.0;
  out.eta_F = std::sqrt(h.cost + 2.0 * rho2 / L2);
  out.eta_2 = std::sqrt(h.cost + (2.0 * S - mid) * rho2 / (L2 * L2));
  out.branch = std::string("H-palindromic, ") + (std::abs(lam) > 1.0 ? "|lambda|>1" : "|lambda|<1") +
               (m % 2 ? ", m odd" : ", m even");
  out.rhat = std::move(h);
  return out;
}

// ---------------------------------------------------------------------------
// Combined report.

struct BackwardErrorReport {
  double eta_unstructured = 0.0;
  double eta_structured_F = 0.0;
  double eta_structured_2 = 0.0;
  std::optional<CoefficientPair> coeffs_F;  // T classes only
  std::optional<CoefficientPair> coeffs_2;
  std::string branch;
  std::vector<std::string> flags;
};

inline BackwardErrorReport backward_error_report(const MatrixPolynomial& P,
                                                 const StructureClass& s, Complex lambda,
                                                 const CVector& x,
                                                 double branch_tol = kDefaultBranchTol) {
  BackwardErrorReport rep;
  if (s.adjoint == Adjoint::Transpose) {
    const auto f = eta_structured_T(P, s, lambda, x, Norm::Frobenius, branch_tol);
    const auto two = eta_structured_T(P, s, lambda, x, Norm::Spectral, branch_tol);
    rep.eta_unstructured = eta_unstructured(P, f.coeffs.lambda_used, x);
    rep.eta_structured_F = f.eta;
    rep.eta_structured_2 = two.eta;
    rep.coeffs_F = f.coeffs;
    rep.coeffs_2 = two.coeffs;
    rep.branch = f.coeffs.branch.substr(0, f.coeffs.branch.find(", norm"));
    if (f.coeffs.forced_zero_inner_product) rep.flags.push_back("forced_zero_inner_product");
    if (f.coeffs.pi_s_singular) rep.flags.push_back("pi_s_singular");
    if (f.coeffs.lambda_used != lambda) rep.flags.push_back("lambda_snapped");
    if (P.m() % 2 == 0 && s.sign < 0 && f.coeffs.lambda_used == Complex(-1.0))
      rep.flags.push_back("unlisted_row_even_anti_lambda_minus_one");
  } else {
    const auto h = eta_structured_H(P, s, lambda, x, branch_tol);
    rep.eta_unstructured = eta_unstructured(P, h.lambda_used, x);
    rep.eta_structured_F = h.eta_F;
    rep.eta_structured_2 = h.eta_2;
    rep.branch = h.branch;
    if (h.unit_circle) rep.flags.push_back("unit_circle");
    if (h.lambda_used != lambda) rep.flags.push_back("lambda_snapped");
  }
  return rep;
}

}  // namespace palin
