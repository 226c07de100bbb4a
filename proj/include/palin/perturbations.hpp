#pragma once
//
// Structured perturbations dP with (P + dP)(lambda) x = 0: the elementary
// existence construction, the minimal Frobenius perturbation (unique), and a
// minimal spectral perturbation obtained by dilating each coefficient block.
//
// Every dA_j is written in the basis Q = [x, Q_1] (conj(Q) M_j Q^H for the
// T classes, Q M_j Q^H for the H classes). The first column of M_j is fixed by
// the minimum-norm interpolation problems; the trailing (n-1) x (n-1) block
// is free and is either zero (Frobenius) or the norm-preserving completion
// (spectral).
//

#include <optional>
#include <vector>

#include "palin/backward_error.hpp"
#include "palin/dilation.hpp"

namespace palin {

struct StructuredPerturbation {
  MatrixPolynomial delta;
  StructureClass cls;
  Norm norm = Norm::Frobenius;
  double certified_norm = 0.0;
  double constraint_residual = 0.0;  // ||(P + dP)(lambda) x||
  double structure_residual = 0.0;
  Complex lambda_used;
};

// Terms of dA_j, j = 0..m: diagonal part (multiple of conj(x) x^H or x x^H),
// off-diagonal part (first row and column outside x), and the dilation
// correction acting on range(Q_1) only. Each term has rank at most two.
struct PerturbationKernels {
  std::vector<CMatrix> diagonal;
  std::vector<CMatrix> off_diagonal;
  std::vector<CMatrix> dilation;
};

inline StructuredPerturbation certify(const MatrixPolynomial& P, MatrixPolynomial delta,
                                      const StructureClass& cls, Complex lambda, const CVector& x,
                                      Norm norm) {
  StructuredPerturbation out;
  out.cls = cls;
  out.norm = norm;
  out.lambda_used = lambda;
  out.constraint_residual = (evaluate(P + delta, lambda) * normalized(x)).norm();
  out.structure_residual = structure_residual(delta, cls);
  out.certified_norm = poly_norm(delta, norm);
  out.delta = std::move(delta);
  return out;
}

namespace detail {

// Fill the upper half from the lower one and make the middle coefficient
// satisfy its symmetry exactly.
inline MatrixPolynomial mirror(std::vector<CMatrix> c, const StructureClass& s) {
  const int m = static_cast<int>(c.size()) - 1;
  const double e = s.sign;
  for (int j = 0; 2 * j < m; ++j) c[m - j] = e * apply_adjoint(c[j], s.adjoint);
  if (m % 2 == 0) {
    const CMatrix& M = c[m / 2];
    c[m / 2] = (M + e * apply_adjoint(M, s.adjoint)) / 2.0;
  }
  return MatrixPolynomial(std::move(c));
}

}  // namespace detail

// Elementary construction: not minimal, but always structured and exact.
inline StructuredPerturbation existence_perturbation(const MatrixPolynomial& P,
                                                     const StructureClass& s, Complex lambda,
                                                     const CVector& x0) {
  require_structured(P, s, "existence_perturbation");
  const int m = P.m();
  const Index n = P.n();
  const CVector x = normalized(x0);
  const CVector r = residual(P, lambda, x);
  const double L2 = power_vector_ascending(lambda, m).squaredNorm();
  const auto lc = powers(std::conj(lambda), m);
  const auto lp = powers(lambda, m);
  const CMatrix Px = CMatrix::Identity(n, n) - x * x.adjoint();
  const double e = s.sign;

  std::vector<CMatrix> c(m + 1);
  for (int j = 0; 2 * j <= m; ++j) {
    if (s.adjoint == Adjoint::Transpose) {
      const Complex q = x.transpose() * P[j] * x;
      c[j] = -q * x.conjugate() * x.adjoint() +
             (lc[j] * Px.transpose() * r * x.adjoint() +
              e * lc[m - j] * x.conjugate() * r.transpose() * Px) /
                 L2;
    } else {
      const Complex q = x.adjoint() * P[j] * x;
      c[j] = -q * x * x.adjoint() +
             (lc[j] * Px * r * x.adjoint() + e * lp[m - j] * x * r.adjoint() * Px) / L2;
    }
  }
  return certify(P, detail::mirror(std::move(c), s), s, lambda, x, Norm::Frobenius);
}

// Optional contractions for the spectral construction, one per block below
// the middle (index j < m/2). Empty entries mean zero.
using Contractions = std::vector<CMatrix>;

namespace detail {

// Dilation correction conj(Q_1) D Q_1^H (T) or Q_1 D Q_1^H (H) for one block,
// given the scalar corner a and the first column/row b, c in Q_1 coordinates.
inline CMatrix dilation_term(const CMatrix& Q1, bool transpose_basis, Complex a, const CVector& b,
                             const CVector& c_row, const CMatrix& Z) {
  const Index k = Q1.cols();
  if (k == 0) return CMatrix::Zero(Q1.rows(), Q1.rows());
  CMatrix A(1, 1);
  A(0, 0) = a;
  const CMatrix B = b;
  const CMatrix C = c_row.transpose();
  const auto blocks = dkw_complete(A, B, C, Z);
  const CMatrix left = transpose_basis ? CMatrix(Q1.conjugate()) : Q1;
  return left * blocks.D * Q1.adjoint();
}

}  // namespace detail

// Kernels of the minimal perturbation for the T classes.
//
//   diagonal_j     = a_j conj(x) x^H,  a_j = (conj(l)^j + eps conj(l)^{m-j}) x^T r / (2 ||Pi_s||^2)
//   off_diagonal_j = (conj(l)^j P_x^T r x^H + eps conj(l)^{m-j} conj(x) r^T P_x) / ||Lambda||^2
//   dilation_j     = conj(Q_1) D_j Q_1^H with D_j the completion of [[a_j, c_j^T], [b_j, *]]
inline PerturbationKernels t_kernels(const MatrixPolynomial& P, const StructureClass& s,
                                     Complex lam, const CVector& x, const CoefficientPair& coeffs,
                                     bool spectral, const Contractions& Z = {}) {
  const int m = P.m();
  const Index n = P.n();
  const double e = s.sign;
  const CVector r = residual(P, lam, x);
  const Complex t = x.transpose() * r;
  const double L2 = power_vector_ascending(lam, m).squaredNorm();
  const auto lc = powers(std::conj(lam), m);
  const CMatrix Px = CMatrix::Identity(n, n) - x * x.adjoint();
  const CVector pr = Px.transpose() * r;  // P_x^T r = r - conj(x) x^T r
  const double rho2 = pr.squaredNorm();
  const bool degenerate = rho2 <= 1e-14 * r.squaredNorm() || rho2 == 0.0;

  PerturbationKernels k;
  CMatrix Q1;
  CVector y;
  if (spectral && !degenerate) {
    Q1 = unitary_completion(x);
    y = Q1.transpose() * r;
  }
  for (int j = 0; j <= m; ++j) {
    const Complex aj = coeffs.pi_s_singular ? Complex(0.0)
                                            : (lc[j] + e * lc[m - j]) * t * (coeffs.inv_pi_s2 / 2.0);
    k.diagonal.push_back(aj * x.conjugate() * x.adjoint());
    k.off_diagonal.push_back(
        (lc[j] * pr * x.adjoint() + e * lc[m - j] * x.conjugate() * r.transpose() * Px) / L2);
    if (!spectral || degenerate || n == 1) {
      k.dilation.push_back(CMatrix::Zero(n, n));
      continue;
    }
    const CVector b = lc[j] * y / L2;
    const CVector c_row = e * lc[m - j] * y / L2;
    CMatrix Zj;
    if (2 * j < m && j < static_cast<int>(Z.size())) Zj = Z[j];
    k.dilation.push_back(detail::dilation_term(Q1, true, aj, b, c_row, Zj));
  }
  return k;
}

// Kernels for the H-palindromic class (anti-palindromic is handled through i*P).
inline PerturbationKernels h_kernels(const MatrixPolynomial& P, Complex lam, const CVector& x,
                                     const std::vector<Complex>& a, bool spectral,
                                     const Contractions& Z = {}) {
  const int m = P.m();
  const Index n = P.n();
  const CVector r = residual(P, lam, x);
  const double L2 = power_vector_ascending(lam, m).squaredNorm();
  const auto lc = powers(std::conj(lam), m);
  const auto lp = powers(lam, m);
  const CMatrix Px = CMatrix::Identity(n, n) - x * x.adjoint();
  const CVector pr = Px * r;
  const double rho2 = pr.squaredNorm();
  const bool degenerate = rho2 <= 1e-14 * r.squaredNorm() || rho2 == 0.0;

  PerturbationKernels k;
  CMatrix Q1;
  CVector w;
  if (spectral && !degenerate) {
    Q1 = unitary_completion(x);
    w = Q1.adjoint() * r;
  }
  for (int j = 0; j <= m; ++j) {
    k.diagonal.push_back(a[j] * x * x.adjoint());
    k.off_diagonal.push_back((lc[j] * pr * x.adjoint() + lp[m - j] * x * pr.adjoint()) / L2);
    if (!spectral || degenerate || n == 1) {
      k.dilation.push_back(CMatrix::Zero(n, n));
      continue;
    }
    const CVector b = lc[j] * w / L2;
    const CVector c_row = lp[m - j] * w.conjugate() / L2;
    CMatrix Zj;
    if (2 * j < m && j < static_cast<int>(Z.size())) Zj = Z[j];
    k.dilation.push_back(detail::dilation_term(Q1, false, a[j], b, c_row, Zj));
  }
  return k;
}

inline MatrixPolynomial assemble(const PerturbationKernels& k, const StructureClass& s) {
  std::vector<CMatrix> c(k.diagonal.size());
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = k.diagonal[j] + k.off_diagonal[j] + k.dilation[j];
  return detail::mirror(std::move(c), s);
}

inline StructuredPerturbation minimal_perturbation_T(const MatrixPolynomial& P,
                                                     const StructureClass& s, Complex lambda,
                                                     const CVector& x0, Norm norm,
                                                     double branch_tol = kDefaultBranchTol,
                                                     const Contractions& Z = {}) {
  require(s.adjoint == Adjoint::Transpose, "minimal_perturbation_T: structure class must be T");
  // Validates structure and the forced-zero consistency condition.
  const auto eta = eta_structured_T(P, s, lambda, x0, norm, branch_tol);
  const Complex lam = eta.coeffs.lambda_used;
  const CVector x = normalized(x0);
  const auto k = t_kernels(P, s, lam, x, eta.coeffs, norm == Norm::Spectral, Z);
  return certify(P, assemble(k, s), s, lam, x, norm);
}

inline std::vector<Complex> h_diagonal(const MatrixPolynomial& P, Complex lam, const CVector& x,
                                       bool unit_circle) {
  const int m = P.m();
  const Complex t = x.adjoint() * residual(P, lam, x);
  if (unit_circle) {
    const auto lc = powers(std::conj(lam), m);
    const double L2 = double(m + 1);
    std::vector<Complex> a(m + 1);
    for (int j = 0; j <= m; ++j) a[j] = lc[j] * t / L2;
    return a;
  }
  return h_rhat(lam, m, t, 1).diagonal(m, 1);
}

inline StructuredPerturbation minimal_perturbation_H(const MatrixPolynomial& P,
                                                     const StructureClass& s, Complex lambda,
                                                     const CVector& x0, Norm norm,
                                                     double branch_tol = kDefaultBranchTol,
                                                     const Contractions& Z = {}) {
  require(s.adjoint == Adjoint::ConjugateTranspose,
          "minimal_perturbation_H: structure class must be H");
  if (s.sign < 0) {
    // iP is H-palindromic; dP_ap = -i dP_p(iP).
    require_structured(P, s, "minimal_perturbation_H");
    auto pal = minimal_perturbation_H(P * kI, kHPal, lambda, x0, norm, branch_tol, Z);
    return certify(P, pal.delta * (-kI), s, pal.lambda_used, x0, norm);
  }
  const auto eta = eta_structured_H(P, s, lambda, x0, branch_tol);
  const Complex lam = eta.lambda_used;
  const CVector x = normalized(x0);
  const auto a = h_diagonal(P, lam, x, eta.unit_circle);
  const auto k = h_kernels(P, lam, x, a, norm == Norm::Spectral, Z);
  return certify(P, assemble(k, s), s, lam, x, norm);
}

inline StructuredPerturbation minimal_perturbation(const MatrixPolynomial& P,
                                                   const StructureClass& s, Complex lambda,
                                                   const CVector& x, Norm norm,
                                                   double branch_tol = kDefaultBranchTol,
                                                   const Contractions& Z = {}) {
  return s.adjoint == Adjoint::Transpose
             ? minimal_perturbation_T(P, s, lambda, x, norm, branch_tol, Z)
             : minimal_perturbation_H(P, s, lambda, x, norm, branch_tol, Z);
}

// K(z) = dP(z) + P_x^* N(z) P_x: another structured solution of the same
// interpolation problem (P_x^T N P_x for T classes, P_x N P_x for H classes).
inline MatrixPolynomial solution_family_offset(const StructuredPerturbation& base,
                                               const MatrixPolynomial& N, const CVector& x0) {
  require(N.n() == base.delta.n() && N.m() == base.delta.m(),
          "solution_family_offset: N has the wrong shape");
  const double tol = 1e-10 * std::max(poly_norm(N, Norm::Frobenius), 1e-300);
  if (!(structure_residual(N, base.cls) <= tol))
    throw ValidationError("solution_family_offset: N is not " + to_string(base.cls));
  const CVector x = normalized(x0);
  const Index n = N.n();
  const CMatrix Px = CMatrix::Identity(n, n) - x * x.adjoint();
  const CMatrix left = base.cls.adjoint == Adjoint::Transpose ? CMatrix(Px.transpose()) : Px;
  std::vector<CMatrix> c(N.m() + 1);
  for (int j = 0; j <= N.m(); ++j) c[j] = base.delta[j] + left * N[j] * Px;
  return MatrixPolynomial(std::move(c));
}

}  // namespace palin
