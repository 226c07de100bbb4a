#pragma once
//
// Small dense complex linear-algebra kernel: norms, SVD, pseudoinverse,
// unitary completion, determinants and scalar polynomial roots.
//
// Matrices are Eigen dense types; the SVD is Eigen's two-sided Jacobi, which
// is accurate to working precision for the desk-scale sizes used here.
//

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "palin/errors.hpp"

namespace palin {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kEps = std::numeric_limits<double>::epsilon();
inline constexpr Complex kI{0.0, 1.0};

// [1, z, z^2, ..., z^k] by repeated multiplication (0^0 == 1).
inline std::vector<Complex> powers(Complex z, int k) {
  std::vector<Complex> p(static_cast<std::size_t>(k) + 1);
  p[0] = 1.0;
  for (int j = 1; j <= k; ++j) p[j] = p[j - 1] * z;
  return p;
}

template <class Derived>
void require_finite(const Eigen::MatrixBase<Derived>& A, const char* what) {
  if (!A.allFinite()) throw ValidationError(std::string(what) + ": non-finite entries");
}

struct SvdResult {
  CMatrix U;
  RVector singular_values;  // nonincreasing
  CMatrix V;
};

inline SvdResult svd(const CMatrix& A) {
  require(A.size() > 0, "svd: empty matrix");
  require_finite(A, "svd");
  Eigen::JacobiSVD<CMatrix> dec(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

template <class Derived>
double spectral_norm(const Eigen::MatrixBase<Derived>& A) {
  require(A.size() > 0, "spectral_norm: empty matrix");
  require_finite(A, "spectral_norm");
  using M = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::JacobiSVD<M> dec{M(A)};
  return dec.singularValues()(0);
}

// Moore-Penrose pseudoinverse. Singular values below rel_tol * sigma_max are
// treated as zero; a negative rel_tol selects max(rows, cols) * eps.
template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> pseudoinverse(
    const Eigen::MatrixBase<Derived>& A, double rel_tol = -1.0) {
  using M = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (A.size() == 0) return M::Zero(A.cols(), A.rows());
  require_finite(A, "pseudoinverse");
  Eigen::JacobiSVD<M> dec(M(A), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = dec.singularValues();
  if (rel_tol < 0) rel_tol = static_cast<double>(std::max(A.rows(), A.cols())) * kEps;
  const double cutoff = rel_tol * s(0);
  M result = M::Zero(A.cols(), A.rows());
  for (Index k = 0; k < s.size(); ++k) {
    if (s(k) <= cutoff || s(k) == 0.0) break;
    result += (dec.matrixV().col(k) / s(k)) * dec.matrixU().col(k).adjoint();
  }
  return result;
}

// Q_1 (n x (n-1)) such that [x, Q_1] is unitary, built from one Householder
// reflector H with H x = alpha e_1. H is Hermitian and unitary, so its first
// column is x / alpha and the remaining columns are orthogonal to x.
inline CMatrix unitary_completion(const CVector& x) {
  const Index n = x.size();
  require(n >= 1, "unitary_completion: empty vector");
  require_finite(x, "unitary_completion");
  require(std::abs(x.norm() - 1.0) <= 1e-12, "unitary_completion: x must have unit 2-norm");
  if (n == 1) return CMatrix(1, 0);

  const double ax = std::abs(x(0));
  const Complex phase = ax == 0.0 ? Complex(1.0) : x(0) / ax;
  CVector w = x;
  w(0) += phase;  // alpha = -phase, w = x - alpha e_1
  const double wn2 = w.squaredNorm();
  CMatrix H = CMatrix::Identity(n, n) - (2.0 / wn2) * w * w.adjoint();
  return H.rightCols(n - 1);
}

inline Complex determinant(const CMatrix& A) {
  require(A.rows() == A.cols() && A.rows() > 0, "determinant: square nonempty matrix required");
  require_finite(A, "determinant");
  return Eigen::PartialPivLU<CMatrix>(A).determinant();
}

struct RootsResult {
  std::vector<Complex> roots;  // finite roots; exact zeros included
  int infinite_roots = 0;      // leading coefficients dropped as negligible
  int iterations = 0;
  bool converged = false;
};

namespace detail {

inline Complex horner(const std::vector<Complex>& c, Complex z, Complex* deriv = nullptr) {
  Complex p = c.back();
  Complex dp = 0.0;
  for (std::size_t k = c.size() - 1; k-- > 0;) {
    dp = dp * z + p;
    p = p * z + c[k];
  }
  if (deriv) *deriv = dp;
  return p;
}

inline double horner_abs(const std::vector<Complex>& c, double r) {
  double s = std::abs(c.back());
  for (std::size_t k = c.size() - 1; k-- > 0;) s = s * r + std::abs(c[k]);
  return s;
}

}  // namespace detail

// Roots of sum_k coeffs[k] z^k via Aberth-Ehrlich simultaneous iteration.
//
// Leading coefficients with |c| <= lead_tol * max|c| are dropped and counted
// as infinite roots; trailing exact zeros become exact zero roots. Starting
// points sit on a circle of radius 1 + max|c_j / c_d| with a small angular
// jitter; the iteration is capped at max_iter sweeps.
inline RootsResult scalar_poly_roots(std::vector<Complex> coeffs, double lead_tol = 1e-14,
                                     int max_iter = 500) {
  require(!coeffs.empty(), "scalar_poly_roots: no coefficients");
  for (const auto& c : coeffs)
    require(std::isfinite(c.real()) && std::isfinite(c.imag()),
            "scalar_poly_roots: non-finite coefficient");

  RootsResult out;
  double cmax = 0.0;
  for (const auto& c : coeffs) cmax = std::max(cmax, std::abs(c));
  require(cmax > 0.0, "scalar_poly_roots: zero polynomial");

  while (coeffs.size() > 1 && std::abs(coeffs.back()) <= lead_tol * cmax) {
    coeffs.pop_back();
    ++out.infinite_roots;
  }
  std::size_t zeros = 0;
  while (zeros + 1 < coeffs.size() && coeffs[zeros] == Complex(0.0)) ++zeros;
  out.roots.assign(zeros, Complex(0.0));
  coeffs.erase(coeffs.begin(), coeffs.begin() + static_cast<std::ptrdiff_t>(zeros));

  const int d = static_cast<int>(coeffs.size()) - 1;
  if (d == 0) {
    out.converged = true;
    return out;
  }
  const Complex lead = coeffs.back();
  for (auto& c : coeffs) c /= lead;

  double radius = 0.0;
  for (int j = 0; j < d; ++j) radius = std::max(radius, std::abs(coeffs[j]));
  radius += 1.0;

  std::vector<Complex> z(d);
  for (int k = 0; k < d; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / d + 0.4 / d + 1e-3 * k;
    z[k] = std::polar(radius, angle);
  }

  std::vector<bool> done(d, false);
  int it = 0;
  for (; it < max_iter; ++it) {
    bool all_done = true;
    for (int k = 0; k < d; ++k) {
      if (done[k]) continue;
      Complex dp;
      const Complex p = detail::horner(coeffs, z[k], &dp);
      const double bound = 8.0 * kEps * detail::horner_abs(coeffs, std::abs(z[k]));
      if (std::abs(p) <= bound) {
        done[k] = true;
        continue;
      }
      all_done = false;
      const Complex newton = p / dp;
      Complex repulsion = 0.0;
      for (int j = 0; j < d; ++j)
        if (j != k) repulsion += 1.0 / (z[k] - z[j]);
      const Complex step = newton / (1.0 - newton * repulsion);
      z[k] -= step;
      if (std::abs(step) <= 2.0 * kEps * std::abs(z[k])) done[k] = true;
    }
    if (all_done) break;
  }
  out.iterations = it;

  out.converged = true;
  for (int k = 0; k < d; ++k) {
    const double tol = 1e-8 * std::pow(1.0 + std::abs(z[k]), d);
    if (!(std::abs(detail::horner(coeffs, z[k])) <= tol)) out.converged = false;
  }
  out.roots.insert(out.roots.end(), z.begin(), z.end());
  return out;
}

}  // namespace palin
