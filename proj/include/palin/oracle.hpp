#pragma once
//
// Brute-force reference solvers. Nothing here uses the closed-form backward
// error formulas: the structured Frobenius minimum is recovered from a
// realified minimum-norm least-squares problem over an orthonormal basis of
// the structure class.
//

#include <vector>

#include "palin/polynomial.hpp"

namespace palin {

// Constraint shapes for sum_{j=0}^m lambda^j a_j = rhs, minimizing sum |a_j|^2.
enum class ScalarMode {
  Unconstrained,       // a_j free
  Symmetric,           // a_{m-j} = eps a_j
  ConjugateSymmetric,  // a_{m-j} = eps conj(a_j), |lambda| != 1
};

namespace detail {

// Minimum-norm real solution of G u = b with a consistency check.
struct LeastSquares {
  RVector u;
  double residual = 0.0;
};

inline LeastSquares min_norm_solve(const RMatrix& G, const RVector& b) {
  LeastSquares out;
  if (G.cols() == 0) {
    out.u = RVector(0);
    out.residual = b.norm();
    return out;
  }
  out.u = pseudoinverse(G, 1e-13) * b;
  out.residual = (G * out.u - b).norm();
  return out;
}

}  // namespace detail

// Closed-form minimizers for the unconstrained and symmetric shapes, a realified
// least-squares solve for the conjugate-coupled shape.
inline std::vector<Complex> min_norm_scalar(Complex lambda, int m, Complex rhs, ScalarMode mode,
                                            int eps = 1) {
  require(m >= 1, "min_norm_scalar: degree must be at least 1");
  require(eps == 1 || eps == -1, "min_norm_scalar: eps must be +1 or -1");
  const auto lc = powers(std::conj(lambda), m);
  std::vector<Complex> a(m + 1, Complex(0.0));
  if (rhs == Complex(0.0)) return a;

  if (mode == ScalarMode::Unconstrained) {
    double L2 = 0.0;
    for (const auto& p : lc) L2 += std::norm(p);
    for (int j = 0; j <= m; ++j) a[j] = lc[j] * rhs / L2;
    return a;
  }

  if (mode == ScalarMode::Symmetric) {
    // Free pairs (a_j, eps a_j) with weight 2 and, for even m and eps = 1, a
    // free middle entry with weight 1; the middle is forced to zero for eps = -1.
    const auto lp = powers(lambda, m);
    double denom = 0.0;
    for (int j = 0; 2 * j < m; ++j) denom += std::norm(lp[j] + double(eps) * lp[m - j]) / 2.0;
    if (m % 2 == 0 && eps > 0) denom += std::norm(lp[m / 2]);
    if (denom == 0.0)
      throw InconsistencyError("min_norm_scalar: structure forces the sum to vanish, rhs must be 0");
    for (int j = 0; j <= m; ++j) a[j] = (lc[j] + double(eps) * lc[m - j]) * rhs / (2.0 * denom);
    return a;
  }

  require(std::abs(std::abs(lambda) - 1.0) > 1e-12,
          "min_norm_scalar: conjugate-coupled shape needs |lambda| != 1");
  // Orthonormal real parameters: each pair (a_j, eps conj a_j) scaled by
  // 1/sqrt(2) per entry; the middle entry is real (eps = 1) or imaginary (eps = -1).
  const auto lp = powers(lambda, m);
  std::vector<std::vector<Complex>> atoms;
  const double h = 1.0 / std::sqrt(2.0);
  for (int j = 0; 2 * j < m; ++j)
    for (Complex unit : {Complex(1.0), kI}) {
      std::vector<Complex> v(m + 1, Complex(0.0));
      v[j] = unit * h;
      v[m - j] = double(eps) * std::conj(unit) * h;
      atoms.push_back(v);
    }
  if (m % 2 == 0) {
    std::vector<Complex> v(m + 1, Complex(0.0));
    v[m / 2] = eps > 0 ? Complex(1.0) : kI;
    atoms.push_back(v);
  }
  RMatrix G(2, atoms.size());
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    Complex s = 0.0;
    for (int j = 0; j <= m; ++j) s += lp[j] * atoms[k][j];
    G(0, k) = s.real();
    G(1, k) = s.imag();
  }
  const auto sol = detail::min_norm_solve(G, RVector{{rhs.real(), rhs.imag()}});
  if (sol.residual > 1e-10 * std::abs(rhs))
    throw InconsistencyError("min_norm_scalar: constraint cannot be met");
  for (std::size_t k = 0; k < atoms.size(); ++k)
    for (int j = 0; j <= m; ++j) a[j] += sol.u(k) * atoms[k][j];
  return a;
}

// x_j = conj(lambda)^j y / ||Lambda_m||^2.
inline std::vector<CVector> min_norm_vector(Complex lambda, int m, const CVector& y) {
  const auto lc = powers(std::conj(lambda), m);
  double L2 = 0.0;
  for (const auto& p : lc) L2 += std::norm(p);
  std::vector<CVector> x(m + 1);
  for (int j = 0; j <= m; ++j) x[j] = lc[j] * y / L2;
  return x;
}

// ---------------------------------------------------------------------------
// Structured Frobenius oracle.

// One element of an orthonormal (real inner product Re tr(E^H F)) basis of
// the structure class: a short list of entries (j, row, col, value).
struct Atom {
  struct Entry {
    int j;
    Index row, col;
    Complex value;
  };
  std::vector<Entry> entries;
};

inline std::vector<Atom> structure_basis(Index n, int m, const StructureClass& s) {
  const double h = 1.0 / std::sqrt(2.0);
  const double e = s.sign;
  const bool T = s.adjoint == Adjoint::Transpose;
  std::vector<Atom> basis;
  auto image = [&](Complex v) { return T ? e * v : e * std::conj(v); };

  for (int j = 0; 2 * j < m; ++j)
    for (Index p = 0; p < n; ++p)
      for (Index q = 0; q < n; ++q)
        for (Complex unit : {Complex(1.0), kI})
          basis.push_back(Atom{{{j, p, q, unit * h}, {m - j, q, p, image(unit) * h}}});

  if (m % 2 == 0) {
    const int j = m / 2;
    for (Index p = 0; p < n; ++p) {
      // Diagonal entries: v = image(v) restricts them to a line (or to zero).
      for (Complex unit : {Complex(1.0), kI})
        if (image(unit) == unit) basis.push_back(Atom{{{j, p, p, unit}}});
      for (Index q = p + 1; q < n; ++q)
        for (Complex unit : {Complex(1.0), kI})
          basis.push_back(Atom{{{j, p, q, unit * h}, {j, q, p, image(unit) * h}}});
    }
  }
  return basis;
}

struct OracleResult {
  double eta = 0.0;
  MatrixPolynomial delta;
  double lsq_residual = 0.0;
  Index columns = 0;
};

inline OracleResult frobenius_oracle(const MatrixPolynomial& P, const StructureClass& s,
                                     Complex lambda, const CVector& x0) {
  const Index n = P.n();
  const int m = P.m();
  const CVector x = normalized(x0);
  const CVector r = residual(P, lambda, x);
  const auto lp = powers(lambda, m);
  const auto basis = structure_basis(n, m, s);
  require(basis.size() <= 5000, "frobenius_oracle: problem too large");

  RMatrix G = RMatrix::Zero(2 * n, basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k)
    for (const auto& e : basis[k].entries) {
      const Complex v = lp[e.j] * e.value * x(e.col);
      G(e.row, k) += v.real();
      G(n + e.row, k) += v.imag();
    }
  RVector b(2 * n);
  b << r.real(), r.imag();

  const auto sol = detail::min_norm_solve(G, b);
  OracleResult out;
  out.lsq_residual = sol.residual;
  out.columns = static_cast<Index>(basis.size());
  const double floor = 1e-12 * poly_norm(P, Norm::Frobenius) * power_vector_ascending(lambda, m).norm();
  if (sol.residual > 1e-8 * r.norm() + floor)
    throw InconsistencyError("frobenius_oracle: no structured perturbation meets the constraint");

  std::vector<CMatrix> c(m + 1, CMatrix::Zero(n, n));
  for (std::size_t k = 0; k < basis.size(); ++k)
    for (const auto& e : basis[k].entries) c[e.j](e.row, e.col) += sol.u(k) * e.value;
  out.delta = MatrixPolynomial(std::move(c));
  out.eta = sol.u.norm();
  return out;
}

// Unstructured minimum: each dA_j = x_j x^H with x_j from min_norm_vector.
inline double unstructured_oracle(const MatrixPolynomial& P, Complex lambda, const CVector& x0) {
  const CVector x = normalized(x0);
  const auto xs = min_norm_vector(lambda, P.m(), residual(P, lambda, x));
  double s = 0.0;
  for (const auto& v : xs) s += (v * x.adjoint()).squaredNorm();
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Grid search over the corner of a 2 x 2 matrix [[a, c], [b, d]].

struct GridResult {
  double min_norm = 0.0;
  Complex argmin;
  long long points = 0;
};

// Largest eigenvalue of the Gram matrix [[p, w], [conj w, q]], written so that
// nothing cancels when the two singular values are close.
inline double spectral_norm_2x2(Complex a, Complex b, Complex c, Complex d) {
  const double p = std::norm(a) + std::norm(b);
  const double q = std::norm(c) + std::norm(d);
  const Complex w = std::conj(a) * c + std::conj(b) * d;
  return std::sqrt((p + q + std::hypot(p - q, 2.0 * std::abs(w))) / 2.0);
}

inline GridResult dkw_grid_oracle(Complex a, Complex b, Complex c, double step, double radius) {
  require(step > 0.0 && radius > 0.0, "dkw_grid_oracle: step and radius must be positive");
  const long long K = static_cast<long long>(std::ceil(radius / step));
  GridResult best;
  best.min_norm = std::numeric_limits<double>::infinity();
  for (long long i = -K; i <= K; ++i)
    for (long long k = -K; k <= K; ++k) {
      const Complex d(i * step, k * step);
      if (std::abs(d) > radius) continue;
      ++best.points;
      const double v = spectral_norm_2x2(a, b, c, d);
      if (v < best.min_norm) {
        best.min_norm = v;
        best.argmin = d;
      }
    }
  return best;
}

}  // namespace palin
