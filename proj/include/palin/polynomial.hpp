#pragma once
//
// Matrix polynomials P(z) = sum_j z^j A_j, the four palindromic structure
// classes, evaluation, residuals and random structured generation.
//

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "palin/numerics.hpp"

namespace palin {

enum class Adjoint { Transpose, ConjugateTranspose };
enum class Norm { Frobenius, Spectral };

struct StructureClass {
  Adjoint adjoint = Adjoint::Transpose;
  int sign = 1;  // +1 palindromic, -1 anti-palindromic

  bool operator==(const StructureClass&) const = default;
  bool palindromic() const { return sign > 0; }
};

inline constexpr StructureClass kTPal{Adjoint::Transpose, 1};
inline constexpr StructureClass kTAnti{Adjoint::Transpose, -1};
inline constexpr StructureClass kHPal{Adjoint::ConjugateTranspose, 1};
inline constexpr StructureClass kHAnti{Adjoint::ConjugateTranspose, -1};
inline constexpr StructureClass kAllClasses[] = {kTPal, kTAnti, kHPal, kHAnti};

inline std::string to_string(const StructureClass& s) {
  std::string out = s.adjoint == Adjoint::Transpose ? "T-" : "H-";
  return out + (s.sign > 0 ? "palindromic" : "anti-palindromic");
}

inline std::string to_string(Norm n) { return n == Norm::Frobenius ? "F" : "2"; }

inline CMatrix apply_adjoint(const CMatrix& A, Adjoint adj) {
  return adj == Adjoint::Transpose ? CMatrix(A.transpose()) : CMatrix(A.adjoint());
}

template <class Derived>
double matrix_norm(const Eigen::MatrixBase<Derived>& A, Norm norm) {
  if (A.size() == 0) return 0.0;
  return norm == Norm::Frobenius ? A.norm() : spectral_norm(A);
}

class MatrixPolynomial {
 public:
  MatrixPolynomial() = default;

  explicit MatrixPolynomial(std::vector<CMatrix> coeffs) : coeffs_(std::move(coeffs)) {
    require(coeffs_.size() >= 2, "matrix polynomial: degree must be at least 1");
    const Index n = coeffs_[0].rows();
    require(n >= 1, "matrix polynomial: coefficient size must be at least 1");
    for (const auto& A : coeffs_) {
      require(A.rows() == n && A.cols() == n,
              "matrix polynomial: all coefficients must be square of the same size");
      require_finite(A, "matrix polynomial");
    }
  }

  static MatrixPolynomial zero(Index n, int m) {
    return MatrixPolynomial(std::vector<CMatrix>(m + 1, CMatrix::Zero(n, n)));
  }

  Index n() const { return coeffs_.empty() ? 0 : coeffs_[0].rows(); }
  int m() const { return static_cast<int>(coeffs_.size()) - 1; }
  const CMatrix& operator[](int j) const { return coeffs_[j]; }
  CMatrix& operator[](int j) { return coeffs_[j]; }
  const std::vector<CMatrix>& coeffs() const { return coeffs_; }

  MatrixPolynomial operator+(const MatrixPolynomial& o) const {
    require(o.n() == n() && o.m() == m(), "matrix polynomial: shape mismatch in sum");
    auto c = coeffs_;
    for (int j = 0; j <= m(); ++j) c[j] += o.coeffs_[j];
    return MatrixPolynomial(std::move(c));
  }
  MatrixPolynomial operator-(const MatrixPolynomial& o) const { return *this + o * Complex(-1.0); }
  MatrixPolynomial operator*(Complex s) const {
    auto c = coeffs_;
    for (auto& A : c) A *= s;
    return MatrixPolynomial(std::move(c));
  }

 private:
  std::vector<CMatrix> coeffs_;
};

inline double poly_norm(const MatrixPolynomial& P, Norm norm) {
  double s = 0.0;
  for (const auto& A : P.coeffs()) {
    const double a = matrix_norm(A, norm);
    s += a * a;
  }
  return std::sqrt(s);
}

// Horner evaluation of sum_j lambda^j A_j.
inline CMatrix evaluate(const MatrixPolynomial& P, Complex lambda) {
  CMatrix acc = P[P.m()];
  for (int j = P.m() - 1; j >= 0; --j) acc = (lambda * acc + P[j]).eval();
  return acc;
}

// Returns x / ||x||, rejecting vectors too small or too large to rescale safely.
inline CVector normalized(const CVector& x) {
  require(x.size() >= 1, "vector: empty");
  require_finite(x, "vector");
  const double nx = x.norm();
  require(nx > 0.0, "vector: zero vector");
  require(nx >= 1e-8 && nx <= 1e8, "vector: norm outside [1e-8, 1e8]");
  return x / nx;
}

// r = -P(lambda) x with x normalized first.
inline CVector residual(const MatrixPolynomial& P, Complex lambda, const CVector& x) {
  require(x.size() == P.n(), "residual: vector length does not match polynomial size");
  return -(evaluate(P, lambda) * normalized(x));
}

// max_j || A_{m-j} - sign * A_j^* ||_F; zero exactly when P is in the class.
inline double structure_residual(const MatrixPolynomial& P, const StructureClass& s) {
  double worst = 0.0;
  const int m = P.m();
  for (int j = 0; j <= m; ++j) {
    const CMatrix d = P[m - j] - double(s.sign) * apply_adjoint(P[j], s.adjoint);
    worst = std::max(worst, d.norm());
  }
  return worst;
}

// B_j = A_{m-j}^*, i.e. z^m P^*(1/z).
inline MatrixPolynomial adjoint_reversal(const MatrixPolynomial& P, Adjoint adj) {
  std::vector<CMatrix> c(P.m() + 1);
  for (int j = 0; j <= P.m(); ++j) c[j] = apply_adjoint(P[P.m() - j], adj);
  return MatrixPolynomial(std::move(c));
}

// [1, lambda, ..., lambda^k]
inline CVector power_vector_ascending(Complex lambda, int k) {
  const auto p = powers(lambda, k);
  CVector v(k + 1);
  for (int j = 0; j <= k; ++j) v(j) = p[j];
  return v;
}

// [lambda^k, ..., lambda, 1]
inline CVector power_vector_descending(Complex lambda, int k) {
  return power_vector_ascending(lambda, k).reverse();
}

inline CMatrix random_complex_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix A(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index k = 0; k < cols; ++k) {
      const double re = g(rng);
      const double im = g(rng);
      A(i, k) = Complex(re, im);
    }
  return A;
}

inline CVector random_complex_vector(Index n, std::mt19937_64& rng) {
  return random_complex_matrix(n, 1, rng).col(0);
}

// Random polynomial lying exactly in the class: coefficients below the middle
// are free, the upper half is their signed adjoint, and an even-degree middle
// coefficient is symmetrized with operations that are exact in floating point.
inline MatrixPolynomial random_structured(Index n, int m, const StructureClass& s,
                                          std::uint64_t seed) {
  require(n >= 1 && m >= 1, "random_structured: need n >= 1 and m >= 1");
  std::mt19937_64 rng(seed);
  std::vector<CMatrix> c(m + 1);
  for (int j = 0; 2 * j < m; ++j) {
    c[j] = random_complex_matrix(n, n, rng);
    c[m - j] = double(s.sign) * apply_adjoint(c[j], s.adjoint);
  }
  if (m % 2 == 0) {
    const CMatrix B = random_complex_matrix(n, n, rng);
    const CMatrix Bs = apply_adjoint(B, s.adjoint);
    c[m / 2] = s.sign > 0 ? CMatrix((B + Bs) / 2.0) : CMatrix(B - Bs);
  }
  return MatrixPolynomial(std::move(c));
}

inline MatrixPolynomial random_unstructured(Index n, int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<CMatrix> c(m + 1);
  for (auto& A : c) A = random_complex_matrix(n, n, rng);
  return MatrixPolynomial(std::move(c));
}

// ---------------------------------------------------------------------------
// Spectral pairing of det P(z).

struct PairingReport {
  std::vector<Complex> roots;       // finite roots of det P(z)
  std::vector<int> partner;         // index of the matched root, -1 if none, self for fixed points
  std::vector<bool> paired_with_infinity;
  int infinite_roots = 0;
  double max_mismatch = 0.0;        // worst relative distance between image and partner
  bool closed = false;
};

// Coefficients of det P(z), ascending, from samples at N = n*m + 1 points on
// the circle of radius 1.5 (an inverse DFT of the sampled determinants).
inline std::vector<Complex> determinant_coefficients(const MatrixPolynomial& P) {
  const int N = static_cast<int>(P.n()) * P.m() + 1;
  const double rho = 1.5;
  std::vector<Complex> d(N);
  for (int k = 0; k < N; ++k) {
    const Complex z = std::polar(rho, 2.0 * std::numbers::pi * k / N);
    d[k] = determinant(evaluate(P, z));
  }
  std::vector<Complex> c(N);
  for (int j = 0; j < N; ++j) {
    Complex s = 0.0;
    for (int k = 0; k < N; ++k) s += d[k] * std::polar(1.0, -2.0 * std::numbers::pi * j * k / N);
    c[j] = s / (double(N) * std::pow(rho, j));
  }
  return c;
}

inline PairingReport eigensymmetry_check(const MatrixPolynomial& P, const StructureClass& s,
                                         double match_tol = 1e-6) {
  require(P.n() * P.m() <= 16, "eigensymmetry_check: n*m must not exceed 16");
  auto c = determinant_coefficients(P);

  double cmax = 0.0;
  for (const auto& v : c) cmax = std::max(cmax, std::abs(v));
  double scale = 0.0;
  for (int j = 0; j <= P.m(); ++j) scale += P[j].norm() * std::pow(1.5, j);
  scale = std::pow(scale, static_cast<double>(P.n()));
  if (!(cmax > 1e-13 * scale)) throw ValidationError("eigensymmetry_check: polynomial is not regular");

  auto roots = scalar_poly_roots(c, 1e-12);
  if (!roots.converged) throw NumericalFailure("eigensymmetry_check: root finder did not converge");

  PairingReport rep;
  rep.roots = roots.roots;
  rep.infinite_roots = roots.infinite_roots;
  const std::size_t N = rep.roots.size();
  rep.partner.assign(N, -1);
  rep.paired_with_infinity.assign(N, false);

  bool ok = true;
  for (std::size_t i = 0; i < N; ++i) {
    if (std::abs(rep.roots[i]) < 1e-8) {
      rep.paired_with_infinity[i] = true;
      rep.partner[i] = static_cast<int>(i);
    }
  }
  for (std::size_t i = 0; i < N; ++i) {
    if (rep.partner[i] != -1) continue;
    const Complex z = rep.roots[i];
    const Complex image = s.adjoint == Adjoint::Transpose ? 1.0 / z : 1.0 / std::conj(z);
    const double tol = match_tol * std::max(1.0, std::abs(image));
    const double self = std::abs(image - z);
    if (self <= tol) {
      rep.partner[i] = static_cast<int>(i);
      rep.max_mismatch = std::max(rep.max_mismatch, self / std::max(1.0, std::abs(image)));
      continue;
    }
    int best = -1;
    double best_d = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      if (k == i || rep.partner[k] != -1) continue;
      const double dist = std::abs(rep.roots[k] - image);
      if (best < 0 || dist < best_d) {
        best = static_cast<int>(k);
        best_d = dist;
      }
    }
    if (best >= 0 && best_d <= tol) {
      rep.partner[i] = best;
      rep.partner[best] = static_cast<int>(i);
      rep.max_mismatch = std::max(rep.max_mismatch, best_d / std::max(1.0, std::abs(image)));
    } else {
      ok = false;
    }
  }
  rep.closed = ok;
  return rep;
}

}  // namespace palin
