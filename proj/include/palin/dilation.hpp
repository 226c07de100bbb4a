#pragma once
//
// Norm-preserving completion of a 2 x 2 block matrix [[A, C], [B, D]]:
// given A, B, C, every D with ||[[A, C], [B, D]]||_2 = mu, where
// mu = max(||[A; B]||_2, ||[A C]||_2), has the form
//
//   D = -K A^H L + mu (I - K K^H)^{1/2} Z (I - L^H L)^{1/2},  ||Z||_2 <= 1,
//   K^H = (mu^2 I - A^H A)^{-1/2} B^H,   L = (mu^2 I - A A^H)^{-1/2} C.
//
// Inverse square roots are pseudo-inverse square roots: directions where
// mu^2 equals a squared singular value of A are dropped.
//

#include "palin/numerics.hpp"

namespace palin {

namespace detail {

// f applied to the eigenvalues of a Hermitian matrix.
template <class F>
CMatrix hermitian_function(const CMatrix& H, F f) {
  if (H.size() == 0) return H;
  const CMatrix Hs = (H + H.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(Hs);
  RVector d = es.eigenvalues();
  for (Index k = 0; k < d.size(); ++k) d(k) = f(d(k));
  return es.eigenvectors() * d.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

inline CMatrix psd_sqrt(const CMatrix& H) {
  return hermitian_function(H, [](double e) { return e > 0.0 ? std::sqrt(e) : 0.0; });
}

inline CMatrix pinv_sqrt(const CMatrix& H, double cutoff) {
  return hermitian_function(H, [cutoff](double e) { return e > cutoff ? 1.0 / std::sqrt(e) : 0.0; });
}

}  // namespace detail

struct DkwBlocks {
  CMatrix A, B, C, D, K, L, Z;
  double mu = 0.0;

  CMatrix completion() const {
    CMatrix M(A.rows() + B.rows(), A.cols() + C.cols());
    M << A, C, B, D;
    return M;
  }
};

// Z may be empty, meaning the zero contraction.
inline DkwBlocks dkw_complete(const CMatrix& A, const CMatrix& B, const CMatrix& C,
                              const CMatrix& Z = CMatrix()) {
  const Index p = A.rows(), q = A.cols(), s = B.rows(), t = C.cols();
  require(p >= 1 && q >= 1, "dkw_complete: A must be nonempty");
  require(B.cols() == q && C.rows() == p, "dkw_complete: blocks are not conformal");
  require_finite(A, "dkw_complete");
  require_finite(B, "dkw_complete");
  require_finite(C, "dkw_complete");

  DkwBlocks out;
  out.A = A;
  out.B = B;
  out.C = C;
  out.Z = Z.size() == 0 ? CMatrix::Zero(s, t) : Z;
  require(out.Z.rows() == s && out.Z.cols() == t, "dkw_complete: Z has the wrong shape");
  if (s > 0 && t > 0 && out.Z.size() > 0) {
    require_finite(out.Z, "dkw_complete");
    if (spectral_norm(out.Z) > 1.0 + 1e-12) throw ValidationError("dkw_complete: Z is not a contraction");
  }

  if (p == 1 && q == 1) {
    // Scalar corner: mu^2 - |a|^2 = max(||B||^2, ||C||^2) exactly, so the
    // subtraction is avoided.
    const double a2 = std::norm(A(0, 0));
    const double gap = std::max(B.squaredNorm(), C.squaredNorm());
    out.mu = std::sqrt(a2 + gap);
    const double g = gap > 0.0 ? 1.0 / std::sqrt(gap) : 0.0;
    out.K = B * g;
    out.L = C * g;
  } else {
    CMatrix AB(p + s, q);
    AB << A, B;
    CMatrix AC(p, q + t);
    AC << A, C;
    out.mu = std::max(spectral_norm(AB), spectral_norm(AC));
    const double mu2 = out.mu * out.mu;
    const double cutoff = 1e-12 * std::max(mu2, 1e-300);
    const CMatrix Rq = detail::pinv_sqrt(mu2 * CMatrix::Identity(q, q) - A.adjoint() * A, cutoff);
    const CMatrix Rp = detail::pinv_sqrt(mu2 * CMatrix::Identity(p, p) - A * A.adjoint(), cutoff);
    out.K = s > 0 ? CMatrix(B * Rq) : CMatrix(0, q);
    out.L = t > 0 ? CMatrix(Rp * C) : CMatrix(p, 0);
  }

  out.D = CMatrix::Zero(s, t);
  if (s > 0 && t > 0) {
    out.D = -out.K * A.adjoint() * out.L;
    if (out.Z.norm() > 0.0) {
      const CMatrix left = detail::psd_sqrt(CMatrix::Identity(s, s) - out.K * out.K.adjoint());
      const CMatrix right = detail::psd_sqrt(CMatrix::Identity(t, t) - out.L.adjoint() * out.L);
      out.D += out.mu * left * out.Z * right;
    }
  }
  return out;
}

}  // namespace palin
