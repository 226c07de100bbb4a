#pragma once
//
// Structured pencils L(z) = z X + Y in the ansatz space
//   L1(P) = { L : L(z) (Lambda_{m-1}(z) kron I) = v kron P(z) },
// with Lambda_{m-1}(z) = [z^{m-1}, ..., z, 1]^T, built so that Y = eps X^*.
// Also: backward-error ratios between a pencil and its polynomial, and the
// two linearization advisors.
//

#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "palin/backward_error.hpp"

namespace palin {

struct Pencil {
  CMatrix X;
  CMatrix Y;
  CVector v;
  StructureClass declared;

  Index size() const { return X.rows(); }
  CMatrix at(Complex z) const { return z * X + Y; }
  MatrixPolynomial as_polynomial() const { return MatrixPolynomial({Y, X}); }
};

// ---------------------------------------------------------------------------
// Ansatz vectors.

inline CMatrix flip(Index m) { return CMatrix::Identity(m, m).rowwise().reverse(); }

struct AnsatzCheck {
  std::string condition;  // "Rv=v", "Rv=-v", "Rv=conj(v)" or "Rv=-conj(v)"
  double residual = 0.0;
  bool admissible = false;
};

inline AnsatzCheck ansatz_admissible(const CVector& v0, const StructureClass& poly,
                                     const StructureClass& pencil, double tol = 1e-12) {
  if (poly.adjoint != pencil.adjoint)
    throw ValidationError("ansatz_admissible: polynomial and pencil must use the same adjoint");
  const CVector v = normalized(v0);
  const int sigma = poly.sign * pencil.sign;
  const bool T = poly.adjoint == Adjoint::Transpose;
  const CVector target = double(sigma) * (T ? CVector(v) : CVector(v.conjugate()));
  AnsatzCheck c;
  c.condition = std::string("Rv=") + (sigma > 0 ? "" : "-") + (T ? "v" : "conj(v)");
  c.residual = (v.reverse() - target).norm();
  c.admissible = c.residual <= tol;
  return c;
}

// Real default vectors: all ones for Rv = v, and (1,..,1,[0],-1,..,-1) for
// Rv = -v. Real vectors serve the H classes as well.
inline CVector default_ansatz(int m, int sigma) {
  require(m >= 1, "default_ansatz: degree must be at least 1");
  CVector v = CVector::Zero(m);
  if (sigma > 0) {
    v.setOnes();
  } else {
    require(m >= 2, "default_ansatz: no vector with Rv = -v exists for m = 1");
    for (int i = 0; i < m / 2; ++i) {
      v(i) = 1.0;
      v(m - 1 - i) = -1.0;
    }
  }
  return v / v.norm();
}

// ---------------------------------------------------------------------------
// Construction.

namespace detail {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Row of the real linear system over the entries of X. Every equation touches
// at most two unknowns: X(a, b) directly and X(b', a') through Y = eps X^*.
struct SparseRow {
  int u[2];
  double re_coef[2];
  double im_coef[2];
  int count = 0;
  Complex rhs;
};

}  // namespace detail

inline double identity_residual(const Pencil& L, const MatrixPolynomial& P, Complex z) {
  const int m = P.m();
  const Index n = P.n();
  const CVector lam = power_vector_descending(z, m - 1);
  CMatrix lhs = CMatrix::Zero(m * n, n);
  for (int k = 0; k < m; ++k) lhs += L.at(z).middleCols(k * n, n) * lam(k);
  const CMatrix Pz = evaluate(P, z);
  CMatrix rhs(m * n, n);
  for (int i = 0; i < m; ++i) rhs.middleRows(i * n, n) = L.v(i) * Pz;
  const double scale = (std::abs(z) * L.X.norm() + L.Y.norm()) * lam.norm() + L.v.norm() * Pz.norm();
  return (lhs - rhs).norm() / std::max(scale, 1e-300);
}

inline double structure_law_residual(const Pencil& L) {
  const CMatrix target = double(L.declared.sign) * apply_adjoint(L.X, L.declared.adjoint);
  return (L.Y - target).norm() / std::max(L.X.norm(), 1e-300);
}

// Sample points for the defining identity: 0, 1 and m further fixed points.
inline std::vector<Complex> identity_sample_points(int m) {
  std::vector<Complex> z{0.0, 1.0};
  for (int k = 0; k < m; ++k) z.push_back(std::polar(0.7 + 0.45 * k, 0.9 + 1.7 * k));
  return z;
}

struct PencilVerification {
  double identity = 0.0;   // worst relative identity residual over the sample points
  double structure = 0.0;  // ||Y - eps X^*|| / ||X||
};

inline PencilVerification verify_pencil(const Pencil& L, const MatrixPolynomial& P) {
  PencilVerification out;
  for (Complex z : identity_sample_points(P.m()))
    out.identity = std::max(out.identity, identity_residual(L, P, z));
  out.structure = structure_law_residual(L);
  return out;
}

// Minimum-norm X solving the block shifted-sum equations
//   X_1 = v kron A_m,  X_k + Y_{k-1} = v kron A_{m-k+1} (k = 2..m),  Y_m = v kron A_0
// with Y = eps X^*. Real and imaginary parts decouple and every equation links
// at most two entries, so the system splits into small independent components.
inline Pencil build_structured_pencil(const MatrixPolynomial& P, const StructureClass& poly,
                                      const CVector& v0, const StructureClass& pencil) {
  require_structured(P, poly, "build_structured_pencil");
  const auto check = ansatz_admissible(v0, poly, pencil);
  if (!check.admissible)
    throw ValidationError("build_structured_pencil: " + check.condition + " violated (residual " +
                          std::to_string(check.residual) + ")");
  const CVector v = normalized(v0);
  const int m = P.m();
  const Index n = P.n();
  const Index N = m * n;
  const bool T = pencil.adjoint == Adjoint::Transpose;
  const double e = pencil.sign;
  require(v.size() == m, "build_structured_pencil: ansatz length must equal the degree");

  auto id = [N](Index a, Index b) { return static_cast<int>(a * N + b); };
  std::vector<detail::SparseRow> rows;
  rows.reserve((m + 1) * N * n);
  // Block column k (0-based) of X and, if k >= 1, block column k-1 of Y.
  auto add = [&](Index a, Index c, int kx, int ky, Complex rhs) {
    detail::SparseRow row;
    row.rhs = rhs;
    if (kx >= 0) {
      row.u[row.count] = id(a, kx * n + c);
      row.re_coef[row.count] = 1.0;
      row.im_coef[row.count] = 1.0;
      ++row.count;
    }
    if (ky >= 0) {
      // Y(a, b) = e X(b, a) or e conj(X(b, a)).
      row.u[row.count] = id(ky * n + c, a);
      row.re_coef[row.count] = e;
      row.im_coef[row.count] = T ? e : -e;
      ++row.count;
    }
    rows.push_back(row);
  };
  for (int k = 0; k <= m; ++k) {
    const CMatrix& A = P[m - k];
    for (int i = 0; i < m; ++i)
      for (Index r = 0; r < n; ++r)
        for (Index c = 0; c < n; ++c)
          add(i * n + r, c, k < m ? k : -1, k >= 1 ? k - 1 : -1, v(i) * A(r, c));
  }

  const int U = static_cast<int>(N * N);
  detail::UnionFind uf(U);
  for (const auto& row : rows)
    if (row.count == 2) uf.unite(row.u[0], row.u[1]);

  std::vector<std::vector<int>> comp_rows(U), comp_vars(U);
  for (int u = 0; u < U; ++u) comp_vars[uf.find(u)].push_back(u);
  for (std::size_t k = 0; k < rows.size(); ++k) comp_rows[uf.find(rows[k].u[0])].push_back(int(k));

  RVector re = RVector::Zero(U), im = RVector::Zero(U);
  std::vector<int> local(U, -1);
  for (int root = 0; root < U; ++root) {
    if (comp_rows[root].empty()) continue;
    const auto& vars = comp_vars[root];
    for (std::size_t k = 0; k < vars.size(); ++k) local[vars[k]] = int(k);
    RMatrix Gr = RMatrix::Zero(comp_rows[root].size(), vars.size());
    RMatrix Gi = Gr;
    RVector br(comp_rows[root].size()), bi(comp_rows[root].size());
    for (std::size_t q = 0; q < comp_rows[root].size(); ++q) {
      const auto& row = rows[comp_rows[root][q]];
      for (int t = 0; t < row.count; ++t) {
        Gr(q, local[row.u[t]]) += row.re_coef[t];
        Gi(q, local[row.u[t]]) += row.im_coef[t];
      }
      br(q) = row.rhs.real();
      bi(q) = row.rhs.imag();
    }
    const RVector sr = pseudoinverse(Gr) * br;
    const RVector si = pseudoinverse(Gi) * bi;
    for (std::size_t k = 0; k < vars.size(); ++k) {
      re(vars[k]) = sr(k);
      im(vars[k]) = si(k);
    }
  }

  Pencil L;
  L.X = CMatrix(N, N);
  for (Index a = 0; a < N; ++a)
    for (Index b = 0; b < N; ++b) L.X(a, b) = Complex(re(id(a, b)), im(id(a, b)));
  L.Y = e * apply_adjoint(L.X, pencil.adjoint);
  L.v = v;
  L.declared = pencil;

  double worst = 0.0;
  for (const auto& row : rows) {
    Complex lhs = 0.0;
    for (int t = 0; t < row.count; ++t) {
      const Complex xv = L.X(row.u[t] / N, row.u[t] % N);
      lhs += t == 0 && row.re_coef[t] == 1.0 && row.count == 2
                 ? xv
                 : Complex(row.re_coef[t] * xv.real(), row.im_coef[t] * xv.imag());
    }
    worst = std::max(worst, std::abs(lhs - row.rhs));
  }
  if (worst > 1e-8 * poly_norm(P, Norm::Frobenius))
    throw InconsistencyError("build_structured_pencil: no structured pencil for this ansatz");

  const auto ver = verify_pencil(L, P);
  if (ver.identity > 1e-10 || ver.structure > 1e-10)
    throw NumericalFailure("build_structured_pencil: constructed pencil failed verification");
  return L;
}

// Lambda_{m-1} kron x, normalized.
inline CVector lifted_eigenvector(Complex lambda, const CVector& x, int m) {
  const CVector lam = power_vector_descending(lambda, m - 1);
  const CVector xu = normalized(x);
  CVector z(m * xu.size());
  for (int i = 0; i < m; ++i) z.segment(i * xu.size(), xu.size()) = lam(i) * xu;
  return z / z.norm();
}

// Residuals of
//   ||L(l) z|| = ||v|| ||P(l) x||,
//   |z^T L(l) z| = |Lambda^T v| |x^T P(l) x|,
//   |z^H L(l) z| = |Lambda^H v| |x^H P(l) x|,
// with z = Lambda_{m-1} kron x, each relative to (|l| ||X|| + ||Y||) ||z||^k.
struct RelationResiduals {
  double norm = 0.0;
  double transpose = 0.0;
  double conjugate = 0.0;
};

inline RelationResiduals relation_checks(const Pencil& L, const MatrixPolynomial& P,
                                         const CVector& v, Complex lambda, const CVector& x0) {
  const int m = P.m();
  const CVector x = normalized(x0);
  const CVector lam = power_vector_descending(lambda, m - 1);
  CVector z(m * x.size());
  for (int i = 0; i < m; ++i) z.segment(i * x.size(), x.size()) = lam(i) * x;
  const CMatrix Ll = L.at(lambda);
  const CMatrix Pl = evaluate(P, lambda);
  const CVector Lz = Ll * z;
  const CVector Px = Pl * x;
  const double zn = z.norm();
  // Rounding scale of the evaluations, not of their (possibly vanishing) values.
  double pscale = 0.0;
  for (int j = 0; j <= m; ++j) pscale += std::pow(std::abs(lambda), j) * P[j].norm();
  const double scale =
      std::max(std::abs(lambda) * L.X.norm() + L.Y.norm() + v.norm() * pscale, 1e-300);

  RelationResiduals out;
  out.norm = std::abs(Lz.norm() - v.norm() * Px.norm()) / (scale * zn);
  const Complex zt = z.transpose() * Lz;
  const Complex xt = x.transpose() * Px;
  const Complex lt = lam.transpose() * v;
  out.transpose = std::abs(std::abs(zt) - std::abs(lt) * std::abs(xt)) / (scale * zn * zn);
  const Complex zh = z.adjoint() * Lz;
  const Complex xh = x.adjoint() * Px;
  const Complex lh = lam.adjoint() * v;
  out.conjugate = std::abs(std::abs(zh) - std::abs(lh) * std::abs(xh)) / (scale * zn * zn);
  return out;
}

struct PencilEta {
  double eta_F = 0.0;
  double eta_2 = 0.0;
  double eta_unstructured = 0.0;
};

// Structured backward errors of (lambda, Lambda_{m-1} kron x) for the pencil
// seen as a degree-one polynomial of size mn.
inline PencilEta pencil_backward_error(const Pencil& L, Complex lambda, const CVector& x, int m,
                                       double branch_tol = kDefaultBranchTol) {
  const MatrixPolynomial Lp = L.as_polynomial();
  const CVector z = lifted_eigenvector(lambda, x, m);
  PencilEta out;
  out.eta_unstructured = eta_unstructured(Lp, lambda, z);
  if (L.declared.adjoint == Adjoint::Transpose) {
    out.eta_F = eta_structured_T(Lp, L.declared, lambda, z, Norm::Frobenius, branch_tol).eta;
    out.eta_2 = eta_structured_T(Lp, L.declared, lambda, z, Norm::Spectral, branch_tol).eta;
  } else {
    const auto h = eta_structured_H(Lp, L.declared, lambda, z, branch_tol);
    out.eta_F = h.eta_F;
    out.eta_2 = h.eta_2;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ratio reports.

struct BoundCheck {
  std::string name;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool applies = false;
  bool holds = true;
};

struct PencilRatio {
  StructureClass pencil;
  bool available = false;
  std::string unavailable_reason;
  CVector v;
  double ratio_F = 0.0;             // eta^S_F(L) / eta(P)
  double ratio_2 = 0.0;             // eta^S_2(L) / eta(P)
  double ratio_unstructured = 0.0;  // eta(L) / eta(P)
  double ratio_structured_F = 0.0;  // eta^S_F(L) / eta^S_F(P)
  double ratio_structured_2 = 0.0;  // eta^S_2(L) / eta^S_F(P)
  double lower_F = 0.0, upper_F = 0.0, lower_2 = 0.0, upper_2 = 0.0;
  std::string branch;
  std::vector<BoundCheck> checks;
  double ansatz_ratio = 0.0;  // |Lambda_{m-1}^* v| / ||Lambda_{m-1}||
  bool in_bounds = true;
};

struct RatioReport {
  double eta_P = 0.0;
  double eta_S_F_P = 0.0;
  double eta_S_2_P = 0.0;
  std::vector<PencilRatio> pencils;
  bool in_bounds = true;
};

inline double sandwich_lower(int m) { return std::sqrt((m + 1.0) / (2.0 * m)); }

namespace detail {

inline void add_check(PencilRatio& pr, std::string name, double value, double lo, double hi,
                      bool applies, double slack = 1e-10) {
  BoundCheck c{std::move(name), value, lo, hi, applies, true};
  if (applies) c.holds = value >= lo * (1.0 - slack) - slack && value <= hi * (1.0 + slack) + slack;
  if (!c.holds) pr.in_bounds = false;
  pr.checks.push_back(std::move(c));
}

}  // namespace detail

// Backward-error ratios for both structured pencils of P built from the
// default ansatz vectors, with every bound whose hypotheses hold asserted.
//
// T pencils (bounds attach to the pencil's own class):
//   palindromic pencil, re(l) >= 0:  F in [sqrt(1 - 2re(l)/|1+l|^2) sqrt((m+1)/m), sqrt(2)]
//   palindromic pencil, l != -1:     2 in [sqrt((m+1)/2m), sqrt(2) sqrt(1 + 1/|1+l|^2)]
//   anti pencil, re(l) <= 0:         F in [sqrt(1 + 2re(l)/|1-l|^2) sqrt((m+1)/m), sqrt(2)]
//   anti pencil, l != 1:             2 in [sqrt((m+1)/2m), sqrt(2) sqrt(1 + 1/|1-l|^2)]
//   and, under the same hypotheses, eta^S(L) / eta^S_F(P) <= sqrt(2).
// H pencils, |l| = 1: F and 2 ratios in [sqrt((m+1)/2m), sqrt(2)], and the
// structured ratios are at most sqrt(2).
// Always: eta(L)/eta(P) in [sqrt((m+1)/2m), 1] and eta^S(L)/eta(P) >= sqrt((m+1)/2m).
inline RatioReport ratio_report(const MatrixPolynomial& P, const StructureClass& poly,
                                Complex lambda, const CVector& x,
                                double branch_tol = kDefaultBranchTol) {
  const int m = P.m();
  RatioReport rep;
  const auto be = backward_error_report(P, poly, lambda, x, branch_tol);
  rep.eta_P = be.eta_unstructured;
  rep.eta_S_F_P = be.eta_structured_F;
  rep.eta_S_2_P = be.eta_structured_2;
  const double low = sandwich_lower(m);
  const bool T = poly.adjoint == Adjoint::Transpose;

  for (int ps : {1, -1}) {
    PencilRatio pr;
    pr.pencil = StructureClass{poly.adjoint, ps};
    const int sigma = poly.sign * ps;
    if (m == 1 && sigma < 0) {
      pr.unavailable_reason = "no ansatz vector with Rv = -v exists for m = 1";
      rep.pencils.push_back(std::move(pr));
      continue;
    }
    pr.v = default_ansatz(m, sigma);
    const Pencil L = build_structured_pencil(P, poly, pr.v, pr.pencil);
    const PencilEta pe = pencil_backward_error(L, lambda, x, m, branch_tol);
    pr.available = true;
    const double eP = rep.eta_P;
    pr.ratio_F = eP > 0 ? pe.eta_F / eP : 0.0;
    pr.ratio_2 = eP > 0 ? pe.eta_2 / eP : 0.0;
    pr.ratio_unstructured = eP > 0 ? pe.eta_unstructured / eP : 0.0;
    pr.ratio_structured_F = rep.eta_S_F_P > 0 ? pe.eta_F / rep.eta_S_F_P : 0.0;
    pr.ratio_structured_2 = rep.eta_S_F_P > 0 ? pe.eta_2 / rep.eta_S_F_P : 0.0;
    const CVector lam = power_vector_descending(lambda, m - 1);
    pr.ansatz_ratio = std::abs(T ? Complex(lam.transpose() * pr.v) : Complex(lam.adjoint() * pr.v)) /
                      lam.norm();

    const bool nonzero = eP > 1e-13 * poly_norm(P, Norm::Frobenius);
    detail::add_check(pr, "unstructured sandwich", pr.ratio_unstructured, low, 1.0, nonzero);
    detail::add_check(pr, "structured lower bound F", pr.ratio_F, low, INFINITY, nonzero);
    detail::add_check(pr, "structured lower bound 2", pr.ratio_2, low, INFINITY, nonzero);

    pr.lower_F = pr.lower_2 = low;
    pr.upper_F = pr.upper_2 = INFINITY;
    const double re = lambda.real();
    if (T) {
      const bool pal = ps > 0;
      const Complex shift = pal ? 1.0 + lambda : 1.0 - lambda;
      const double s2 = std::norm(shift);
      const bool f_applies = pal ? re >= 0.0 : re <= 0.0;
      const bool two_applies = std::abs(lambda - (pal ? -1.0 : 1.0)) > branch_tol;
      pr.branch = std::string(pal ? "T-palindromic pencil" : "T-anti-palindromic pencil") +
                  (f_applies ? "" : ", F bounds out of domain") +
                  (two_applies ? "" : ", 2-norm bounds out of domain");
      if (f_applies) {
        const double inner = pal ? 1.0 - 2.0 * re / s2 : 1.0 + 2.0 * re / s2;
        pr.lower_F = std::sqrt(std::max(inner, 0.0)) * std::sqrt((m + 1.0) / m);
        pr.upper_F = std::sqrt(2.0);
      }
      if (two_applies) pr.upper_2 = std::sqrt(2.0) * std::sqrt(1.0 + 1.0 / s2);
      detail::add_check(pr, "F ratio bounds", pr.ratio_F, pr.lower_F, pr.upper_F,
                        nonzero && f_applies);
      detail::add_check(pr, "2 ratio bounds", pr.ratio_2, low, pr.upper_2, nonzero && two_applies);
      const bool s_nonzero = rep.eta_S_F_P > 1e-13 * poly_norm(P, Norm::Frobenius);
      detail::add_check(pr, "structured F ratio", pr.ratio_structured_F, 0.0, std::sqrt(2.0),
                        s_nonzero && f_applies);
      detail::add_check(pr, "structured 2 ratio", pr.ratio_structured_2, 0.0, std::sqrt(2.0),
                        s_nonzero && two_applies);
    } else {
      const bool circle = std::abs(std::abs(lambda) - 1.0) <= branch_tol;
      pr.branch = std::string(ps > 0 ? "H-palindromic pencil" : "H-anti-palindromic pencil") +
                  (circle ? ", |lambda|=1" : ", |lambda|!=1, bounds out of domain");
      if (circle) {
        pr.upper_F = pr.upper_2 = std::sqrt(2.0);
      }
      detail::add_check(pr, "F ratio bounds", pr.ratio_F, low, std::sqrt(2.0), nonzero && circle);
      detail::add_check(pr, "2 ratio bounds", pr.ratio_2, low, std::sqrt(2.0), nonzero && circle);
      const bool s_nonzero = rep.eta_S_F_P > 1e-13 * poly_norm(P, Norm::Frobenius);
      detail::add_check(pr, "structured F ratio", pr.ratio_structured_F, 0.0, std::sqrt(2.0),
                        s_nonzero && circle);
    }
    if (!pr.in_bounds) rep.in_bounds = false;
    rep.pencils.push_back(std::move(pr));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Advisors.

enum class Advice { Palindromic, AntiPalindromic, Either };

inline std::string to_string(Advice a) {
  switch (a) {
    case Advice::Palindromic: return "palindromic";
    case Advice::AntiPalindromic: return "anti-palindromic";
    default: return "either";
  }
}

// re(lambda) >= 0 favours the palindromic pencil; the tie goes to palindromic.
inline Advice advise_T(Complex lambda) {
  return lambda.real() >= 0.0 ? Advice::Palindromic : Advice::AntiPalindromic;
}

struct HAdvice {
  Advice advice = Advice::Either;
  double rhat_p = 0.0;
  double rhat_ap = 0.0;
};

// Off the unit circle, compare the 2-vectors
//   rhat_p  = [[1 + re l, im l], [im l, 1 - re l]]^+ vec(q)
//   rhat_ap = [[1 - re l, -im l], [-im l, 1 + re l]]^+ vec(q)
// with q = (Lambda_{m-1}^H v)(x^H P(l) x), and pick the smaller.
inline HAdvice advise_H(const MatrixPolynomial& P, Complex lambda, const CVector& x0,
                        const CVector& v0, double branch_tol = kDefaultBranchTol) {
  HAdvice out;
  if (std::abs(std::abs(lambda) - 1.0) <= branch_tol) return out;
  const CVector x = normalized(x0);
  const CVector v = normalized(v0);
  require(v.size() == P.m(), "advise_H: ansatz length must equal the degree");
  const CVector lam = power_vector_descending(lambda, P.m() - 1);
  const Complex q = Complex(lam.adjoint() * v) * Complex(x.adjoint() * evaluate(P, lambda) * x);
  RMatrix Hp(2, 2), Hap(2, 2);
  Hp << 1.0 + lambda.real(), lambda.imag(), lambda.imag(), 1.0 - lambda.real();
  Hap << 1.0 - lambda.real(), -lambda.imag(), -lambda.imag(), 1.0 + lambda.real();
  out.rhat_p = (pseudoinverse(Hp) * vec(q)).norm();
  out.rhat_ap = (pseudoinverse(Hap) * vec(q)).norm();
  const double scale = std::max(out.rhat_p, out.rhat_ap);
  if (scale == 0.0) return out;
  out.advice = out.rhat_p <= out.rhat_ap ? Advice::Palindromic : Advice::AntiPalindromic;
  return out;
}

}  // namespace palin
