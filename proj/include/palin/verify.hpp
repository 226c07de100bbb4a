#pragma once
//
// Seeded property suite shared by the acceptance binary and `palin verify`.
// Each criterion returns one result with the worst observed discrepancy and,
// on failure, the first offending instance serialized for replay.
//

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "palin/dilation.hpp"
#include "palin/io.hpp"
#include "palin/linearization.hpp"
#include "palin/oracle.hpp"
#include "palin/perturbations.hpp"

namespace palin::verify {

using io::json;

struct Options {
  std::uint64_t seed = 20240601;
  int instances = 240;
  // Multiplies the closed-form eta before the oracle comparison. Anything but
  // 1 is a deliberate fault used to check that the suite can fail.
  double formula_scale = 1.0;
};

struct Result {
  int id = 0;
  std::string name;
  bool passed = true;
  long checked = 0;
  double worst = 0.0;  // worst relative discrepancy (meaning depends on the criterion)
  std::string detail;
  json failure;  // null when passed
  double seconds = 0.0;
};

// ---------------------------------------------------------------------------
// Suite instances.

enum class Regime { PlusOne, MinusOne, UnitCircle, Inside, Outside };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::PlusOne: return "lambda=1";
    case Regime::MinusOne: return "lambda=-1";
    case Regime::UnitCircle: return "|lambda|=1";
    case Regime::Inside: return "|lambda|<1";
    default: return "|lambda|>1";
  }
}

struct Instance {
  int index = 0;
  StructureClass cls;
  Regime regime = Regime::PlusOne;
  Complex lambda;
  MatrixPolynomial P = MatrixPolynomial::zero(1, 1);
  CVector x;
};

// Instance k: n = 1 + k % 6, m = 1 + (k / 6) % 5, class (k / 30) % 4 and a
// lambda regime that rotates through all five branches within every class.
inline Instance make_instance(std::uint64_t seed, int k) {
  Instance in;
  in.index = k;
  const Index n = 1 + k % 6;
  const int m = 1 + (k / 6) % 5;
  in.cls = kAllClasses[(k / 30) % 4];
  in.regime = static_cast<Regime>((k + k / 30) % 5);
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(k));
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  switch (in.regime) {
    case Regime::PlusOne: in.lambda = 1.0; break;
    case Regime::MinusOne: in.lambda = -1.0; break;
    case Regime::UnitCircle: in.lambda = std::polar(1.0, angle(rng)); break;
    case Regime::Inside:
      in.lambda = std::polar(std::uniform_real_distribution<double>(0.2, 0.9)(rng), angle(rng));
      break;
    case Regime::Outside:
      in.lambda = std::polar(std::uniform_real_distribution<double>(1.2, 3.0)(rng), angle(rng));
      break;
  }
  in.P = random_structured(n, m, in.cls, rng());
  in.x = normalized(random_complex_vector(n, rng));
  return in;
}

inline json describe(const Instance& in) {
  json j = io::polynomial_json(in.P, in.cls);
  j["instance"] = in.index;
  j["regime"] = to_string(in.regime);
  j["lambda"] = io::to_json(in.lambda);
  j["x"] = io::vector_json(in.x);
  return j;
}

inline std::vector<Instance> suite(const Options& opt) {
  std::vector<Instance> out;
  out.reserve(opt.instances);
  for (int k = 0; k < opt.instances; ++k) out.push_back(make_instance(opt.seed, k));
  return out;
}

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

inline double rel(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

// Records a check and keeps the first failure.
struct Tracker {
  Result& res;
  // Only tracked checks feed the reported worst value.
  void check(bool ok, double value, const std::function<json()>& dump, const std::string& what,
             bool tracked = true) {
    ++res.checked;
    if (tracked && std::isfinite(value)) res.worst = std::max(res.worst, value);
    if (ok) return;
    if (res.passed) {
      res.failure = dump();
      res.failure["check"] = what;
      res.failure["value"] = value;
    }
    res.passed = false;
  }
  void error(const std::exception& e, const std::function<json()>& dump) {
    ++res.checked;
    if (res.passed) {
      res.failure = dump();
      res.failure["error"] = e.what();
    }
    res.passed = false;
  }
};

template <class F>
Result timed(int id, std::string name, F body) {
  Result res;
  res.id = id;
  res.name = std::move(name);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(res);
  } catch (const std::exception& e) {
    res.passed = false;
    res.detail = std::string("aborted: ") + e.what();
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Criteria.

// 1. Closed-form structured Frobenius backward error against the oracle.
inline Result oracle_equivalence(const std::vector<Instance>& S, const Options& opt) {
  return detail::timed(1, "oracle equivalence (Frobenius)", [&](Result& res) {
    detail::Tracker tr{res};
    for (const auto& in : S) {
      auto dump = [&] { return describe(in); };
      try {
        const double eta = backward_error_report(in.P, in.cls, in.lambda, in.x).eta_structured_F *
                           opt.formula_scale;
        const double ref = frobenius_oracle(in.P, in.cls, in.lambda, in.x).eta;
        const double floor = 1e-14 * poly_norm(in.P, Norm::Frobenius);
        const double err = std::abs(eta - ref) / std::max(ref, 1e-8 * poly_norm(in.P, Norm::Frobenius));
        tr.check(std::abs(eta - ref) <= 1e-8 * ref + floor, err, dump, "eta_F vs oracle");
      } catch (const std::exception& e) {
        tr.error(e, dump);
      }
    }
    res.detail = "worst relative mismatch " + detail::sci(res.worst);
  });
}

// 2. Certificates of the constructed minimal perturbations.
inline Result certificates(const std::vector<Instance>& S) {
  return detail::timed(2, "minimizer certificates", [&](Result& res) {
    detail::Tracker tr{res};
    for (const auto& in : S) {
      auto dump = [&] { return describe(in); };
      try {
        const auto be = backward_error_report(in.P, in.cls, in.lambda, in.x);
        const double scale = (1.0 + poly_norm(in.P, Norm::Frobenius)) *
                             power_vector_ascending(in.lambda, in.P.m()).norm();
        for (Norm norm : {Norm::Frobenius, Norm::Spectral}) {
          const auto p = minimal_perturbation(in.P, in.cls, in.lambda, in.x, norm);
          const double eta = norm == Norm::Frobenius ? be.eta_structured_F : be.eta_structured_2;
          const std::string tag = " (" + to_string(norm) + ")";
          tr.check(p.constraint_residual <= 1e-10 * scale, p.constraint_residual / scale, dump,
                   "constraint residual" + tag, false);
          tr.check(p.structure_residual <= 1e-12 * std::max(1.0, p.certified_norm),
                   p.structure_residual, dump, "structure residual" + tag, false);
          // Below the rounding level of r both numbers are noise.
          const double noise = 16.0 * kEps * scale;
          const double diff = std::abs(p.certified_norm - eta);
          tr.check(diff <= 1e-12 * eta + noise, eta > 1e6 * noise ? diff / eta : 0.0, dump,
                   "certified norm vs eta" + tag);
        }
      } catch (const std::exception& e) {
        tr.error(e, dump);
      }
    }
    res.detail = "worst relative norm mismatch " + detail::sci(res.worst);
  });
}

// 3. The Frobenius minimizer is the oracle's; a nonzero contraction gives a
// different spectral minimizer with the same norm.
inline Result uniqueness(const std::vector<Instance>& S, std::uint64_t seed) {
  return detail::timed(3, "Frobenius uniqueness / spectral non-uniqueness", [&](Result& res) {
    detail::Tracker tr{res};
    long distinct = 0;
    std::mt19937_64 rng(seed ^ 0xD1CE);
    for (const auto& in : S) {
      auto dump = [&] { return describe(in); };
      try {
        const auto mine = minimal_perturbation(in.P, in.cls, in.lambda, in.x, Norm::Frobenius);
        const auto ref = frobenius_oracle(in.P, in.cls, in.lambda, in.x);
        double diff = 0.0;
        for (int j = 0; j <= in.P.m(); ++j)
          diff = std::max(diff, (mine.delta[j] - ref.delta[j]).cwiseAbs().maxCoeff());
        const double tol = 1e-8 * std::max(1.0, mine.certified_norm);
        tr.check(diff <= tol, diff, dump, "entrywise Frobenius minimizer vs oracle");

        const Index n = in.P.n();
        if (n < 3 || in.P.m() < 2) continue;
        const auto base = minimal_perturbation(in.P, in.cls, in.lambda, in.x, Norm::Spectral);
        CMatrix Z = random_complex_matrix(n - 1, n - 1, rng);
        Z *= 0.5 / spectral_norm(Z);
        const auto alt =
            minimal_perturbation(in.P, in.cls, in.lambda, in.x, Norm::Spectral, kDefaultBranchTol, {Z});
        const double gap = poly_norm(alt.delta - base.delta, Norm::Frobenius);
        // No correction is possible when the residual is parallel to conj(x) or x.
        if (gap <= 1e-8 * std::max(base.certified_norm, 1e-300)) continue;
        ++distinct;
        const double d = detail::rel(alt.certified_norm, base.certified_norm);
        tr.check(d <= 1e-10, d, dump, "2-norm of the Z != 0 minimizer");
        tr.check(alt.constraint_residual <= 1e-10 * (1.0 + poly_norm(in.P, Norm::Frobenius)) *
                                                power_vector_ascending(in.lambda, in.P.m()).norm(),
                 alt.constraint_residual, dump, "constraint residual of the Z != 0 minimizer");
      } catch (const std::exception& e) {
        tr.error(e, dump);
      }
    }
    if (distinct == 0) {
      res.passed = false;
      res.detail = "no instance produced a distinct spectral minimizer";
      return;
    }
    res.detail = std::to_string(distinct) + " distinct spectral minimizers; worst mismatch " +
                 detail::sci(res.worst);
  });
}

// 4. eta <= eta^S_2 <= eta^S_F.
inline Result ordering(const std::vector<Instance>& S) {
  return detail::timed(4, "ordering inequalities", [&](Result& res) {
    detail::Tracker tr{res};
    for (const auto& in : S) {
      auto dump = [&] { return describe(in); };
      try {
        const auto be = backward_error_report(in.P, in.cls, in.lambda, in.x);
        const double slack = 1e-12 * be.eta_structured_F;
        const double v1 = be.eta_unstructured - be.eta_structured_2;
        const double v2 = be.eta_structured_2 - be.eta_structured_F;
        tr.check(v1 <= slack, v1, dump, "eta <= eta_S_2");
        tr.check(be.eta_unstructured <= be.eta_structured_F + slack,
                 be.eta_unstructured - be.eta_structured_F, dump, "eta <= eta_S_F");
        tr.check(v2 <= slack, v2, dump, "eta_S_2 <= eta_S_F");
      } catch (const std::exception& e) {
        tr.error(e, dump);
      }
    }
    res.detail = "largest violation margin " + detail::sci(res.worst);
  });
}

// 5. Identities between the projections and the half power sums, evaluated
// from their definitions on both sides.
inline Result projection_identities(std::uint64_t seed, int count = 1000) {
  return detail::timed(5, "projection identities", [&](Result& res) {
    std::mt19937_64 rng(seed ^ 0x5EED5);
    std::uniform_real_distribution<double> mag(0.1, 3.0), angle(0.0, 2.0 * M_PI);
    std::uniform_int_distribution<int> deg(1, 8);
    detail::Tracker tr{res};
    for (int k = 0; k < count; ++k) {
      const Complex lam = std::polar(mag(rng), angle(rng));
      const int m = deg(rng);
      auto dump = [&] { return json{{"lambda", io::to_json(lam)}, {"m", m}}; };
      const auto pr = projections(lam, m);
      const auto hs = half_power_sums(lam, m);
      const auto p = powers(lam, m);
      const double L2 = power_vector_ascending(lam, m).squaredNorm();
      const double pp = pr.pi_plus.squaredNorm(), pm = pr.pi_minus.squaredNorm();
      double cross = 0.0;
      for (int j = 0; 2 * j < m; ++j) cross += 2.0 * (std::conj(p[j]) * p[m - j]).real();
      const double mid = m % 2 == 0 ? std::norm(p[m / 2]) : 0.0;
      const double sum_plus = (pr.pi_plus + pr.pi_minus).squaredNorm();
      const double sum_minus = (pr.pi_plus - pr.pi_minus).squaredNorm();
      tr.check(detail::rel(pp + pm, L2) <= 1e-12, detail::rel(pp + pm, L2), dump, "sum of squares");
      const double d2 = std::abs((pp - pm) - (cross + mid)) / L2;
      tr.check(d2 <= 1e-12, d2, dump, "difference of squares");
      const double d3 = detail::rel(hs.hi, (sum_plus + mid) / 2.0);
      tr.check(d3 <= 1e-12, d3, dump, "upper half power sum");
      const double d4 = detail::rel(hs.lo, (sum_minus + mid) / 2.0);
      tr.check(d4 <= 1e-12, d4, dump, "lower half power sum");
    }
    res.detail = "worst relative error " + detail::sci(res.worst);
  });
}

// 6. H-palindromic eigenpairs on the unit circle.
inline Result h_unit_circle(std::uint64_t seed, int count = 50) {
  return detail::timed(6, "H case on the unit circle", [&](Result& res) {
    std::mt19937_64 rng(seed ^ 0x0C1C);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    detail::Tracker tr{res};
    for (int k = 0; k < count; ++k) {
      const Index n = 1 + k % 4;
      const int m = 1 + (k / 4) % 5;
      const auto P = random_structured(n, m, kHPal, rng());
      const CVector x = normalized(random_complex_vector(n, rng));
      const Complex lam = std::polar(1.0, angle(rng));
      auto dump = [&] {
        json j = io::polynomial_json(P, kHPal);
        j["lambda"] = io::to_json(lam);
        j["x"] = io::vector_json(x);
        return j;
      };
      try {
        const auto be = backward_error_report(P, kHPal, lam, x);
        const double d = detail::rel(be.eta_structured_2, be.eta_unstructured);
        tr.check(d <= 1e-12, d, dump, "eta_S_2 == eta");
        const double q = be.eta_structured_F / be.eta_unstructured;
        tr.check(q >= 1.0 - 1e-12 && q <= std::sqrt(2.0) * (1.0 + 1e-12), q, dump,
                 "eta_S_F / eta in [1, sqrt 2]", false);
      } catch (const std::exception& e) {
        tr.error(e, dump);
      }
    }
    res.detail = "worst |eta_S_2 - eta| relative " + detail::sci(res.worst);
  });
}

// ||Lambda_m|| / (||Lambda_{m-1}|| ||(lambda, 1)||).
inline double power_ratio(Complex lam, int m) {
  return power_vector_ascending(lam, m).norm() /
         (power_vector_ascending(lam, m - 1).norm() * std::sqrt(std::norm(lam) + 1.0));
}

// 7. Pencil identities on every constructed pencil, plus the power ratio bound.
inline Result linearization_identities(const std::vector<Instance>& S, std::uint64_t seed,
                                       int count = 1000) {
  return detail::timed(7, "linearization identities", [&](Result& res) {
    detail::Tracker tr{res};
    long pencils = 0;
    for (const auto& in : S) {
      auto dump = [&] { return describe(in); };
      const int m = in.P.m();
      for (int ps : {1, -1}) {
        const StructureClass pc{in.cls.adjoint, ps};
        const int sigma = in.cls.sign * ps;
        if (m == 1 && sigma < 0) continue;
        try {
          const CVector v = default_ansatz(m, sigma);
          const Pencil L = build_structured_pencil(in.P, in.cls, v, pc);
          ++pencils;
          const auto ver = verify_pencil(L, in.P);
          tr.check(ver.identity <= 1e-10, ver.identity, dump, "defining identity, " + to_string(pc));
          tr.check(ver.structure <= 1e-10, ver.structure, dump, "pencil structure, " + to_string(pc));
          const auto rel = relation_checks(L, in.P, v, in.lambda, in.x);
          tr.check(rel.norm <= 1e-10, rel.norm, dump, "residual norm relation");
          tr.check(rel.transpose <= 1e-10, rel.transpose, dump, "transpose form relation");
          tr.check(rel.conjugate <= 1e-10, rel.conjugate, dump, "conjugate form relation");
        } catch (const std::exception& e) {
          tr.error(e, dump);
        }
      }
    }
    std::mt19937_64 rng(seed ^ 0x16);
    std::uniform_real_distribution<double> mag(0.0, 4.0), angle(0.0, 2.0 * M_PI);
    std::uniform_int_distribution<int> deg(1, 8);
    for (int k = 0; k < count; ++k) {
      const Complex lam = std::polar(mag(rng), angle(rng));
      const int m = deg(rng);
      const double q = power_ratio(lam, m);
      const double lo = std::sqrt((m + 1.0) / (2.0 * m));
      const double viol = std::max(lo - q, q - 1.0);
      tr.check(viol <= 1e-12, std::max(viol, 0.0),
               [&] { return json{{"lambda", io::to_json(lam)}, {"m", m}}; }, "power ratio bounds");
    }
    res.detail = std::to_string(pencils) + " pencils; worst residual " + detail::sci(res.worst);
  });
}

// 8. Ratio reports inside the stated intervals wherever their hypotheses hold.
inline Result ratio_bounds(const std::vector<Instance>& S) {
  return detail::timed(8, "pencil ratio bounds", [&](Result& res) {
    detail::Tracker tr{res};
    long applied = 0;
    std::map<std::string, int> violations;
    for (const auto& in : S) {
      auto dump = [&] { return describe(in); };
      try {
        const auto rep = ratio_report(in.P, in.cls, in.lambda, in.x);
        for (const auto& p : rep.pencils)
          for (const auto& c : p.checks) {
            if (!c.applies) continue;
            ++applied;
            const double excess = std::max(c.lower - c.value, c.value - c.upper);
            tr.check(c.holds, std::max(excess, 0.0),
                     [&] {
                       json j = dump();
                       j["report"] = io::to_json(rep);
                       return j;
                     },
                     to_string(p.pencil) + ": " + c.name);
            if (!c.holds) ++violations[to_string(p.pencil) + " " + c.name];
          }
      } catch (const std::exception& e) {
        tr.error(e, dump);
      }
    }
    res.detail = std::to_string(applied) + " bound checks";
    for (const auto& [name, count] : violations)
      res.detail += "; " + std::to_string(count) + (count == 1 ? " violation of " : " violations of ") + name;
  });
}

// 9. Spectra of structured polynomials are closed under the class pairing.
inline Result eigensymmetry(std::uint64_t seed, int count = 50) {
  return detail::timed(9, "eigenvalue pairing", [&](Result& res) {
    detail::Tracker tr{res};
    for (int k = 0; k < count; ++k) {
      const Index n = 1 + k % 3;
      const int m = 1 + (k / 3) % 3;
      const auto cls = kAllClasses[k % 4];
      const auto P = random_structured(n, m, cls, seed * 7919 + k);
      auto dump = [&] { return io::polynomial_json(P, cls); };
      try {
        const auto rep = eigensymmetry_check(P, cls, 1e-6);
        tr.check(rep.closed, rep.max_mismatch, dump, "spectrum closed under pairing");
      } catch (const std::exception& e) {
        tr.error(e, dump);
      }
    }
    res.detail = "worst pairing mismatch " + detail::sci(res.worst);
  });
}

// 10. Grid search cannot beat the closed-form completion norm.
inline Result dkw_audit(std::uint64_t seed, int count = 25) {
  return detail::timed(10, "completion optimality audit", [&](Result& res) {
    detail::Tracker tr{res};
    std::mt19937_64 rng(seed ^ 0xD4);
    for (int k = 0; k < count; ++k) {
      CMatrix A = random_complex_matrix(1, 1, rng), B = random_complex_matrix(1, 1, rng),
              C = random_complex_matrix(1, 1, rng);
      const double mu0 = dkw_complete(A, B, C).mu;
      A /= mu0;
      B /= mu0;
      C /= mu0;
      const auto blocks = dkw_complete(A, B, C);
      auto dump = [&] {
        return json{{"a", io::to_json(A(0, 0))}, {"b", io::to_json(B(0, 0))}, {"c", io::to_json(C(0, 0))}};
      };
      const double achieved = spectral_norm(blocks.completion());
      tr.check(achieved <= blocks.mu * (1.0 + 1e-12), achieved - blocks.mu, dump,
               "closed-form completion attains mu");
      const auto grid = dkw_grid_oracle(A(0, 0), B(0, 0), C(0, 0), 1e-3, 1.05 * blocks.mu);
      tr.check(grid.min_norm >= blocks.mu - 2e-3, blocks.mu - grid.min_norm, dump,
               "grid minimum not below mu");
    }
    res.detail = "largest (mu - grid minimum) " + detail::sci(res.worst);
  });
}

// 11. The two hand-computed examples.
inline Result scalar_ground_truths() {
  return detail::timed(11, "scalar ground truths", [&](Result& res) {
    detail::Tracker tr{res};
    {
      const MatrixPolynomial P({CMatrix::Ones(1, 1), CMatrix::Ones(1, 1)});
      const CVector x = CVector::Ones(1);
      const auto be = backward_error_report(P, kTPal, 2.0, x);
      auto dump = [&] { return io::polynomial_json(P, kTPal); };
      const double dF = detail::rel(be.eta_structured_F, std::sqrt(2.0));
      const double d2 = detail::rel(be.eta_structured_2, std::sqrt(2.0));
      tr.check(dF <= 1e-12, dF, dump, "T-palindromic scalar, F");
      tr.check(d2 <= 1e-12, d2, dump, "T-palindromic scalar, 2");
    }
    {
      CMatrix A0(2, 2);
      A0 << 1.0, 1.0, 0.0, 1.0;
      const MatrixPolynomial P({A0, A0.adjoint()});
      CVector x = CVector::Zero(2);
      x(0) = 1.0;
      const auto be = backward_error_report(P, kHPal, kI, x);
      auto dump = [&] { return io::polynomial_json(P, kHPal); };
      const double dF = detail::rel(be.eta_structured_F, std::sqrt(2.0));
      const double d2 = detail::rel(be.eta_structured_2, std::sqrt(1.5));
      tr.check(dF <= 1e-12, dF, dump, "H-palindromic 2 x 2, F");
      tr.check(d2 <= 1e-12, d2, dump, "H-palindromic 2 x 2, 2");
    }
    res.detail = "worst relative error " + detail::sci(res.worst);
  });
}

inline std::vector<Result> run_all(const Options& opt) {
  const auto S = suite(opt);
  return {oracle_equivalence(S, opt),
          certificates(S),
          uniqueness(S, opt.seed),
          ordering(S),
          projection_identities(opt.seed),
          h_unit_circle(opt.seed),
          linearization_identities(S, opt.seed),
          ratio_bounds(S),
          eigensymmetry(opt.seed),
          dkw_audit(opt.seed),
          scalar_ground_truths()};
}

inline json to_json(const Result& r) {
  return {{"criterion", r.id},    {"name", r.name},     {"passed", r.passed}, {"checked", r.checked},
          {"worst", r.worst},     {"detail", r.detail}, {"seconds", r.seconds},
          {"failure", r.failure}};
}

}  // namespace palin::verify
