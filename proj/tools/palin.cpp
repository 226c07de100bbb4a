// Command-line front end. JSON goes to stdout (or --out); --human prints
// flattened key/value lines with 9 significant digits instead.
//
// Exit codes: 0 success, 1 invalid input or inconsistent structure,
// 2 numerical failure or failed certificate.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "palin/palin.hpp"

namespace {

using palin::io::json;

struct Common {
  bool human = false;
  double branch_tol = palin::kDefaultBranchTol;
  std::string out;
};

void flatten(const json& j, const std::string& path, std::ostream& os) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), path.empty() ? it.key() : path + "." + it.key(), os);
  } else if (j.is_array() && !(j.size() == 2 && j[0].is_number() && j[1].is_number())) {
    for (std::size_t k = 0; k < j.size(); ++k) flatten(j[k], path + "[" + std::to_string(k) + "]", os);
  } else if (j.is_array()) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "%.9g%+.9gi", j[0].get<double>(), j[1].get<double>());
    os << path << ": " << buf << '\n';
  } else if (j.is_number_float()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", j.get<double>());
    os << path << ": " << buf << '\n';
  } else if (j.is_string()) {
    os << path << ": " << j.get<std::string>() << '\n';
  } else {
    os << path << ": " << j.dump() << '\n';
  }
}

void emit(const json& j, const Common& c) {
  if (!c.out.empty()) {
    palin::io::write_json_file(c.out, j);
    return;
  }
  if (c.human)
    flatten(j, "", std::cout);
  else
    std::cout << j.dump(2) << '\n';
}

palin::io::PolynomialFile load_polynomial(const std::string& path) {
  return palin::io::polynomial_from(palin::io::read_json_file(path));
}

palin::CVector load_vector(const std::string& path) {
  return palin::io::eigenvector_from(palin::io::read_json_file(path));
}

palin::StructureClass declared(const palin::io::PolynomialFile& f, const std::string& who) {
  if (!f.structure) throw palin::ValidationError(who + ": polynomial file declares no structure");
  return *f.structure;
}

double default_branch_tol() {
  if (const char* env = std::getenv("PALIN_BRANCH_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && *end == '\0' && v >= 0.0 && std::isfinite(v)) return v;
    std::cerr << "warning: ignoring malformed PALIN_BRANCH_TOL='" << env << "'\n";
  }
  return palin::kDefaultBranchTol;
}

// ---------------------------------------------------------------------------

int cmd_check(const std::string& poly, const Common& c) {
  const auto f = load_polynomial(poly);
  const double scale = std::max(1.0, palin::poly_norm(f.P, palin::Norm::Frobenius));
  json residuals = json::object();
  json matches = json::array();
  for (const auto& s : palin::kAllClasses) {
    const double r = palin::structure_residual(f.P, s);
    residuals[palin::to_string(s)] = r;
    if (r <= 1e-10 * scale) matches.push_back(palin::to_string(s));
  }
  // Regularity: det P(z) at a few fixed points against the scale of the entries.
  bool regular = false;
  double det_ratio = 0.0;
  for (palin::Complex z : {palin::Complex(0.37, 0.61), palin::Complex(-1.3, 0.2), palin::Complex(0.8, -1.9)}) {
    double s = 0.0;
    for (int j = 0; j <= f.P.m(); ++j) s += std::pow(std::abs(z), j) * f.P[j].norm();
    const double d = std::abs(palin::determinant(palin::evaluate(f.P, z))) / std::pow(s, f.P.n());
    det_ratio = std::max(det_ratio, d);
  }
  regular = det_ratio > 1e-13;
  json out = {{"n", f.P.n()}, {"m", f.P.m()}, {"residuals", residuals},
              {"matching_classes", matches}, {"regular", regular}, {"det_sample_ratio", det_ratio}};
  int code = 0;
  if (f.structure) {
    const double r = palin::structure_residual(f.P, *f.structure);
    out["declared"] = palin::to_string(*f.structure);
    out["declared_residual"] = r;
    out["declared_ok"] = r <= 1e-10 * scale;
    if (!(r <= 1e-10 * scale)) code = 1;
  } else {
    out["declared"] = nullptr;
  }
  emit(out, c);
  if (c.human && f.structure) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", palin::structure_residual(f.P, *f.structure));
    std::cout << "structure: " << palin::to_string(*f.structure) << ", residual " << buf << '\n';
  }
  if (code != 0) std::cerr << "error: declared structure does not hold\n";
  return code;
}

int cmd_backward_error(const std::string& poly, const std::string& lam_text, const std::string& xfile,
                       const Common& c) {
  const auto f = load_polynomial(poly);
  const palin::Complex lam = palin::io::parse_complex(lam_text);
  const palin::CVector x = load_vector(xfile);
  if (!f.structure) {
    emit({{"eta_unstructured", palin::eta_unstructured(f.P, lam, x)},
          {"eta_structured_F", nullptr},
          {"eta_structured_2", nullptr},
          {"a", nullptr},
          {"b", nullptr},
          {"branch", "unstructured"},
          {"flags", json::array({"no_declared_structure"})}},
         c);
    return 0;
  }
  const auto rep = palin::backward_error_report(f.P, *f.structure, lam, x, c.branch_tol);
  emit(palin::io::to_json(rep), c);
  return 0;
}

int cmd_perturb(const std::string& poly, const std::string& lam_text, const std::string& xfile,
                const std::string& norm, const Common& c) {
  const auto f = load_polynomial(poly);
  const auto s = declared(f, "perturb");
  const palin::Complex lam = palin::io::parse_complex(lam_text);
  const palin::CVector x = load_vector(xfile);
  const double scale = (1.0 + palin::poly_norm(f.P, palin::Norm::Frobenius)) *
                       palin::power_vector_ascending(lam, f.P.m()).norm();
  bool ok = true;
  auto one = [&](palin::Norm which) {
    const auto p = palin::minimal_perturbation(f.P, s, lam, x, which, c.branch_tol);
    ok = ok && p.constraint_residual <= 1e-10 * scale &&
         p.structure_residual <= 1e-12 * std::max(1.0, p.certified_norm);
    return palin::io::to_json(p);
  };
  json out;
  if (norm == "F")
    out = one(palin::Norm::Frobenius);
  else if (norm == "2")
    out = one(palin::Norm::Spectral);
  else
    out = {{"F", one(palin::Norm::Frobenius)}, {"2", one(palin::Norm::Spectral)}};
  emit(out, c);
  if (!ok) {
    std::cerr << "error: certificate thresholds not met\n";
    return 2;
  }
  return 0;
}

int cmd_linearize(const std::string& poly, const std::string& ansatz, const std::string& target,
                  const Common& c) {
  const auto f = load_polynomial(poly);
  const auto s = declared(f, "linearize");
  const auto pc = target.empty() ? s : palin::io::parse_class(target);
  palin::CVector v;
  if (ansatz.empty() || ansatz == "default")
    v = palin::default_ansatz(f.P.m(), s.sign * pc.sign);
  else
    v = palin::io::ansatz_from(palin::io::read_json_file(ansatz));
  const auto L = palin::build_structured_pencil(f.P, s, v, pc);
  const auto ver = palin::verify_pencil(L, f.P);
  json out = palin::io::to_json(L);
  out["identity_residual"] = ver.identity;
  out["structure_residual"] = ver.structure;
  emit(out, c);
  return 0;
}

int cmd_advise(const std::string& poly, const std::string& lam_text, const std::string& xfile,
               const std::string& ansatz, const Common& c) {
  const auto f = load_polynomial(poly);
  const auto s = declared(f, "advise");
  const palin::Complex lam = palin::io::parse_complex(lam_text);
  json out = {{"structure", palin::to_string(s)}, {"lambda", palin::io::to_json(lam)}};
  std::optional<palin::CVector> x;
  if (!xfile.empty()) x = load_vector(xfile);
  if (s.adjoint == palin::Adjoint::Transpose) {
    out["advice"] = palin::to_string(palin::advise_T(lam));
    out["re_lambda"] = lam.real();
  } else {
    const bool circle = std::abs(std::abs(lam) - 1.0) <= c.branch_tol;
    if (!circle && !x)
      throw palin::ValidationError("advise: an eigenvector file (--x) is needed when |lambda| != 1");
    const palin::CVector v = ansatz.empty() ? palin::default_ansatz(f.P.m(), 1)
                                            : palin::io::ansatz_from(palin::io::read_json_file(ansatz));
    const auto h = circle ? palin::HAdvice{} : palin::advise_H(f.P, lam, *x, v, c.branch_tol);
    out["advice"] = palin::to_string(h.advice);
    out["rhat_p_norm"] = h.rhat_p;
    out["rhat_ap_norm"] = h.rhat_ap;
  }
  if (x) out["ratio_report"] = palin::io::to_json(palin::ratio_report(f.P, s, lam, *x, c.branch_tol));
  emit(out, c);
  return 0;
}

int cmd_verify(std::uint64_t seed, int instances, double tamper, const Common& c) {
  palin::verify::Options opt;
  opt.seed = seed;
  opt.instances = instances;
  opt.formula_scale = tamper;
  const auto results = palin::verify::run_all(opt);
  bool all = true;
  json arr = json::array();
  for (const auto& r : results) {
    all = all && r.passed;
    json e = palin::verify::to_json(r);
    e.erase("seconds");  // keeps reports identical across runs
    arr.push_back(std::move(e));
  }
  const json out = {{"seed", seed}, {"instances", instances}, {"passed", all}, {"criteria", arr}};
  if (c.human && c.out.empty()) {
    for (const auto& r : results)
      std::cout << (r.passed ? "PASS" : "FAIL") << " " << r.id << " " << r.name << ": " << r.detail << '\n';
  } else {
    emit(out, c);
  }
  return all ? 0 : 1;
}

int cmd_oracle(const std::string& poly, const std::string& lam_text, const std::string& xfile,
               const Common& c) {
  const auto f = load_polynomial(poly);
  const auto s = declared(f, "oracle");
  const palin::Complex lam = palin::io::parse_complex(lam_text);
  const palin::CVector x = load_vector(xfile);
  const auto o = palin::frobenius_oracle(f.P, s, lam, x);
  const auto rep = palin::backward_error_report(f.P, s, lam, x, c.branch_tol);
  emit({{"eta_oracle_F", o.eta},
        {"eta_closed_form_F", rep.eta_structured_F},
        {"eta_unstructured_oracle", palin::unstructured_oracle(f.P, lam, x)},
        {"eta_unstructured", rep.eta_unstructured},
        {"lsq_residual", o.lsq_residual},
        {"basis_size", o.columns}},
       c);
  return 0;
}

int cmd_gen(int n, int m, const std::string& cls, std::uint64_t seed, const std::string& xout,
            const Common& c) {
  if (n < 1 || m < 1) throw palin::ValidationError("gen: n and m must be at least 1");
  const auto s = palin::io::parse_class(cls);
  const auto P = palin::random_structured(n, m, s, seed);
  emit(palin::io::polynomial_json(P, s), c);
  if (!xout.empty()) {
    std::mt19937_64 rng(seed ^ 0xA11CE);
    palin::io::write_json_file(xout, palin::io::eigenvector_json(palin::normalized(palin::random_complex_vector(n, rng))));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured backward errors and linearizations of palindromic matrix polynomials"};
  app.require_subcommand(1);
  Common common;
  common.branch_tol = default_branch_tol();
  app.add_flag("--human", common.human, "Flattened key/value output instead of JSON");
  app.add_option("--branch-tol", common.branch_tol,
                 "Tolerance for the lambda = +-1 and |lambda| = 1 branches (env PALIN_BRANCH_TOL)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("-o,--out", common.out, "Write JSON here instead of stdout");

  std::string poly, lam, xfile, norm = "both", ansatz, target, cls = "T-pal", xout;
  std::uint64_t seed = 20240601;
  int instances = 240, n = 2, m = 2;
  double tamper = 1.0;

  auto* check = app.add_subcommand("check", "Structure residuals and a regularity sample");
  check->add_option("poly", poly, "Polynomial JSON")->required();

  auto add_pair = [&](CLI::App* sub) {
    sub->add_option("poly", poly, "Polynomial JSON")->required();
    sub->add_option("--lambda", lam, "Eigenvalue as re,im")->required();
  };
  auto* be = app.add_subcommand("backward-error", "Unstructured and structured backward errors");
  add_pair(be);
  be->add_option("--x", xfile, "Eigenvector JSON")->required();
  be->add_option("--norm", norm, "F, 2 or both (the report always carries both)")
      ->check(CLI::IsMember({"F", "2", "both"}));

  auto* perturb = app.add_subcommand("perturb", "Minimal structured perturbation with certificate");
  add_pair(perturb);
  perturb->add_option("--x", xfile, "Eigenvector JSON")->required();
  perturb->add_option("--norm", norm, "F, 2 or both")->check(CLI::IsMember({"F", "2", "both"}));

  auto* lin = app.add_subcommand("linearize", "Structured pencil in L1(P)");
  lin->add_option("poly", poly, "Polynomial JSON")->required();
  lin->add_option("--ansatz", ansatz, "Ansatz JSON {\"v\": ...} or 'default'");
  lin->add_option("--target", target, "Pencil class (T-pal, T-anti, H-pal, H-anti); default: that of P");

  auto* advise = app.add_subcommand("advise", "Which structured linearization to use");
  add_pair(advise);
  advise->add_option("--x", xfile, "Eigenvector JSON (needed for H classes off the unit circle)");
  advise->add_option("--ansatz", ansatz, "Ansatz JSON for the H advisor");

  auto* verify = app.add_subcommand("verify", "Run the property suite");
  verify->add_option("--seed", seed, "Suite seed");
  verify->add_option("--instances", instances, "Number of suite instances")->check(CLI::PositiveNumber);
  verify->add_option("--tamper", tamper, "Scale applied to the closed form (fault injection)");

  auto* oracle = app.add_subcommand("oracle", "Brute-force Frobenius oracle");
  add_pair(oracle);
  oracle->add_option("--x", xfile, "Eigenvector JSON")->required();

  auto* gen = app.add_subcommand("gen", "Random structured polynomial");
  gen->add_option("--n", n, "Coefficient size");
  gen->add_option("--m", m, "Degree");
  gen->add_option("--class", cls, "T-pal, T-anti, H-pal or H-anti");
  gen->add_option("--seed", seed, "Seed");
  gen->add_option("--x-out", xout, "Also write a random unit eigenvector guess here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*check) return cmd_check(poly, common);
    if (*be) return cmd_backward_error(poly, lam, xfile, common);
    if (*perturb) return cmd_perturb(poly, lam, xfile, norm, common);
    if (*lin) return cmd_linearize(poly, ansatz, target, common);
    if (*advise) return cmd_advise(poly, lam, xfile, ansatz, common);
    if (*verify) return cmd_verify(seed, instances, tamper, common);
    if (*oracle) return cmd_oracle(poly, lam, xfile, common);
    if (*gen) return cmd_gen(n, m, cls, seed, xout, common);
  } catch (const palin::InconsistencyError& e) {
    std::cerr << "error: inconsistent structure: " << e.what() << '\n';
    return 1;
  } catch (const palin::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const palin::NumericalFailure& e) {
    std::cerr << "error: numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
