#pragma once
//
// JSON forms of the library types. Complex numbers are [re, im] pairs,
// matrices are row-major arrays of rows. Doubles are written with round-trip
// precision so certificates can be re-checked from the files alone.
//

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "palin/linearization.hpp"
#include "palin/perturbations.hpp"

namespace palin::io {

using json = nlohmann::json;

inline json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline Complex complex_from(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ValidationError(what + ": expected a [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json to_json(const CMatrix& A) {
  json rows = json::array();
  for (Index i = 0; i < A.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < A.cols(); ++k) row.push_back(to_json(A(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline CMatrix matrix_from(const json& j, Index rows, Index cols, const std::string& what) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(rows))
    throw ValidationError(what + ": expected " + std::to_string(rows) + " rows");
  CMatrix A(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j[i];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(cols))
      throw ValidationError(what + ": row " + std::to_string(i) + " must have " +
                            std::to_string(cols) + " entries");
    for (Index k = 0; k < cols; ++k) A(i, k) = complex_from(row[k], what);
  }
  return A;
}

inline json vector_json(const CVector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

inline CVector vector_from(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw ValidationError(what + ": expected a nonempty array");
  CVector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = complex_from(j[i], what);
  return v;
}

inline json to_json(const StructureClass& s) {
  return {{"adjoint", s.adjoint == Adjoint::Transpose ? "T" : "H"}, {"sign", s.sign}};
}

inline StructureClass structure_from(const json& j) {
  if (!j.is_object() || !j.contains("adjoint") || !j.contains("sign"))
    throw ValidationError("structure: expected {\"adjoint\": \"T\"|\"H\", \"sign\": 1|-1}");
  const auto adj = j["adjoint"];
  const auto sign = j["sign"];
  if (!adj.is_string() || (adj != "T" && adj != "H"))
    throw ValidationError("structure: adjoint must be \"T\" or \"H\"");
  if (!sign.is_number_integer() || (sign != 1 && sign != -1))
    throw ValidationError("structure: sign must be 1 or -1");
  return {adj == "T" ? Adjoint::Transpose : Adjoint::ConjugateTranspose, sign.get<int>()};
}

// Class from a short name: T-pal, T-anti, H-pal, H-anti (also "T-palindromic" etc).
inline StructureClass parse_class(const std::string& name) {
  for (const auto& s : kAllClasses) {
    const std::string full = to_string(s);
    const std::string shortname = full.substr(0, 2) + (s.sign > 0 ? "pal" : "anti");
    if (name == full || name == shortname) return s;
  }
  throw ValidationError("unknown structure class '" + name + "' (use T-pal, T-anti, H-pal, H-anti)");
}

// ---------------------------------------------------------------------------
// Polynomials.

struct PolynomialFile {
  MatrixPolynomial P;
  std::optional<StructureClass> structure;
};

inline json polynomial_json(const MatrixPolynomial& P, std::optional<StructureClass> s) {
  json coeffs = json::array();
  for (const auto& A : P.coeffs()) coeffs.push_back(to_json(A));
  return {{"n", P.n()},
          {"m", P.m()},
          {"structure", s ? to_json(*s) : json(nullptr)},
          {"coefficients", std::move(coeffs)}};
}

inline PolynomialFile polynomial_from(const json& j) {
  if (!j.is_object()) throw ValidationError("polynomial: expected a JSON object");
  for (const char* key : {"n", "m", "coefficients"})
    if (!j.contains(key)) throw ValidationError(std::string("polynomial: missing field '") + key + "'");
  if (!j["n"].is_number_integer() || !j["m"].is_number_integer())
    throw ValidationError("polynomial: n and m must be integers");
  const long long n = j["n"].get<long long>();
  const long long m = j["m"].get<long long>();
  if (n < 1 || m < 1) throw ValidationError("polynomial: n and m must be at least 1");
  const json& c = j["coefficients"];
  if (!c.is_array() || c.size() != static_cast<std::size_t>(m + 1))
    throw ValidationError("polynomial: coefficients must hold m + 1 matrices");
  std::vector<CMatrix> coeffs;
  for (long long k = 0; k <= m; ++k)
    coeffs.push_back(matrix_from(c[k], n, n, "polynomial coefficient A_" + std::to_string(k)));
  PolynomialFile out{MatrixPolynomial(std::move(coeffs)), std::nullopt};
  if (j.contains("structure") && !j["structure"].is_null()) out.structure = structure_from(j["structure"]);
  return out;
}

// ---------------------------------------------------------------------------
// Vectors: {"x": [...]} for eigenvectors, {"v": [...]} for ansatz vectors.

inline json eigenvector_json(const CVector& x) { return {{"x", vector_json(x)}}; }

inline CVector eigenvector_from(const json& j) {
  if (!j.is_object() || !j.contains("x")) throw ValidationError("vector: missing field 'x'");
  return vector_from(j["x"], "vector x");
}

inline json ansatz_json(const CVector& v) { return {{"v", vector_json(v)}}; }

inline CVector ansatz_from(const json& j) {
  if (j.is_object() && j.contains("v")) return vector_from(j["v"], "ansatz v");
  if (j.is_array()) return vector_from(j, "ansatz v");
  throw ValidationError("ansatz: expected {\"v\": [[re, im], ...]}");
}

// ---------------------------------------------------------------------------
// Reports.

inline json to_json(const BackwardErrorReport& r) {
  json a = nullptr, b = nullptr;
  if (r.coeffs_F && r.coeffs_2) {
    a = {{"F", r.coeffs_F->a}, {"2", r.coeffs_2->a}};
    b = {{"F", r.coeffs_F->b}, {"2", r.coeffs_2->b}};
  }
  return {{"eta_unstructured", r.eta_unstructured},
          {"eta_structured_F", r.eta_structured_F},
          {"eta_structured_2", r.eta_structured_2},
          {"a", a},
          {"b", b},
          {"branch", r.branch},
          {"flags", r.flags}};
}

inline json to_json(const StructuredPerturbation& p) {
  json out = polynomial_json(p.delta, p.cls);
  out["certified_norm"] = p.certified_norm;
  out["norm"] = to_string(p.norm);
  out["constraint_residual"] = p.constraint_residual;
  out["structure_residual"] = p.structure_residual;
  out["lambda"] = to_json(p.lambda_used);
  return out;
}

inline json to_json(const Pencil& L) {
  return {{"mn", L.size()},
          {"X", to_json(L.X)},
          {"Y", to_json(L.Y)},
          {"v", vector_json(L.v)},
          {"structure", to_json(L.declared)}};
}

inline Pencil pencil_from(const json& j) {
  if (!j.is_object()) throw ValidationError("pencil: expected a JSON object");
  for (const char* key : {"mn", "X", "Y", "v", "structure"})
    if (!j.contains(key)) throw ValidationError(std::string("pencil: missing field '") + key + "'");
  const Index N = j["mn"].get<Index>();
  if (N < 1) throw ValidationError("pencil: mn must be at least 1");
  Pencil L;
  L.X = matrix_from(j["X"], N, N, "pencil X");
  L.Y = matrix_from(j["Y"], N, N, "pencil Y");
  L.v = vector_from(j["v"], "pencil v");
  L.declared = structure_from(j["structure"]);
  return L;
}

inline json bound_json(double lo, double hi) {
  return json::array({lo, std::isfinite(hi) ? json(hi) : json(nullptr)});
}

inline json to_json(const RatioReport& r) {
  json pencils = json::array();
  for (const auto& p : r.pencils) {
    json e = {{"pencil", to_string(p.pencil)}, {"available", p.available}};
    if (!p.available) {
      e["reason"] = p.unavailable_reason;
      pencils.push_back(std::move(e));
      continue;
    }
    e["v"] = vector_json(p.v);
    e["ratio_F"] = p.ratio_F;
    e["ratio_2"] = p.ratio_2;
    e["ratio_unstructured"] = p.ratio_unstructured;
    e["ratio_structured_F"] = p.ratio_structured_F;
    e["ratio_structured_2"] = p.ratio_structured_2;
    e["lower_bound"] = {{"F", p.lower_F}, {"2", p.lower_2}};
    e["upper_bound"] = {{"F", std::isfinite(p.upper_F) ? json(p.upper_F) : json(nullptr)},
                        {"2", std::isfinite(p.upper_2) ? json(p.upper_2) : json(nullptr)}};
    e["branch"] = p.branch;
    e["in_bounds"] = p.in_bounds;
    json checks = json::array();
    for (const auto& c : p.checks)
      checks.push_back({{"name", c.name},
                        {"value", c.value},
                        {"bounds", bound_json(c.lower, c.upper)},
                        {"applies", c.applies},
                        {"holds", c.holds}});
    e["checks"] = std::move(checks);
    pencils.push_back(std::move(e));
  }
  return {{"eta_P", r.eta_P},
          {"eta_structured_F_P", r.eta_S_F_P},
          {"eta_structured_2_P", r.eta_S_2_P},
          {"pencils", std::move(pencils)},
          {"in_bounds", r.in_bounds}};
}

// ---------------------------------------------------------------------------
// Files.

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("malformed JSON in '" + path + "': " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

// "re,im" or "re".
inline Complex parse_complex(const std::string& text) {
  std::string s = text;
  for (char& ch : s)
    if (ch == ',') ch = ' ';
  std::istringstream in(s);
  in.imbue(std::locale::classic());
  double re = 0.0, im = 0.0;
  if (!(in >> re)) throw ValidationError("cannot parse complex number '" + text + "' (use re,im)");
  if (!(in >> im)) im = 0.0;
  std::string rest;
  if (in >> rest) throw ValidationError("cannot parse complex number '" + text + "' (use re,im)");
  if (!std::isfinite(re) || !std::isfinite(im))
    throw ValidationError("complex number '" + text + "' is not finite");
  return {re, im};
}

}  // namespace palin::io
