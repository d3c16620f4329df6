#pragma once

// JSON documents for elements, matrices, factor lists and failures.
//
//   complex   : number | [re, im]
//   element   : {"weight": name, "normalized": {"prefix": [...], "cycle": [...]}}
//             | {"weight": name, "raw_prefix": [...], "tail": "zero"}
//   matrix    : {"weight": name, "rows": m, "cols": n,
//                "entries": [[{"prefix": [...], "cycle": [...]}, ...], ...]}
//   factors   : [{"i": i, "j": j, "alpha": element}, ...]
//
// Doubles are written in shortest round-trip form, so reading a document
// back reproduces every value bit for bit. Non-finite reals are written as
// the strings "Infinity", "-Infinity", "NaN".

#include <json.hpp>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hadamard/ideals.hpp"
#include "hadamard/sl_factor.hpp"

namespace hadamard::io {

using json = nlohmann::json;

[[noreturn]] inline void schema_error(const std::string& what) { throw error(errc::bad_input, what); }

inline json real_to_json(double x) {
  if (std::isnan(x)) return "NaN";
  if (std::isinf(x)) return x > 0 ? "Infinity" : "-Infinity";
  return x;
}

inline double real_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "Infinity") return std::numeric_limits<double>::infinity();
    if (s == "-Infinity") return -std::numeric_limits<double>::infinity();
    if (s == "NaN") return std::numeric_limits<double>::quiet_NaN();
  }
  schema_error("expected a number, got " + j.dump());
}

inline json cplx_to_json(cplx z) { return json::array({real_to_json(z.real()), real_to_json(z.imag())}); }

inline cplx cplx_from_json(const json& j) {
  if (j.is_array()) {
    if (j.size() != 2) schema_error("complex number must be [re, im]");
    return {real_from_json(j[0]), real_from_json(j[1])};
  }
  return {real_from_json(j), 0.0};
}

inline json cplx_list(std::span<const cplx> v) {
  json a = json::array();
  for (cplx z : v) a.push_back(cplx_to_json(z));
  return a;
}

inline std::vector<cplx> cplx_list_from_json(const json& j, const char* what) {
  if (!j.is_array()) schema_error(std::string(what) + " must be an array");
  std::vector<cplx> out;
  for (const auto& x : j) out.push_back(cplx_from_json(x));
  return out;
}

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) schema_error(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline json epseq_to_json(const EPSeq& s) { return {{"prefix", cplx_list(s.prefix())}, {"cycle", cplx_list(s.cycle())}}; }

inline EPSeq epseq_from_json(const json& j) {
  std::vector<cplx> prefix;
  if (j.contains("prefix")) prefix = cplx_list_from_json(j.at("prefix"), "prefix");
  return EPSeq(std::move(prefix), cplx_list_from_json(field(j, "cycle"), "cycle"));
}

inline json element_to_json(const Element& f) {
  return {{"weight", f.weight().name()}, {"normalized", epseq_to_json(f.seq())}};
}

/// `fallback` supplies the weight when the document has none.
inline Element element_from_json(const json& j, const WeightRef& fallback = nullptr) {
  if (!j.is_object()) schema_error("element document must be an object");
  WeightRef w = j.contains("weight") ? parse_weight(j.at("weight").get<std::string>()) : fallback;
  if (!w) schema_error("element document has no weight");
  if (j.contains("normalized")) return Element(w, epseq_from_json(j.at("normalized")));
  if (j.contains("raw_prefix")) {
    const std::string tail = j.value("tail", "zero");
    if (tail != "zero") schema_error("only \"tail\": \"zero\" is supported for raw_prefix documents");
    const auto taylor = cplx_list_from_json(j.at("raw_prefix"), "raw_prefix");
    return from_raw(w, taylor);
  }
  schema_error("element document needs \"normalized\" or \"raw_prefix\"");
}

inline std::vector<Element> element_list_from_json(const json& j, const WeightRef& fallback) {
  if (!j.is_array()) schema_error("expected an array of elements");
  std::vector<Element> out;
  for (const auto& x : j) out.push_back(element_from_json(x, fallback));
  return out;
}

inline json element_list(std::span<const Element> fs) {
  json a = json::array();
  for (const auto& f : fs) a.push_back(element_to_json(f));
  return a;
}

inline json matrix_to_json(const MatElement& a) {
  json rows = json::array();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < a.cols(); ++j) row.push_back(epseq_to_json(a(i, j).seq()));
    rows.push_back(std::move(row));
  }
  return {{"weight", a.weight().name()}, {"rows", a.rows()}, {"cols", a.cols()}, {"entries", std::move(rows)}};
}

inline MatElement matrix_from_json(const json& j, const WeightRef& fallback = nullptr) {
  if (!j.is_object()) schema_error("matrix document must be an object");
  WeightRef w = j.contains("weight") ? parse_weight(j.at("weight").get<std::string>()) : fallback;
  if (!w) schema_error("matrix document has no weight");
  const auto m = field(j, "rows").get<std::size_t>();
  const auto n = field(j, "cols").get<std::size_t>();
  const json& e = field(j, "entries");
  if (!e.is_array() || e.size() != m) schema_error("entries must have 'rows' rows");
  std::vector<Element> entries;
  for (const auto& row : e) {
    if (!row.is_array() || row.size() != n) schema_error("each entries row must have 'cols' items");
    for (const auto& x : row) entries.emplace_back(w, x.contains("normalized") ? epseq_from_json(x.at("normalized")) : epseq_from_json(x));
  }
  return MatElement(w, m, n, std::move(entries));
}

inline json factors_to_json(const std::vector<ElementaryFactor>& fs) {
  json a = json::array();
  for (const auto& f : fs) a.push_back({{"i", f.i}, {"j", f.j}, {"alpha", element_to_json(f.alpha)}});
  return a;
}

inline std::vector<ElementaryFactor> factors_from_json(const json& j, const WeightRef& fallback = nullptr) {
  if (!j.is_array()) schema_error("factor list must be an array");
  std::vector<ElementaryFactor> out;
  for (const auto& x : j)
    out.emplace_back(field(x, "i").get<std::size_t>(), field(x, "j").get<std::size_t>(),
                     element_from_json(field(x, "alpha"), fallback));
  return out;
}

inline json failure_to_json(const failure& f) {
  json j = {{"error", std::string(to_string(f.code))}, {"message", f.message}};
  j["index"] = f.index ? json(*f.index) : json(nullptr);
  if (!f.vector.empty()) j["vector"] = cplx_list(f.vector);
  return j;
}

inline json index_order_to_json(const index_order_report& r) {
  json j = {{"k", r.k}, {"m", r.infinite ? json("Infinity") : json(r.m)}, {"flag", std::string(to_string(r.cert))}};
  if (r.truncated) j["truncated"] = true;
  return j;
}

}  // namespace hadamard::io
