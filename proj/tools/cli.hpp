#pragma once

// Command-line front end. `run` is separate from main so tests can drive it
// in-process with their own streams.
//
// Exit codes: 0 success, 2 the mathematical condition fails (JSON witness on
// the output), 3 bad input or schema, 4 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hadamard/hadamard.hpp"

namespace hadamard::cli {

using json = nlohmann::json;

inline constexpr int exit_ok = 0;
inline constexpr int exit_condition = 2;
inline constexpr int exit_input = 3;
inline constexpr int exit_numerical = 4;

struct config {
  std::string weight = "factorial";
  std::optional<double> tol;
  double rtol = 1e-10;
  double agreement_tol = 1e-6;
  double step_norm = 0.5;
  double eps = 0.25;
  index_t horizon = index_t{1} << 14;
  std::uint64_t seed = 20240611;  // no subcommand is randomized yet
  std::string json_path;
  std::string out_path;
  std::string z = "0";
  index_t k = 0;
  unsigned n = 1;
  std::optional<unsigned> family;
  std::string kind = "noetherian";
  std::size_t nodes = 2048;
  std::vector<index_t> ks;
  bool direct = true;
};

struct result {
  json doc;
  std::string summary;
  int code = exit_ok;
  bool lines = false;  ///< doc is an array written one JSON value per line
};

inline int exit_code_for(errc e) {
  if (is_condition_failure(e)) return exit_condition;
  if (is_numerical_failure(e)) return exit_numerical;
  return exit_input;
}

inline result failed(const failure& f) {
  json doc = io::failure_to_json(f);
  doc["ok"] = false;
  std::string s = std::string(to_string(f.code));
  if (f.index) s += " at index " + std::to_string(*f.index);
  return {doc, s + ": " + f.message, exit_code_for(f.code)};
}

namespace detail {

inline std::string num(double x) { return hadamard::detail::format_number(x); }

inline cplx parse_z(const std::string& s) {
  const auto comma = s.find(',');
  try {
    if (comma == std::string::npos) return {std::stod(s), 0.0};
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
  } catch (const std::exception&) {
    throw error(errc::bad_input, "--z must be 're' or 're,im'");
  }
}

inline json read_input(const config& cfg) {
  if (cfg.json_path.empty()) throw error(errc::bad_input, "this command needs --json <path>");
  if (cfg.json_path == "-") return json::parse(std::cin);
  std::ifstream in(cfg.json_path);
  if (!in) throw error(errc::bad_input, "cannot open '" + cfg.json_path + "'");
  return json::parse(in);
}

}  // namespace detail

using handler = std::function<result(const config&, const WeightRef&, const std::function<json()>&)>;

// ---- elem ------------------------------------------------------------------

inline std::map<std::string, handler> elem_commands() {
  using io::element_from_json;
  using io::element_list_from_json;
  using io::element_to_json;
  std::map<std::string, handler> m;

  m["norm"] = [](const config&, const WeightRef& w, const auto& in) {
    const Element f = element_from_json(in(), w);
    const double v = norm(f);
    return result{{{"ok", true}, {"norm", io::real_to_json(v)}, {"certainty", to_string(certainty_of(f))}},
                  "norm = " + detail::num(v)};
  };

  m["eval"] = [](const config& c, const WeightRef& w, const auto& in) {
    const Element f = element_from_json(in(), w);
    const cplx z = detail::parse_z(c.z);
    const double tol = c.tol.value_or(1e-12);
    const evaluation e = eval_at(f, z, tol);
    return result{{{"ok", true},
                   {"z", io::cplx_to_json(z)},
                   {"value", io::cplx_to_json(e.value)},
                   {"error_bound", io::real_to_json(e.error_bound)},
                   {"terms", e.terms}},
                  "f(z) = " + detail::num(e.value.real()) + " + " + detail::num(e.value.imag()) + "i, |error| <= " +
                      detail::num(e.error_bound) + " using " + std::to_string(e.terms) + " terms"};
  };

  m["invert"] = [](const config&, const WeightRef& w, const auto& in) {
    auto r = invertible(element_from_json(in(), w));
    if (!r) return failed(r.why());
    return result{{{"ok", true}, {"delta", io::real_to_json(r->delta)}, {"inverse", element_to_json(r->inverse)}},
                  "invertible, delta = " + detail::num(r->delta)};
  };

  m["divide"] = [](const config&, const WeightRef& w, const auto& in) {
    const json doc = in();
    auto r = divide(element_from_json(io::field(doc, "f"), w), element_from_json(io::field(doc, "g"), w));
    if (!r) return failed(r.why());
    return result{{{"ok", true}, {"constant", io::real_to_json(r->constant)}, {"quotient", element_to_json(r->h)}},
                  "g divides f, C = " + detail::num(r->constant)};
  };

  m["gcd"] = [](const config&, const WeightRef& w, const auto& in) {
    const auto fs = element_list_from_json(io::field(in(), "elements"), w);
    return result{{{"ok", true}, {"gcd", element_to_json(gcd(fs))}}, "gcd of " + std::to_string(fs.size()) + " elements"};
  };

  m["ideal-member"] = [](const config&, const WeightRef& w, const auto& in) {
    const json doc = in();
    const Element f = element_from_json(io::field(doc, "f"), w);
    const auto gens = element_list_from_json(io::field(doc, "generators"), w);
    auto r = in_ideal(f, gens);
    if (!r) return failed(r.why());
    return result{{{"ok", true},
                   {"constant", io::real_to_json(r->constant)},
                   {"coefficients", io::element_list(r->coeffs)}},
                  "f lies in the ideal, C = " + detail::num(r->constant)};
  };

  m["corona"] = [](const config&, const WeightRef& w, const auto& in) {
    const auto fs = element_list_from_json(io::field(in(), "elements"), w);
    auto r = corona_solve(fs);
    if (!r) return failed(r.why());
    return result{{{"ok", true}, {"delta", io::real_to_json(r->delta)}, {"solution", io::element_list(r->gs)}},
                  "corona condition holds, delta = " + detail::num(r->delta)};
  };

  m["exp"] = [](const config&, const WeightRef& w, const auto& in) {
    return result{{{"ok", true}, {"exp", element_to_json(exp_el(element_from_json(in(), w)))}}, "exp computed"};
  };

  m["log"] = [](const config&, const WeightRef& w, const auto& in) {
    const Element g = element_from_json(in(), w);
    auto inv = invertible(g);
    if (!inv) return failed(inv.why());
    const Element l = log_el(g);
    const double bound = log_norm_bound(inv->delta, norm(g));
    return result{{{"ok", true},
                   {"log", element_to_json(l)},
                   {"norm", io::real_to_json(norm(l))},
                   {"bound", io::real_to_json(bound)}},
                  "||log g|| = " + detail::num(norm(l)) + " <= " + detail::num(bound)};
  };

  m["idempotent"] = [](const config&, const WeightRef& w, const auto& in) {
    const json doc = in();
    if (doc.is_object() && doc.contains("mask")) {
      WeightRef wt = doc.contains("weight") ? parse_weight(doc.at("weight").get<std::string>()) : w;
      const Element f = idempotent_from_mask(wt, io::epseq_from_json(doc.at("mask")));
      return result{{{"ok", true}, {"idempotent", true}, {"element", element_to_json(f)}}, "idempotent from mask"};
    }
    const bool id = is_idempotent(element_from_json(doc, w));
    return result{{{"ok", true}, {"idempotent", id}}, id ? "idempotent" : "not idempotent"};
  };

  m["approx-invert"] = [](const config& c, const WeightRef& w, const auto& in) {
    const Element f = element_from_json(in(), w);
    const Element g = approx_invertible(f, c.eps);
    const double dist = norm(g - f);
    return result{{{"ok", true},
                   {"g", element_to_json(g)},
                   {"inf_abs", io::real_to_json(inf_abs(g.seq()))},
                   {"distance", io::real_to_json(dist)}},
                  "||g - f|| = " + detail::num(dist) + " <= 2 eps = " + detail::num(2 * c.eps)};
  };

  m["bass-reduce"] = [](const config& c, const WeightRef& w, const auto& in) {
    const json doc = in();
    auto get = [&](const char* k) { return element_from_json(io::field(doc, k), w); };
    const bass_result r = bass_reduce(get("f1"), get("f2"), get("g1"), get("g2"), c.eps, c.tol.value_or(1e-12));
    return result{{{"ok", true},
                   {"h", element_to_json(r.h)},
                   {"witness", element_to_json(r.witness)},
                   {"delta", io::real_to_json(r.delta)}},
                  "f1 + h*f2 invertible, delta = " + detail::num(r.delta)};
  };
  return m;
}

// ---- mat -------------------------------------------------------------------

inline std::map<std::string, handler> mat_commands() {
  using io::matrix_from_json;
  using io::matrix_to_json;
  std::map<std::string, handler> m;

  m["mul"] = [](const config&, const WeightRef& w, const auto& in) {
    const json doc = in();
    const MatElement p = mat_mul(matrix_from_json(io::field(doc, "A"), w), matrix_from_json(io::field(doc, "B"), w));
    return result{{{"ok", true}, {"product", matrix_to_json(p)}}, "product computed"};
  };

  m["det"] = [](const config&, const WeightRef& w, const auto& in) {
    return result{{{"ok", true}, {"det", io::element_to_json(mat_det(matrix_from_json(in(), w)))}}, "det computed"};
  };

  m["solve"] = [](const config& c, const WeightRef& w, const auto& in) {
    const json doc = in();
    auto r = mat_solve(matrix_from_json(io::field(doc, "A"), w), matrix_from_json(io::field(doc, "b"), w), c.rtol);
    if (!r) return failed(r.why());
    return result{{{"ok", true},
                   {"delta", io::real_to_json(r->delta)},
                   {"x", matrix_to_json(r->x)},
                   {"max_residual", io::real_to_json(r->max_residual)}},
                  "solved, delta = " + detail::num(r->delta) + ", max residual " + detail::num(r->max_residual)};
  };

  m["exp"] = [](const config&, const WeightRef& w, const auto& in) {
    return result{{{"ok", true}, {"exp", matrix_to_json(mat_exp(matrix_from_json(in(), w)))}}, "exp computed"};
  };

  m["log"] = [](const config& c, const WeightRef& w, const auto& in) {
    log_options opt;
    opt.quadrature_nodes = c.nodes;
    opt.agreement_tol = c.agreement_tol;
    const matrix_log r = mat_log(matrix_from_json(in(), w), opt);
    json theta = json::array();
    for (double t : r.theta) theta.push_back(t);
    return result{{{"ok", true},
                   {"log", matrix_to_json(r.log)},
                   {"theta", theta},
                   {"quadrature_nodes", c.nodes},
                   {"max_disagreement", io::real_to_json(r.max_disagreement)},
                   {"max_roundtrip_error", io::real_to_json(r.max_roundtrip_error)}},
                  "log computed, eigen/contour disagreement " + detail::num(r.max_disagreement) +
                      ", round trip " + detail::num(r.max_roundtrip_error)};
  };

  m["sl-factor"] = [](const config& c, const WeightRef& w, const auto& in) {
    sl_options opt;
    opt.step_norm = c.step_norm;
    opt.tol = c.tol.value_or(1e-9);
    opt.direct = c.direct;
    const sl_factorization r = sl_factor(matrix_from_json(in(), w), opt);
    return result{{{"ok", true},
                   {"factors", io::factors_to_json(r.factors)},
                   {"count", r.factors.size()},
                   {"steps", r.steps},
                   {"verification",
                    {{"max_error", io::real_to_json(r.max_error)}, {"tol", opt.tol}, {"pass", r.max_error <= opt.tol}}}},
                  std::to_string(r.factors.size()) + " elementary factors, max_error " + detail::num(r.max_error) +
                      " <= " + detail::num(opt.tol)};
  };

  m["norm-bounds"] = [](const config&, const WeightRef& w, const auto& in) {
    const norm_bounds b = mat_norm_bounds(matrix_from_json(in(), w));
    return result{{{"ok", true},
                   {"lower", io::real_to_json(b.max_entry_norm)},
                   {"spectral_sup", io::real_to_json(b.spectral_sup)},
                   {"upper", io::real_to_json(b.upper)},
                   {"holds", b.holds}},
                  "sup_k ||U(k)|| = " + detail::num(b.spectral_sup) + " <= " + detail::num(b.upper)};
  };
  return m;
}

// ---- ideal -----------------------------------------------------------------

inline std::map<std::string, handler> ideal_commands() {
  std::map<std::string, handler> m;

  m["index-order"] = [](const config& c, const WeightRef& w, const auto& in) {
    const auto r = index_order(io::element_from_json(in(), w), c.k, c.horizon);
    result out{json::array({io::index_order_to_json(r)}), "", exit_ok, true};
    out.summary = "m(f, " + std::to_string(r.k) + ") = " + (r.infinite ? std::string("Infinity") : (r.truncated ? ">= " : "") + std::to_string(r.m)) +
                  " (" + std::string(to_string(r.cert)) + ")";
    return out;
  };

  m["krull-family"] = [](const config& c, const WeightRef& w, const auto&) {
    const Element f = krull_family(w, c.n, c.horizon);
    json blocks = json::array();
    index_t lo = 0;
    bool open = false;
    for (index_t i = 0; i <= c.horizon; ++i) {
      const bool z = f.u(i) == cplx{};
      if (z && !open) lo = i, open = true;
      if (!z && open) blocks.push_back({lo, i - 1}), open = false;
    }
    if (open) blocks.push_back({lo, c.horizon});
    return result{{{"ok", true},
                   {"weight", w->name()},
                   {"n", c.n},
                   {"horizon", c.horizon},
                   {"certainty", "horizon"},
                   {"zero_blocks", blocks}},
                  std::to_string(blocks.size()) + " zero blocks up to " + std::to_string(c.horizon)};
  };

  m["trajectory"] = [](const config& c, const WeightRef& w, const auto& in) {
    const Element f = c.family ? krull_family(w, *c.family, c.horizon) : io::element_from_json(in(), w);
    if (!c.ks.empty()) {
      const auto t = nonfixed_ideal_trajectory(f, c.ks);
      json doc = {{"ok", true}, {"values", t.values}, {"certainty", to_string(t.cert)}};
      doc["verdict"] = t.verdict ? json(*t.verdict == membership::in ? "in" : "not_in") : json(nullptr);
      return result{doc, t.verdict ? std::string("exact verdict: ") + doc["verdict"].get<std::string>()
                                   : std::string("advisory trajectory only")};
    }
    json lines = json::array();
    for (const auto& p : growth_trajectory(f, c.n, c.horizon)) {
      json j = io::index_order_to_json(p.order);
      j["a_k"] = p.a_k;
      j["k"] = p.k;
      j["ratio"] = io::real_to_json(p.ratio);
      lines.push_back(j);
    }
    return result{lines, std::to_string(lines.size()) + " trajectory points (advisory)", exit_ok, true};
  };

  m["annihilator"] = [](const config&, const WeightRef& w, const auto& in) {
    return result{{{"ok", true}, {"chi", io::element_to_json(annihilator_generator(io::element_from_json(in(), w)))}},
                  "annihilator generator computed"};
  };

  m["chain"] = [](const config& c, const WeightRef& w, const auto&) {
    chain_kind kind;
    if (c.kind == "noetherian") kind = chain_kind::noetherian;
    else if (c.kind == "artinian") kind = chain_kind::artinian;
    else throw error(errc::bad_input, "--kind must be noetherian or artinian");
    const chain_report r = chain_witness(kind, c.n, w);
    json checks = json::array();
    for (const auto& ch : r.checks) checks.push_back({{"claim", ch.claim}, {"pass", ch.pass}});
    return result{{{"ok", true},
                   {"kind", to_string(kind)},
                   {"n", c.n},
                   {"witness", io::element_to_json(r.witness)},
                   {"checks", checks},
                   {"pass", r.pass()}},
                  std::string(to_string(kind)) + " chain witness: " + (r.pass() ? "pass" : "FAIL")};
  };
  return m;
}

inline result weight_list(const config&, const WeightRef&, const std::function<json()>&) {
  json ws = json::array();
  for (const WeightRef& w : {make_weight(Weight::factorial()), make_weight(Weight::super_exp(2.0, 2.0))}) {
    const auto t = w->doubling_threshold();
    ws.push_back({{"name", w->name()}, {"preset", true}, {"doubling_threshold", t ? json(*t) : json(nullptr)}});
  }
  for (const auto& id : weight_registry::global().ids()) ws.push_back({{"name", "custom:" + id}, {"preset", false}});
  return {{{"ok", true}, {"weights", ws}}, std::to_string(ws.size()) + " weights"};
}

// ---- driver ----------------------------------------------------------------

inline void write_result(const result& r, const config& cfg, std::ostream& out, std::ostream& err) {
  std::ostringstream body;
  if (r.lines) {
    for (const auto& j : r.doc) body << j.dump() << '\n';
  } else {
    body << r.doc.dump(2) << '\n';
  }
  if (!cfg.out_path.empty()) {
    std::ofstream f(cfg.out_path);
    if (!f) throw error(errc::bad_input, "cannot write '" + cfg.out_path + "'");
    f << body.str();
    out << r.summary << '\n';
  } else {
    out << body.str();
    err << r.summary << '\n';
  }
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  config cfg;
  CLI::App app{"Weighted Hadamard algebra A(p): elements, matrices and ideals", "hadamard"};
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--weight", cfg.weight, "factorial | superexp[:b=<b>,q=<q>] | custom:<id>");
  app.add_option("--tol", cfg.tol, "evaluation / reconstruction tolerance")->check(CLI::PositiveNumber);
  app.add_option("--rtol", cfg.rtol, "rank tolerance relative to the largest singular value")->check(CLI::PositiveNumber);
  app.add_option("--agreement-tol", cfg.agreement_tol, "eigen vs contour logarithm agreement")->check(CLI::PositiveNumber);
  app.add_option("--step-norm", cfg.step_norm, "sl-factor step bound, in (0,1)")->check(CLI::Range(1e-300, 1.0 - 1e-16));
  app.add_option("--eps", cfg.eps, "threshold for approx-invert / bass-reduce")->check(CLI::PositiveNumber);
  app.add_option("--horizon", cfg.horizon, "last index examined for generated sequences");
  app.add_option("--seed", cfg.seed, "seed for randomized self-checks");
  app.add_option("--json", cfg.json_path, "input document ('-' for stdin)");
  app.add_option("--out", cfg.out_path, "write the JSON result here; summary goes to stdout");
  app.add_option("--z", cfg.z, "evaluation point 're' or 're,im'");
  app.add_option("--k", cfg.k, "index for index-order");
  app.add_option("--n", cfg.n, "family / chain / trajectory exponent")->check(CLI::PositiveNumber);
  app.add_option("--family", cfg.family, "use the Krull family f_<n> as input")->check(CLI::PositiveNumber);
  app.add_option("--kind", cfg.kind, "noetherian | artinian");
  app.add_option("--nodes", cfg.nodes, "contour quadrature nodes (0 skips the check)");
  app.add_option("--ks", cfg.ks, "subsequence indices for trajectory");
  app.add_flag("!--path-only", cfg.direct, "sl-factor: skip the direct LDU attempt");

  struct leaf {
    CLI::App* cmd;
    handler fn;
  };
  std::vector<leaf> leaves;
  auto group = [&](const std::string& name, const std::string& desc, const std::map<std::string, handler>& cmds) {
    CLI::App* g = app.add_subcommand(name, desc);
    g->require_subcommand(1);
    g->fallthrough();
    for (const auto& [cmd, fn] : cmds) {
      CLI::App* sub = g->add_subcommand(cmd);
      sub->fallthrough();
      leaves.push_back({sub, fn});
    }
  };
  group("elem", "operations on single elements", elem_commands());
  group("mat", "matrices over A(p)", mat_commands());
  group("ideal", "index orders and ideal witnesses", ideal_commands());
  group("weight", "weight sequences", {{"list", weight_list}});

  std::vector<const char*> argv{"hadamard"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return exit_input;
  }

  try {
    const WeightRef w = parse_weight(cfg.weight);
    for (const auto& l : leaves) {
      if (!l.cmd->parsed()) continue;
      const result r = l.fn(cfg, w, [&] { return detail::read_input(cfg); });
      write_result(r, cfg, out, err);
      return r.code;
    }
    err << "no command given\n";
    return exit_input;
  } catch (const error& e) {
    result r = failed(e.details());
    write_result(r, cfg, out, err);
    return r.code;
  } catch (const json::exception& e) {
    err << "bad JSON: " << e.what() << '\n';
    return exit_input;
  }
}

}  // namespace hadamard::cli
