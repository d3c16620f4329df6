#pragma once

// The Banach algebra A(p) of entire functions f(z) = sum f^(n) z^n with
// f^(n) = O(1/p(n)), under the weighted Hadamard product
//   (f * g)^(n) = p(n) f^(n) g^(n).
//
// Elements are stored in normalized coordinates u(n) = p(n) f^(n). There the
// product is pointwise, the unit is the all-ones sequence and the norm is
// sup |u|, so every criterion below is exact pointwise arithmetic on an EPSeq.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <variant>
#include <vector>

#include "hadamard/coeffseq.hpp"
#include "hadamard/weight.hpp"

namespace hadamard {

enum class certainty { exact, horizon };

inline std::string_view to_string(certainty c) { return c == certainty::exact ? "exact" : "horizon"; }

class Element {
 public:
  Element(WeightRef w, EPSeq u) : weight_(std::move(w)), u_(std::move(u)) { check_weight(); }
  Element(WeightRef w, GenSeq u) : weight_(std::move(w)), u_(std::move(u)) { check_weight(); }

  const Weight& weight() const noexcept { return *weight_; }
  const WeightRef& weight_ref() const noexcept { return weight_; }

  /// EPSeq-backed: every answer derived from it is exact.
  bool exact() const noexcept { return std::holds_alternative<EPSeq>(u_); }

  const EPSeq& seq() const {
    if (!exact()) throw error(errc::horizon_certified_only, "operation needs an EPSeq-backed element");
    return std::get<EPSeq>(u_);
  }
  const GenSeq* generated() const noexcept { return std::get_if<GenSeq>(&u_); }

  /// Last index at which values are available (unbounded for EPSeq).
  index_t horizon() const noexcept {
    if (auto g = generated()) return g->horizon();
    return std::numeric_limits<index_t>::max();
  }

  /// Normalized coefficient u(n) = p(n) f^(n).
  cplx u(index_t n) const {
    return std::visit([n](const auto& s) { return s[n]; }, u_);
  }

  /// Taylor coefficient f^(n) = u(n) / p(n).
  cplx raw(index_t n) const {
    const cplx v = u(n);
    if (v == cplx{}) return v;
    return v * std::exp(-weight_->log_p(n));
  }

 private:
  void check_weight() const {
    if (!weight_) throw error(errc::bad_input, "element without weight");
  }

  WeightRef weight_;
  std::variant<EPSeq, GenSeq> u_;
};

inline void require_same_weight(const Element& a, const Element& b) {
  if (a.weight_ref() != b.weight_ref() && !(a.weight() == b.weight()))
    throw error(errc::weight_mismatch, "'" + a.weight().name() + "' vs '" + b.weight().name() + "'");
}

// ---- construction --------------------------------------------------------

/// The identity epsilon(z) = sum z^n / p(n); exp z for the factorial weight.
inline Element unit(WeightRef w) { return Element(std::move(w), EPSeq::constant(1.0)); }

inline Element zero(WeightRef w) { return Element(std::move(w), EPSeq::zero()); }

inline Element constant(WeightRef w, cplx c) { return Element(std::move(w), EPSeq::constant(c)); }

/// Polynomial with the given Taylor coefficients (zero tail).
inline Element from_raw(WeightRef w, std::span<const cplx> taylor) {
  std::vector<cplx> prefix(taylor.size());
  for (std::size_t n = 0; n < taylor.size(); ++n) {
    const cplx a = taylor[n];
    if (a == cplx{}) continue;
    const double lp = w->log_p(n);
    if (lp <= detail::log_max_double) {
      prefix[n] = a * w->p(n);
      if (!detail::finite(prefix[n]))
        throw error(errc::overflow_at_index, "normalized coefficient exceeds the double range", n);
      continue;
    }
    const double mag = std::log(std::abs(a)) + lp;
    if (mag > detail::log_max_double)
      throw error(errc::overflow_at_index, "normalized coefficient exceeds the double range", n);
    prefix[n] = std::polar(std::exp(mag), std::arg(a));
  }
  return Element(std::move(w), EPSeq(std::move(prefix), {cplx{}}));
}

/// c * z^m.
inline Element monomial(WeightRef w, index_t m, cplx c = 1.0) {
  std::vector<cplx> taylor(m + 1);
  taylor[m] = c;
  return from_raw(std::move(w), taylor);
}

inline Element normalized(WeightRef w, std::vector<cplx> prefix, std::vector<cplx> cycle) {
  return Element(std::move(w), EPSeq(std::move(prefix), std::move(cycle)));
}

// ---- arithmetic ----------------------------------------------------------

namespace detail {

inline GenSeq as_gen(const Element& f) {
  if (auto g = f.generated()) return *g;
  EPSeq s = f.seq();
  const double b = sup_abs(s);
  return GenSeq([s](index_t n) { return s[n]; }, std::numeric_limits<index_t>::max(), b);
}

template <class Op>
Element zip(const Element& f, const Element& g, Op op, double bound) {
  require_same_weight(f, g);
  if (f.exact() && g.exact()) return Element(f.weight_ref(), ep_zip(f.seq(), g.seq(), op));
  GenSeq a = as_gen(f), b = as_gen(g);
  const index_t h = std::min(a.horizon(), b.horizon());
  return Element(f.weight_ref(), GenSeq([a, b, op](index_t n) { return op(a[n], b[n]); }, h, bound));
}

inline double declared_bound(const Element& f) {
  if (auto g = f.generated()) return g->certified_bound();
  return sup_abs(f.seq());
}

}  // namespace detail

inline Element add(const Element& f, const Element& g) {
  return detail::zip(f, g, std::plus<cplx>{}, detail::declared_bound(f) + detail::declared_bound(g));
}

inline Element sub(const Element& f, const Element& g) {
  return detail::zip(f, g, std::minus<cplx>{}, detail::declared_bound(f) + detail::declared_bound(g));
}

/// Weighted Hadamard product: pointwise in normalized coordinates.
inline Element star(const Element& f, const Element& g) {
  return detail::zip(f, g, std::multiplies<cplx>{}, detail::declared_bound(f) * detail::declared_bound(g));
}

inline Element scalar_mul(cplx c, const Element& f) {
  if (f.exact()) return Element(f.weight_ref(), ep_map(f.seq(), [c](cplx v) { return c * v; }));
  GenSeq a = *f.generated();
  return Element(f.weight_ref(), GenSeq([a, c](index_t n) { return c * a[n]; }, a.horizon(),
                                        std::abs(c) * a.certified_bound()));
}

inline Element operator+(const Element& f, const Element& g) { return add(f, g); }
inline Element operator-(const Element& f, const Element& g) { return sub(f, g); }
inline Element operator*(cplx c, const Element& f) { return scalar_mul(c, f); }

inline bool operator==(const Element& f, const Element& g) {
  return f.weight() == g.weight() && f.seq() == g.seq();
}

/// sup_n |u_f(n) - u_g(n)|, exact scan over the joint window.
inline double max_pointwise_error(const Element& f, const Element& g) {
  require_same_weight(f, g);
  const joint_window w = window_of(f.seq(), g.seq());
  double e = 0.0;
  for (index_t n = 0; n < w.end(); ++n) e = std::max(e, std::abs(f.u(n) - g.u(n)));
  return e;
}

// ---- norm and evaluation -------------------------------------------------

/// ||f|| = sup_n p(n)|f^(n)|. Exact for EPSeq; for GenSeq the sup over the
/// horizon window, which is only horizon-certified.
inline double norm(const Element& f) {
  if (f.exact()) return sup_abs(f.seq());
  const GenSeq& g = *f.generated();
  double s = 0.0;
  for (index_t n = 0; n <= g.horizon(); ++n) s = std::max(s, std::abs(g[n]));
  return s;
}

inline certainty certainty_of(const Element& f) { return f.exact() ? certainty::exact : certainty::horizon; }

struct evaluation {
  cplx value;
  double error_bound;  ///< |f(z) - value| <= error_bound (truncation)
  index_t terms;       ///< partial sum over n = 0..terms-1
};

/// f(z) by a partial sum S_N with sup|u| * tail(N, |z|) <= tol.
inline evaluation eval_at(const Element& f, cplx z, double tol, index_t max_terms = 1u << 20) {
  if (!(tol > 0.0)) throw error(errc::bad_input, "tol must be positive");
  const Weight& w = f.weight();
  const double r = std::abs(z);
  const double sup = f.exact() ? sup_abs(f.seq()) : f.generated()->certified_bound();

  index_t N = 0;
  double tail = 0.0;
  for (;; ++N) {
    if (N >= max_terms || N > f.horizon())
      throw error(errc::bound_unavailable, "no N within reach meets the tolerance", N);
    if (auto t = w.try_tail_bound(N, r)) {
      if (sup * *t <= tol) {
        tail = sup * *t;
        break;
      }
    }
  }

  cplx sum{};
  cplx term = std::exp(-w.log_p(0));  // z^n / p(n)
  for (index_t n = 0; n <= N; ++n) {
    if (n > 0) term *= z * w.step_ratio(n);
    const cplx un = f.u(n);
    if (un != cplx{}) sum += un * term;
  }
  return {sum, tail, N + 1};
}

// ---- invertibility, divisibility, ideals ---------------------------------

struct inverse_result {
  double delta;  ///< inf_n |u(n)|
  Element inverse;
};

/// f is invertible iff inf_n |u_f(n)| > 0; the inverse has u = 1/u_f.
inline outcome<inverse_result> invertible(const Element& f) {
  const EPSeq& u = f.seq();
  const joint_window w = window_of(u);
  for (index_t n = 0; n < w.end(); ++n)
    if (u[n] == cplx{}) return failure{errc::not_invertible, n, "u vanishes", {}};
  return inverse_result{inf_abs(u), Element(f.weight_ref(), ep_map(u, [](cplx v) { return 1.0 / v; }))};
}

struct quotient {
  double constant;  ///< least C with |u_f| <= C |u_g|
  Element h;        ///< g * h = f
};

/// g divides f iff |u_f(n)| <= C |u_g(n)| for all n, for some C.
inline outcome<quotient> divide(const Element& f, const Element& g) {
  require_same_weight(f, g);
  const EPSeq &a = f.seq(), &b = g.seq();
  const joint_window w = window_of(a, b);
  double c = 0.0;
  std::vector<cplx> h(w.end());
  for (index_t n = 0; n < w.end(); ++n) {
    if (b[n] == cplx{}) {
      if (a[n] != cplx{}) return failure{errc::not_divisible, n, "divisor vanishes where f does not", {}};
      continue;
    }
    c = std::max(c, std::abs(a[n]) / std::abs(b[n]));
    h[n] = a[n] / b[n];
  }
  return quotient{c, Element(f.weight_ref(), from_window(w, h))};
}

/// Canonical gcd: u_d(n) = max_k |u_{f_k}(n)| (real, nonnegative).
inline Element gcd(std::span<const Element> fs) {
  if (fs.empty()) throw error(errc::bad_input, "gcd of an empty family");
  std::vector<const EPSeq*> seqs;
  for (const auto& f : fs) {
    require_same_weight(fs.front(), f);
    seqs.push_back(&f.seq());
  }
  return Element(fs.front().weight_ref(), ep_combine(seqs, [](std::span<const cplx> v) {
                   double m = 0.0;
                   for (cplx c : v) m = std::max(m, std::abs(c));
                   return cplx{m, 0.0};
                 }));
}

struct ideal_witness {
  double constant;              ///< least C with |u_f| <= C sum_k |u_{g_k}|
  std::vector<Element> coeffs;  ///< sum_k h_k * g_k = f
};

/// f in <g_1..g_K> iff |u_f(n)| <= C sum_k |u_{g_k}(n)| for all n.
inline outcome<ideal_witness> in_ideal(const Element& f, std::span<const Element> gens) {
  std::vector<const EPSeq*> seqs{&f.seq()};
  for (const auto& g : gens) {
    require_same_weight(f, g);
    seqs.push_back(&g.seq());
  }
  const joint_window w = window_of(seqs);
  const std::size_t K = gens.size();
  std::vector<std::vector<cplx>> h(K, std::vector<cplx>(w.end()));
  double c = 0.0;
  for (index_t n = 0; n < w.end(); ++n) {
    const cplx fn = (*seqs[0])[n];
    double sum_abs = 0.0, sum_sq = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const cplx gk = (*seqs[k + 1])[n];
      sum_abs += std::abs(gk);
      sum_sq += std::norm(gk);
    }
    if (sum_abs == 0.0) {
      if (fn != cplx{}) return failure{errc::not_in_ideal, n, "all generators vanish where f does not", {}};
      continue;
    }
    c = std::max(c, std::abs(fn) / sum_abs);
    for (std::size_t k = 0; k < K; ++k) h[k][n] = fn * std::conj((*seqs[k + 1])[n]) / sum_sq;
  }
  ideal_witness out{c, {}};
  for (std::size_t k = 0; k < K; ++k) out.coeffs.emplace_back(f.weight_ref(), from_window(w, h[k]));
  return out;
}

struct corona_solution {
  double delta;             ///< inf_n sum_i |u_{f_i}(n)|
  std::vector<Element> gs;  ///< sum_i g_i * f_i = epsilon, ||g_i|| <= 1/delta
};

/// Bezout solver under the corona condition inf_n sum_i |u_{f_i}(n)| > 0.
/// g_i = conj(u_i) / (|u_i| sum_j |u_j|), zero where u_i vanishes.
inline outcome<corona_solution> corona_solve(std::span<const Element> fs) {
  if (fs.empty()) throw error(errc::bad_input, "corona data must be nonempty");
  std::vector<const EPSeq*> seqs;
  for (const auto& f : fs) {
    require_same_weight(fs.front(), f);
    seqs.push_back(&f.seq());
  }
  const joint_window w = window_of(seqs);
  const std::size_t K = fs.size();
  std::vector<std::vector<cplx>> g(K, std::vector<cplx>(w.end()));
  double delta = std::numeric_limits<double>::infinity();
  for (index_t n = 0; n < w.end(); ++n) {
    double s = 0.0;
    for (std::size_t i = 0; i < K; ++i) s += std::abs((*seqs[i])[n]);
    if (s == 0.0) return failure{errc::corona_fails, n, "all f_i vanish", {}};
    delta = std::min(delta, s);
    for (std::size_t i = 0; i < K; ++i) {
      const cplx ui = (*seqs[i])[n];
      if (ui != cplx{}) g[i][n] = std::conj(ui) / (std::abs(ui) * s);
    }
  }
  corona_solution out{delta, {}};
  for (std::size_t i = 0; i < K; ++i) out.gs.emplace_back(fs.front().weight_ref(), from_window(w, g[i]));
  return out;
}

// ---- stable ranks --------------------------------------------------------

/// Invertible g with ||g - f|| <= 2 eps: positions with |u_f| <= eps are set to eps.
inline Element approx_invertible(const Element& f, double eps) {
  if (!(eps > 0.0)) throw error(errc::bad_input, "eps must be positive");
  return Element(f.weight_ref(), ep_map(f.seq(), [eps](cplx v) { return std::abs(v) > eps ? v : cplx{eps, 0.0}; }));
}

struct bass_result {
  Element h;
  Element witness;  ///< f1 + h * f2, invertible
  double delta;     ///< inf |u_witness|
};

/// Given g1*f1 + g2*f2 = epsilon, produce h with f1 + h*f2 invertible.
///
/// u = 1 + |u_f1| is invertible; F1 = f1 u^-1 has norm <= 1; G1 = g1 u;
/// H1 thresholds G1 at `eps`; h = H1^-1 u g2. Then
///   f1 + h f2 = H1^-1 u (epsilon + (H1 - G1) F1)
/// with ||(H1 - G1) F1|| <= 2 eps < 1.
inline bass_result bass_reduce(const Element& f1, const Element& f2, const Element& g1, const Element& g2,
                               double eps = 0.25, double bezout_tol = 1e-12) {
  if (!(eps > 0.0 && eps < 0.5)) throw error(errc::bad_input, "eps must lie in (0, 1/2)");
  require_same_weight(f1, f2);
  require_same_weight(f1, g1);
  require_same_weight(f1, g2);
  const WeightRef& w = f1.weight_ref();

  const Element bezout = star(g1, f1) + star(g2, f2);
  const double residual = max_pointwise_error(bezout, unit(w));
  if (!(residual <= bezout_tol))
    throw error(errc::precondition_failed,
                "g1*f1 + g2*f2 != epsilon (max residual " + detail::format_number(residual) + ")");

  const Element u(w, ep_map(f1.seq(), [](cplx v) { return cplx{1.0 + std::abs(v), 0.0}; }));
  const Element G1 = star(g1, u);
  const Element H1 = approx_invertible(G1, eps);
  const Element h(w, ep_combine(std::array<const EPSeq*, 3>{&H1.seq(), &u.seq(), &g2.seq()},
                                [](std::span<const cplx> v) { return v[1] * v[2] / v[0]; }));
  Element witness = f1 + star(h, f2);
  const double delta = inf_abs(witness.seq());
  if (!(delta > 0.0))
    throw error(errc::numerical_failure, "reduction witness is not invertible");
  return {h, std::move(witness), delta};
}

// ---- idempotents ---------------------------------------------------------

/// f * f = f iff u(n) in {0, 1} for all n.
inline bool is_idempotent(const Element& f) {
  const EPSeq& u = f.seq();
  auto ok = [](cplx v) { return v == cplx{0.0, 0.0} || v == cplx{1.0, 0.0}; };
  return std::all_of(u.prefix().begin(), u.prefix().end(), ok) && std::all_of(u.cycle().begin(), u.cycle().end(), ok);
}

inline Element idempotent_from_mask(WeightRef w, const EPSeq& mask) {
  Element f(std::move(w), mask);
  if (!is_idempotent(f)) throw error(errc::bad_mask, "mask values must be exactly 0 or 1");
  return f;
}

// ---- exponential and logarithm -------------------------------------------

/// e^f: u(k) = exp(u_f(k)).
inline Element exp_el(const Element& f) {
  return Element(f.weight_ref(), ep_map(f.seq(), [](cplx v) { return std::exp(v); }));
}

namespace detail {

/// Principal logarithm with imaginary part in (-pi, pi].
inline cplx principal_log(cplx z) {
  cplx l = std::log(z);
  if (l.imag() <= -std::numbers::pi) l.imag(std::numbers::pi);
  return l;
}

}  // namespace detail

/// Principal logarithm of an invertible element: u_f(k) = Log u_g(k).
inline Element log_el(const Element& g) {
  auto inv = invertible(g);
  if (!inv) throw error(inv.why());
  return Element(g.weight_ref(), ep_map(g.seq(), detail::principal_log));
}

/// sqrt(max(|log delta|, |log ||g|||)^2 + pi^2), a bound on ||log_el(g)||.
inline double log_norm_bound(double delta, double norm_g) {
  const double m = std::max(std::abs(std::log(delta)), std::abs(std::log(norm_g)));
  return std::sqrt(m * m + std::numbers::pi * std::numbers::pi);
}

}  // namespace hadamard
