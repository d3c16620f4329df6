#pragma once

// Ideal-theoretic diagnostics: index orders, the Krull-dimension family,
// Noetherian/Artinian chain witnesses, annihilators, and the subsequence
// ideals I_k = {f : lim u_f(k_n) = 0}.
//
// Limits over infinitely many indices are not decidable from finitely many
// values. Those are reported as trajectories labelled horizon-certified;
// an exact verdict is only given where eventual periodicity settles it.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hadamard/algebra.hpp"

namespace hadamard {

/// m(f, k): length of the zero run of f^ starting at k.
struct index_order_report {
  index_t k;
  index_t m;      ///< run length; a lower bound when truncated
  bool infinite;  ///< the run never ends (decided exactly)
  bool truncated; ///< the run reaches the horizon; only horizon-certified
  certainty cert;
  index_t horizon;

  /// m as a real number, +inf when infinite.
  double value() const { return infinite ? std::numeric_limits<double>::infinity() : static_cast<double>(m); }
};

inline index_order_report index_order(const Element& f, index_t k, index_t horizon) {
  if (k > horizon) throw error(errc::bad_input, "k beyond horizon", k);
  if (f.exact()) {
    const EPSeq& u = f.seq();
    if (u.zero_from(k)) return {k, 0, true, false, certainty::exact, horizon};
    // a nonzero value occurs within one period past max(k, prefix)
    index_t n = k;
    while (u[n] == cplx{}) ++n;
    return {k, n - k, false, false, certainty::exact, horizon};
  }
  const index_t end = std::min(horizon, f.horizon());
  if (k > end) throw error(errc::horizon_exceeded, "k beyond the sequence horizon", k);
  for (index_t n = k; n <= end; ++n)
    if (f.u(n) != cplx{}) return {k, n - k, false, false, certainty::exact, horizon};
  return {k, end - k + 1, false, true, certainty::horizon, horizon};
}

namespace detail {

inline index_t sat_pow(index_t base, unsigned e) {
  index_t r = 1;
  for (unsigned i = 0; i < e; ++i) {
    if (base != 0 && r > std::numeric_limits<index_t>::max() / base) return std::numeric_limits<index_t>::max();
    r *= base;
  }
  return r;
}

// True iff m lies in some block [2^k, 2^k + k^(n+1)].
inline bool in_krull_block(index_t m, unsigned n) {
  for (unsigned k = 0; k < 64 && (index_t{1} << k) <= m; ++k)
    if (m - (index_t{1} << k) <= sat_pow(k, n + 1)) return true;
  return false;
}

}  // namespace detail

/// f_n with u(m) = 0 on the blocks a_k + l, 0 <= l <= k^(n+1), a_k = 2^k, and 1 elsewhere.
inline Element krull_family(WeightRef w, unsigned n, index_t horizon) {
  if (n < 1) throw error(errc::bad_input, "n must be positive");
  if (horizon < 4) throw error(errc::bad_input, "horizon must be at least 4");
  return Element(std::move(w),
                 GenSeq([n](index_t m) { return detail::in_krull_block(m, n) ? cplx{} : cplx{1.0}; }, horizon, 1.0));
}

struct trajectory_point {
  unsigned k;
  index_t a_k;
  index_order_report order;
  double ratio;  ///< m(f, a_k) / k^n, +inf for an unbounded run, a lower bound when truncated
};

/// m(f, a_k) / k^n for every k >= 1 with 2^k <= horizon. Advisory only.
inline std::vector<trajectory_point> growth_trajectory(const Element& f, unsigned n, index_t horizon) {
  if (n < 1) throw error(errc::bad_input, "n must be positive");
  std::vector<trajectory_point> out;
  for (unsigned k = 1; k < 64 && (index_t{1} << k) <= horizon; ++k) {
    const index_t a = index_t{1} << k;
    if (!f.exact() && a > f.horizon()) break;
    const auto rep = index_order(f, a, horizon);
    out.push_back({k, a, rep, rep.value() / std::pow(static_cast<double>(k), static_cast<double>(n))});
  }
  return out;
}

struct p1_p2_report {
  index_order_report f, g, sum, prod;
  bool p1;  ///< m(f+g, k) >= min(m(f,k), m(g,k))
  bool p2;  ///< m(f*g, k) >= max(m(f,k), m(g,k))
  bool holds() const { return p1 && p2; }
};

inline p1_p2_report p1_p2_check(const Element& f, const Element& g, index_t k, index_t horizon) {
  p1_p2_report r{index_order(f, k, horizon), index_order(g, k, horizon), index_order(f + g, k, horizon),
                 index_order(star(f, g), k, horizon), false, false};
  r.p1 = r.sum.value() >= std::min(r.f.value(), r.g.value());
  r.p2 = r.prod.value() >= std::max(r.f.value(), r.g.value());
  return r;
}

/// chi with u_chi = 1 exactly where u_f = 0; generates ker(h -> f * h).
inline Element annihilator_generator(const Element& f) {
  return Element(f.weight_ref(), ep_map(f.seq(), [](cplx v) { return v == cplx{} ? cplx{1.0} : cplx{}; }));
}

enum class chain_kind { noetherian, artinian };

inline std::string_view to_string(chain_kind k) { return k == chain_kind::noetherian ? "noetherian" : "artinian"; }

struct chain_check {
  std::string claim;
  bool pass;
};

struct chain_report {
  chain_kind kind;
  unsigned n;
  Element witness;
  std::vector<chain_check> checks;
  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const chain_check& c) { return c.pass; });
  }
};

/// Witness that the ideal chain does not stabilize at n.
///   noetherian: I_m = {f^(k) = 0 for k >= m}, ascending; z^n in I_{n+1} \ I_n.
///   artinian:   I_m = {f^(k) = 0 for k <= m}, descending; z^(n+1) in I_n \ I_{n+1}.
inline chain_report chain_witness(chain_kind kind, unsigned n, WeightRef w) {
  if (n < 1) throw error(errc::bad_input, "n must be positive");
  const std::string N = std::to_string(n), N1 = std::to_string(n + 1);
  if (kind == chain_kind::noetherian) {
    Element f = monomial(w, n);
    const EPSeq& u = f.seq();
    return {kind, n, f,
            {{"coefficients vanish for k >= " + N1 + " (f in I_" + N1 + ")", u.zero_from(n + 1)},
             {"coefficient at k = " + N + " is nonzero (f not in I_" + N + ")", u[n] != cplx{}}}};
  }
  Element f = monomial(w, n + 1);
  const EPSeq& u = f.seq();
  bool low_zero = true;
  for (index_t k = 0; k <= n; ++k) low_zero = low_zero && u[k] == cplx{};
  return {kind, n, f,
          {{"coefficients vanish for k <= " + N + " (f in I_" + N + ")", low_zero},
           {"coefficient at k = " + N1 + " is nonzero (f not in I_" + N1 + ")", u[n + 1] != cplx{}}}};
}

enum class membership { in, not_in };

struct subsequence_trajectory {
  std::vector<double> values;  ///< |u_f(k_j)|
  std::optional<membership> verdict;
  certainty cert;
};

/// |u_f(k_j)| along ks. For an EPSeq, when every listed index at or past the
/// prefix falls in one residue class mod the period, the verdict is exact for
/// the subsequence continuing in that class: in I iff u vanishes there.
inline subsequence_trajectory nonfixed_ideal_trajectory(const Element& f, std::span<const index_t> ks) {
  for (std::size_t i = 1; i < ks.size(); ++i)
    if (ks[i] <= ks[i - 1]) throw error(errc::bad_input, "ks must be strictly increasing", ks[i]);
  subsequence_trajectory out{{}, std::nullopt, certainty::horizon};
  for (index_t k : ks) {
    if (k > f.horizon()) throw error(errc::horizon_exceeded, "index beyond horizon", k);
    out.values.push_back(std::abs(f.u(k)));
  }
  if (!f.exact() || ks.empty()) return out;
  const EPSeq& u = f.seq();
  std::optional<index_t> residue;
  for (index_t k : ks) {
    if (k < u.prefix_length()) continue;
    const index_t r = (k - u.prefix_length()) % u.period();
    if (residue && *residue != r) return out;
    residue = r;
  }
  if (!residue) return out;
  out.verdict = u.cycle()[*residue] == cplx{} ? membership::in : membership::not_in;
  out.cert = certainty::exact;
  return out;
}

/// Exact membership in I_k for the progression k_j = start + j * step.
/// The progression visits a fixed set of cycle residues from some j on, and
/// lim u(k_j) = 0 iff u vanishes on all of them.
inline membership nonfixed_ideal_progression(const Element& f, index_t start, index_t step) {
  if (step == 0) throw error(errc::bad_input, "step must be positive");
  const EPSeq& u = f.seq();
  const index_t P = u.prefix_length(), L = u.period();
  const index_t j0 = start >= P ? 0 : (P - start + step - 1) / step;
  const index_t first = start + j0 * step;
  const index_t visits = L / std::gcd(step, L);
  for (index_t j = 0; j < visits; ++j)
    if (u[first + j * step] != cplx{}) return membership::not_in;
  return membership::in;
}

}  // namespace hadamard
