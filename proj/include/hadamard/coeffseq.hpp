#pragma once

// Coefficient sequences in normalized coordinates.
//
// EPSeq is an eventually periodic complex sequence: an explicit prefix followed
// by a cycle repeated forever. The class is closed under every pointwise
// operation, so sup/inf/zero-pattern questions are decided exactly by looking
// at prefix and one period.
//
// GenSeq is a rule with a finite horizon and a declared global bound. Anything
// derived from a GenSeq is only horizon-certified.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "hadamard/error.hpp"

namespace hadamard {

/// Largest period produced by combining sequences before giving up.
inline constexpr index_t max_joint_period = index_t{1} << 22;

namespace detail {

inline cplx normalize_zero(cplx z) {
  // -0.0 and +0.0 compare equal but differ in bits; canonical form keeps +0.0
  return {z.real() == 0.0 ? 0.0 : z.real(), z.imag() == 0.0 ? 0.0 : z.imag()};
}

inline bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace detail

class EPSeq {
 public:
  EPSeq() : cycle_{cplx{0.0, 0.0}} {}

  EPSeq(std::vector<cplx> prefix, std::vector<cplx> cycle)
      : prefix_(std::move(prefix)), cycle_(std::move(cycle)) {
    if (cycle_.empty()) throw error(errc::bad_input, "EPSeq cycle must be nonempty");
    for (std::size_t i = 0; i < prefix_.size(); ++i) {
      if (!detail::finite(prefix_[i])) throw error(errc::bad_input, "non-finite prefix value", i);
      prefix_[i] = detail::normalize_zero(prefix_[i]);
    }
    for (auto& c : cycle_) {
      if (!detail::finite(c)) throw error(errc::bad_input, "non-finite cycle value");
      c = detail::normalize_zero(c);
    }
    canonicalize();
  }

  static EPSeq constant(cplx c) { return EPSeq({}, {c}); }
  static EPSeq zero() { return EPSeq(); }

  const std::vector<cplx>& prefix() const noexcept { return prefix_; }
  const std::vector<cplx>& cycle() const noexcept { return cycle_; }
  index_t prefix_length() const noexcept { return prefix_.size(); }
  index_t period() const noexcept { return cycle_.size(); }

  cplx operator[](index_t n) const {
    if (n < prefix_.size()) return prefix_[n];
    return cycle_[(n - prefix_.size()) % cycle_.size()];
  }
  cplx value(index_t n) const { return (*this)[n]; }

  /// True iff the value is zero at every index from `from` on.
  bool zero_from(index_t from) const {
    for (index_t n = from; n < prefix_.size(); ++n)
      if (prefix_[n] != cplx{}) return false;
    return std::all_of(cycle_.begin(), cycle_.end(), [](cplx c) { return c == cplx{}; });
  }

  friend bool operator==(const EPSeq&, const EPSeq&) = default;

 private:
  void canonicalize() {
    // shortest period: smallest divisor d of L with cycle d-periodic
    const std::size_t len = cycle_.size();
    for (std::size_t d = 1; d < len; ++d) {
      if (len % d != 0) continue;
      bool periodic = true;
      for (std::size_t i = d; i < len && periodic; ++i) periodic = cycle_[i] == cycle_[i - d];
      if (periodic) {
        cycle_.resize(d);
        break;
      }
    }
    // absorb prefix entries equal to the cycle value they shadow
    while (!prefix_.empty() && prefix_.back() == cycle_.back()) {
      prefix_.pop_back();
      std::rotate(cycle_.rbegin(), cycle_.rbegin() + 1, cycle_.rend());
    }
  }

  std::vector<cplx> prefix_;
  std::vector<cplx> cycle_;
};

/// Prefix length and period covering several sequences at once: every one of
/// them is periodic with period `period` from index `prefix` on.
struct joint_window {
  index_t prefix = 0;
  index_t period = 1;

  index_t end() const noexcept { return prefix + period; }
};

inline joint_window window_of(std::span<const EPSeq* const> seqs) {
  joint_window w;
  for (const EPSeq* s : seqs) {
    w.prefix = std::max(w.prefix, s->prefix_length());
    w.period = std::lcm(w.period, s->period());
    if (w.period > max_joint_period)
      throw error(errc::numerical_failure, "joint period exceeds " + std::to_string(max_joint_period));
  }
  return w;
}

inline joint_window window_of(const EPSeq& a) {
  const EPSeq* p[] = {&a};
  return window_of(p);
}

inline joint_window window_of(const EPSeq& a, const EPSeq& b) {
  const EPSeq* p[] = {&a, &b};
  return window_of(p);
}

/// Build an EPSeq from the values on a joint window.
inline EPSeq from_window(const joint_window& w, std::span<const cplx> values) {
  if (values.size() != w.end()) throw error(errc::bad_input, "window value count mismatch");
  return EPSeq(std::vector<cplx>(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(w.prefix)),
               std::vector<cplx>(values.begin() + static_cast<std::ptrdiff_t>(w.prefix), values.end()));
}

/// Pointwise n-ary combination; `op` sees the values of all inputs at one index.
/// A non-finite result is a domain violation at that index.
template <class Op>
EPSeq ep_combine(std::span<const EPSeq* const> seqs, Op&& op) {
  const joint_window w = window_of(seqs);
  std::vector<cplx> args(seqs.size());
  std::vector<cplx> out(w.end());
  for (index_t n = 0; n < w.end(); ++n) {
    for (std::size_t i = 0; i < seqs.size(); ++i) args[i] = (*seqs[i])[n];
    const cplx v = op(std::span<const cplx>(args));
    if (!detail::finite(v)) throw error(errc::pointwise_domain, "operation undefined", n);
    out[n] = v;
  }
  return from_window(w, out);
}

template <class Op>
EPSeq ep_zip(const EPSeq& a, const EPSeq& b, Op&& op) {
  const EPSeq* p[] = {&a, &b};
  return ep_combine(p, [&](std::span<const cplx> v) { return op(v[0], v[1]); });
}

template <class Op>
EPSeq ep_map(const EPSeq& a, Op&& op) {
  const EPSeq* p[] = {&a};
  return ep_combine(p, [&](std::span<const cplx> v) { return op(v[0]); });
}

inline double sup_abs(const EPSeq& a) {
  double s = 0.0;
  for (cplx c : a.prefix()) s = std::max(s, std::abs(c));
  for (cplx c : a.cycle()) s = std::max(s, std::abs(c));
  return s;
}

inline double inf_abs(const EPSeq& a) {
  double s = std::numeric_limits<double>::infinity();
  for (cplx c : a.prefix()) s = std::min(s, std::abs(c));
  for (cplx c : a.cycle()) s = std::min(s, std::abs(c));
  return s;
}

/// Sequence given by a rule, trusted on [0, horizon], with a declared bound
/// |rule(n)| <= bound for all n.
class GenSeq {
 public:
  using rule_type = std::function<cplx(index_t)>;

  GenSeq(rule_type rule, index_t horizon, double bound)
      : rule_(std::move(rule)), horizon_(horizon), bound_(bound) {
    if (!rule_) throw error(errc::bad_input, "GenSeq needs a rule");
    if (!(bound >= 0.0)) throw error(errc::bad_input, "GenSeq bound must be >= 0");
  }

  index_t horizon() const noexcept { return horizon_; }
  double certified_bound() const noexcept { return bound_; }

  cplx operator[](index_t n) const {
    if (n > horizon_) throw error(errc::horizon_exceeded, "index beyond horizon", n);
    return rule_(n);
  }

  /// Spot check of the declared bound on [0, min(horizon, upto)].
  bool bound_holds(index_t upto) const {
    for (index_t n = 0; n <= std::min(horizon_, upto); ++n)
      if (std::abs(rule_(n)) > bound_) return false;
    return true;
  }

  const rule_type& rule() const noexcept { return rule_; }

 private:
  rule_type rule_;
  index_t horizon_;
  double bound_;
};

/// rule(lo..hi) inclusive.
inline std::vector<cplx> gen_window(const GenSeq& g, index_t lo, index_t hi) {
  if (lo > hi) throw error(errc::bad_input, "empty window: lo > hi", lo);
  if (hi > g.horizon()) throw error(errc::horizon_exceeded, "window end beyond horizon", hi);
  std::vector<cplx> out;
  out.reserve(hi - lo + 1);
  for (index_t n = lo; n <= hi; ++n) out.push_back(g[n]);
  return out;
}

}  // namespace hadamard
