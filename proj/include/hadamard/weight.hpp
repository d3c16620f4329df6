#pragma once

// Weight sequences p : N0 -> (0, inf) with lim p(n)^(1/n) = inf.
//
// The growth condition cannot be verified from finitely many values. It is
// trusted for the presets (factorial, super-exponential) and declared by the
// caller for custom weights. Monotonicity of p is never assumed.
//
// Values are held in log space; p(n) itself is only materialized on request.

#include <array>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hadamard/error.hpp"

namespace hadamard {

namespace detail {

inline std::string format_number(double x) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc{}) return std::to_string(x);
  return std::string(buf.data(), end);
}

// log(n!) by table for small n and Stirling's series beyond.
inline double log_factorial(index_t n) {
  static const std::vector<double> table = [] {
    std::vector<double> t(1025);
    t[0] = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] + std::log(static_cast<double>(i));
    return t;
  }();
  if (n < table.size()) return table[n];
  const double x = static_cast<double>(n) + 1.0;
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // log Gamma(x) for x > 1000, series truncated after the x^-7 term
  return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) +
         inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
}

inline const double log_max_double = std::log(std::numeric_limits<double>::max());

}  // namespace detail

enum class weight_kind { factorial, super_exp, custom };

/// Rules supplied by the caller for a custom weight. `log_p(n)` must be finite
/// for every n queried. `tail(N, r)` returns a T with sum_{n>N} r^n/p(n) <= T,
/// or nullopt when N is too small for the rule to certify.
struct custom_weight_rules {
  std::function<double(index_t)> log_p;
  std::function<std::optional<double>(index_t, double)> tail;
};

class Weight {
 public:
  static Weight factorial() { return Weight(weight_kind::factorial, "factorial"); }

  /// p(n) = base^(n^power), base > 1, power >= 2.
  static Weight super_exp(double base, double power) {
    if (!(base > 1.0) || !(power >= 2.0) || !std::isfinite(base) || !std::isfinite(power))
      throw error(errc::bad_input, "superexp requires b > 1 and q >= 2");
    Weight w(weight_kind::super_exp,
             "superexp:b=" + detail::format_number(base) + ",q=" + detail::format_number(power));
    w.base_ = base;
    w.power_ = power;
    w.log_base_ = std::log(base);
    return w;
  }

  static Weight custom(std::string id, custom_weight_rules rules) {
    if (!rules.log_p) throw error(errc::bad_input, "custom weight needs a log_p rule");
    Weight w(weight_kind::custom, "custom:" + id);
    w.rules_ = std::make_shared<const custom_weight_rules>(std::move(rules));
    return w;
  }

  weight_kind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }

  double log_p(index_t n) const {
    switch (kind_) {
      case weight_kind::factorial:
        return detail::log_factorial(n);
      case weight_kind::super_exp:
        return std::pow(static_cast<double>(n), power_) * log_base_;
      case weight_kind::custom: {
        const double v = rules_->log_p(n);
        if (!std::isfinite(v)) throw error(errc::bad_input, "custom weight log_p not finite", n);
        return v;
      }
    }
    return 0.0;
  }

  /// p(n) as a double. Factorial is an exact running product up to 22! and
  /// correctly rounded per step beyond; super_exp uses std::pow.
  double p(index_t n) const {
    if (log_p(n) > detail::log_max_double)
      throw error(errc::overflow_at_index, "p(n) exceeds the double range; use log_p", n);
    switch (kind_) {
      case weight_kind::factorial: {
        double v = 1.0;
        for (index_t k = 2; k <= n; ++k) v *= static_cast<double>(k);
        return v;
      }
      case weight_kind::super_exp:
        return std::pow(base_, std::pow(static_cast<double>(n), power_));
      case weight_kind::custom:
        return std::exp(log_p(n));
    }
    return 1.0;
  }

  /// p(n-1)/p(n), n >= 1, computed from log values.
  double step_ratio(index_t n) const { return std::exp(log_p(n - 1) - log_p(n)); }

  /// T with sum_{n > N} r^n / p(n) <= T, or nullopt when N is below the
  /// threshold from which the weight's tail rule applies for this r.
  std::optional<double> try_tail_bound(index_t N, double r) const {
    if (r < 0.0 || !std::isfinite(r)) throw error(errc::bad_input, "radius must be finite and >= 0");
    if (r == 0.0) return 0.0;
    switch (kind_) {
      case weight_kind::factorial: {
        // successive term ratios beyond N+1 are r/(n+1) <= r/(N+2)
        if (r / static_cast<double>(N + 2) > 0.5) return std::nullopt;
        return 2.0 * std::exp(static_cast<double>(N + 1) * std::log(r) - detail::log_factorial(N + 1));
      }
      case weight_kind::super_exp: {
        // term ratio r * b^(n^q - (n+1)^q) decreases in n
        const double n1 = static_cast<double>(N + 1);
        const double gap = std::pow(n1 + 1.0, power_) - std::pow(n1, power_);
        if (std::log(r) - gap * log_base_ > -std::numbers::ln2) return std::nullopt;
        return 2.0 * std::exp(n1 * std::log(r) - log_p(N + 1));
      }
      case weight_kind::custom:
        if (!rules_->tail) return std::nullopt;
        return rules_->tail(N, r);
    }
    return std::nullopt;
  }

  double tail_bound(index_t N, double r) const {
    if (auto t = try_tail_bound(N, r)) return *t;
    throw error(errc::bound_unavailable,
                "no certified tail bound for '" + name_ + "' at this N; raise N", N);
  }

  /// Smallest n0 with p(n+1)/p(n) >= 2 for all n >= n0 (presets only).
  std::optional<index_t> doubling_threshold() const {
    switch (kind_) {
      case weight_kind::factorial:
        return 1;
      case weight_kind::super_exp: {
        index_t n = 0;
        while ((std::pow(static_cast<double>(n + 1), power_) - std::pow(static_cast<double>(n), power_)) *
                   log_base_ < std::numbers::ln2)
          ++n;
        return n;
      }
      case weight_kind::custom:
        return std::nullopt;
    }
    return std::nullopt;
  }

  friend bool operator==(const Weight& a, const Weight& b) { return a.name_ == b.name_; }

 private:
  Weight(weight_kind k, std::string name) : kind_(k), name_(std::move(name)) {}

  weight_kind kind_;
  std::string name_;
  double base_ = 0.0;
  double power_ = 0.0;
  double log_base_ = 0.0;
  std::shared_ptr<const custom_weight_rules> rules_;
};

using WeightRef = std::shared_ptr<const Weight>;

inline WeightRef make_weight(Weight w) { return std::make_shared<const Weight>(std::move(w)); }

/// Custom weights by id, so documents can refer to "custom:<id>".
class weight_registry {
 public:
  static weight_registry& global() {
    static weight_registry r;
    return r;
  }

  void add(const std::string& id, custom_weight_rules rules) {
    std::lock_guard lock(mutex_);
    custom_[id] = make_weight(Weight::custom(id, std::move(rules)));
  }

  WeightRef find(const std::string& id) const {
    std::lock_guard lock(mutex_);
    auto it = custom_.find(id);
    return it == custom_.end() ? nullptr : it->second;
  }

  std::vector<std::string> ids() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [k, v] : custom_) out.push_back(k);
    return out;
  }

 private:
  mutable std::mutex mutex_;
  std::map<std::string, WeightRef> custom_;
};

/// Parse "factorial", "superexp:b=<b>,q=<q>" or "custom:<id>".
inline WeightRef parse_weight(std::string_view name,
                              const weight_registry& registry = weight_registry::global()) {
  if (name == "factorial") return make_weight(Weight::factorial());
  if (name.starts_with("custom:")) {
    auto w = registry.find(std::string(name.substr(7)));
    if (!w) throw error(errc::bad_input, "unknown custom weight '" + std::string(name) + "'");
    return w;
  }
  if (name.starts_with("superexp")) {
    double b = 2.0, q = 2.0;
    std::string_view rest = name.substr(8);
    if (!rest.empty()) {
      if (rest.front() != ':') throw error(errc::bad_input, "bad weight name '" + std::string(name) + "'");
      rest.remove_prefix(1);
      while (!rest.empty()) {
        auto comma = rest.find(',');
        auto item = rest.substr(0, comma);
        auto eq = item.find('=');
        if (eq == std::string_view::npos)
          throw error(errc::bad_input, "bad weight parameter '" + std::string(item) + "'");
        auto key = item.substr(0, eq);
        auto val = item.substr(eq + 1);
        double v = 0.0;
        auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
        if (ec != std::errc{} || p != val.data() + val.size())
          throw error(errc::bad_input, "bad number in weight '" + std::string(name) + "'");
        if (key == "b") b = v;
        else if (key == "q") q = v;
        else throw error(errc::bad_input, "unknown weight parameter '" + std::string(key) + "'");
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
    }
    return make_weight(Weight::super_exp(b, q));
  }
  throw error(errc::bad_input, "unknown weight '" + std::string(name) + "'");
}

}  // namespace hadamard
