#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>
#include <complex>

namespace hadamard {

using index_t = std::uint64_t;
using cplx = std::complex<double>;

enum class errc {
  // infrastructure / input
  overflow_at_index,
  bound_unavailable,
  pointwise_domain,
  horizon_exceeded,
  horizon_certified_only,
  weight_mismatch,
  dimension_mismatch,
  bad_mask,
  bad_input,
  // mathematical conditions (the criterion being decided is false)
  not_invertible,
  not_divisible,
  not_in_ideal,
  corona_fails,
  inconsistent,
  precondition_failed,
  not_in_gl,
  not_sl,
  spectrum_hit,
  // numerical failures
  quadrature_disagreement,
  subdivision_overflow,
  numerical_failure,
};

inline std::string_view to_string(errc e) {
  switch (e) {
    case errc::overflow_at_index: return "OverflowAtIndex";
    case errc::bound_unavailable: return "BoundUnavailable";
    case errc::pointwise_domain: return "PointwiseDomainError";
    case errc::horizon_exceeded: return "HorizonExceeded";
    case errc::horizon_certified_only: return "HorizonCertifiedOnly";
    case errc::weight_mismatch: return "WeightMismatch";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::bad_mask: return "BadMask";
    case errc::bad_input: return "BadInput";
    case errc::not_invertible: return "NotInvertible";
    case errc::not_divisible: return "NotDivisible";
    case errc::not_in_ideal: return "NotInIdeal";
    case errc::corona_fails: return "CoronaFails";
    case errc::inconsistent: return "Inconsistent";
    case errc::precondition_failed: return "PreconditionFailed";
    case errc::not_in_gl: return "NotInGL";
    case errc::not_sl: return "NotSL";
    case errc::spectrum_hit: return "SpectrumHit";
    case errc::quadrature_disagreement: return "QuadratureDisagreement";
    case errc::subdivision_overflow: return "SubdivisionOverflow";
    case errc::numerical_failure: return "NumericalFailure";
  }
  return "Unknown";
}

/// True for errors meaning "the mathematical condition does not hold".
inline bool is_condition_failure(errc e) {
  switch (e) {
    case errc::not_invertible:
    case errc::not_divisible:
    case errc::not_in_ideal:
    case errc::corona_fails:
    case errc::inconsistent:
    case errc::precondition_failed:
    case errc::not_in_gl:
    case errc::not_sl:
    case errc::spectrum_hit:
      return true;
    default:
      return false;
  }
}

inline bool is_numerical_failure(errc e) {
  return e == errc::quadrature_disagreement || e == errc::subdivision_overflow ||
         e == errc::numerical_failure || e == errc::overflow_at_index ||
         e == errc::bound_unavailable;
}

/// Why a decision failed, with the coefficient position that witnesses it.
/// `vector` carries a certifying vector where one exists (left null vector
/// for inconsistent linear systems).
struct failure {
  errc code;
  std::optional<index_t> index;
  std::string message;
  std::vector<cplx> vector;
};

class error : public std::runtime_error {
 public:
  explicit error(failure f)
      : std::runtime_error(describe(f)), failure_(std::move(f)) {}
  error(errc code, std::string message, std::optional<index_t> index = std::nullopt)
      : error(failure{code, index, std::move(message), {}}) {}

  errc code() const noexcept { return failure_.code; }
  const std::optional<index_t>& index() const noexcept { return failure_.index; }
  const failure& details() const noexcept { return failure_; }

 private:
  static std::string describe(const failure& f) {
    std::string s{to_string(f.code)};
    if (f.index) s += " at index " + std::to_string(*f.index);
    if (!f.message.empty()) s += ": " + f.message;
    return s;
  }
  failure failure_;
};

/// Either a value or the failure of the decided condition.
template <class T>
class outcome {
 public:
  outcome(T value) : state_(std::move(value)) {}
  outcome(failure f) : state_(std::move(f)) {}

  bool ok() const noexcept { return state_.index() == 0; }
  explicit operator bool() const noexcept { return ok(); }

  const T& value() const& {
    if (!ok()) throw error(std::get<1>(state_));
    return std::get<0>(state_);
  }
  T&& value() && {
    if (!ok()) throw error(std::get<1>(state_));
    return std::get<0>(std::move(state_));
  }
  const T& operator*() const& { return value(); }
  const T* operator->() const { return &value(); }

  const failure& why() const {
    if (ok()) throw std::logic_error("outcome holds a value");
    return std::get<1>(state_);
  }

 private:
  std::variant<T, failure> state_;
};

}  // namespace hadamard
