#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace resil {

enum class Errc {
  invalid_argument,
  dimension_too_large,
  dimension_mismatch,
  not_boolean,
  out_of_range,
  parse_error,
  solver_failure,
  degenerate_high_part,
  fail_no_weight_one_point,
  budget_exhausted,
  resilience_mismatch,
  unbalanced_input,
  invariant_violation,
};

inline std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::dimension_too_large: return "dimension-too-large";
    case Errc::dimension_mismatch: return "dimension-mismatch";
    case Errc::not_boolean: return "not-boolean";
    case Errc::out_of_range: return "out-of-range";
    case Errc::parse_error: return "parse-error";
    case Errc::solver_failure: return "solver-failure";
    case Errc::degenerate_high_part: return "degenerate-high-part";
    case Errc::fail_no_weight_one_point: return "fail-no-weight-one-point";
    case Errc::budget_exhausted: return "budget-exhausted";
    case Errc::resilience_mismatch: return "resilience-mismatch";
    case Errc::unbalanced_input: return "unbalanced-input";
    case Errc::invariant_violation: return "invariant-violation";
  }
  return "unknown";
}

/// Every precondition failure in the library surfaces as this exception. The
/// code is stable and is what the CLI reports; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace resil
