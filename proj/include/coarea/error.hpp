#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace coarea {

enum class Errc {
  invalid_argument,
  point_outside_domain,
  gradient_undefined,
  ode_blow_up,
  level_outside_image,
  empty_intersection,
  no_closed_form,
  critical_value,
  no_parametrization,
  resolution_too_coarse,
  empty_epsilon_set,
  non_dyadic_member,
  zero_sparse_nonzero_lhs,
  no_density_method,
  insufficient_decades,
  atomic_pushforward,
  phase_not_uniform,
  config_invalid,
};

constexpr std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::point_outside_domain: return "point-outside-domain";
    case Errc::gradient_undefined: return "gradient-undefined-at-point";
    case Errc::ode_blow_up: return "ode-blow-up";
    case Errc::level_outside_image: return "level-outside-image";
    case Errc::empty_intersection: return "empty-intersection";
    case Errc::no_closed_form: return "no-closed-form";
    case Errc::critical_value: return "critical-value";
    case Errc::no_parametrization: return "no-parametrization";
    case Errc::resolution_too_coarse: return "resolution-too-coarse";
    case Errc::empty_epsilon_set: return "empty-epsilon-set";
    case Errc::non_dyadic_member: return "non-dyadic-member";
    case Errc::zero_sparse_nonzero_lhs: return "zero-sparse-nonzero-lhs";
    case Errc::no_density_method: return "no-density-method";
    case Errc::insufficient_decades: return "insufficient-decades";
    case Errc::atomic_pushforward: return "atomic-pushforward";
    case Errc::phase_not_uniform: return "phase-not-uniform";
    case Errc::config_invalid: return "config-invalid";
  }
  return "unknown";
}

/// Library error: a machine-readable code plus a human message.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, Errc code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace coarea
