#include "realcross/dressed.hpp"

#include <cmath>
#include <numbers>

#include "realcross/errors.hpp"
#include "realcross/quadrature.hpp"

namespace realcross {

namespace {

void require_nondegenerate(double delta, double omega, const char* what) {
  if (delta == 0.0 && omega == 0.0) {
    throw DegeneracyError(std::string(what) + ": Δ = Ω = 0 (exact level crossing)");
  }
}

}  // namespace

std::string ExtReal::to_string() const {
  switch (kind_) {
    case Kind::pos_inf:
      return "+inf";
    case Kind::neg_inf:
      return "-inf";
    default:
      return std::to_string(value_);
  }
}

ExtReal alpha_of(double delta, double omega) {
  require_nondegenerate(delta, omega, "alpha");
  if (omega == 0.0) return ExtReal::infinity_with_sign(delta);
  const double a = delta / omega;
  if (std::isinf(a)) return ExtReal::infinity_with_sign(a);
  return a;
}

double mixing_angle(ExtReal alpha) {
  switch (alpha.kind()) {
    case ExtReal::Kind::neg_inf:
      return 0.0;
    case ExtReal::Kind::pos_inf:
      return std::numbers::pi / 2.0;
    default:
      return std::numbers::pi / 4.0 + 0.5 * std::atan(alpha.value());
  }
}

Eigenvalues eigenvalues(double delta, double omega) {
  const double half = 0.5 * std::hypot(delta, omega);
  return {half, -half};
}

DressedStates dressed_states_from_angle(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {{c, s}, {s, -c}};
}

DressedStates dressed_states(double delta, double omega) {
  require_nondegenerate(delta, omega, "dressed_states");
  return dressed_states_from_angle(mixing_angle(alpha_of(delta, omega)));
}

double theta_dot(double delta, double omega, double delta_dot, double omega_dot) {
  require_nondegenerate(delta, omega, "theta_dot");
  return (delta_dot * omega - delta * omega_dot) / (2.0 * (delta * delta + omega * omega));
}

double eta(double delta, double omega, double delta_dot, double omega_dot) {
  require_nondegenerate(delta, omega, "eta");
  const double r = std::hypot(delta, omega);
  return std::abs(delta_dot * omega - delta * omega_dot) / (2.0 * r * r * r);
}

DressedSnapshot snapshot(const Schedule& schedule, double t, Side side) {
  const double d = schedule.delta(t);
  const double o = schedule.omega(t);
  const double dd = schedule.delta_dot(t, side);
  const double od = schedule.omega_dot(t, side);
  const auto ev = eigenvalues(d, o);
  return {t, mixing_angle(alpha_of(d, o)), ev.plus, ev.minus, theta_dot(d, o, dd, od), eta(d, o, dd, od)};
}

double adiabatic_phase(const Schedule& schedule, Branch k, double t1, double t2, double tol) {
  if (schedule.has_crossing_inside(t1, t2)) {
    throw DomainError("adiabatic_phase: a declared crossing lies inside the integration interval");
  }
  const double sign = k == Branch::plus ? 1.0 : -1.0;
  auto omega_plus = [&](double s) { return 0.5 * std::hypot(schedule.delta(s), schedule.omega(s)); };
  return sign * adaptive_simpson(omega_plus, t1, t2, tol);
}

}  // namespace realcross
