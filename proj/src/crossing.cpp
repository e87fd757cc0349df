#include "realcross/crossing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "realcross/dressed.hpp"
#include "realcross/errors.hpp"
#include "realcross/format.hpp"
#include "realcross/quadrature.hpp"

namespace realcross {

namespace {

constexpr double kDivergence = 1e6;
// Fitted exponents closer than this are treated as equal.
constexpr double kFittedExponentTol = 1e-2;

bool is_tabulated(const PulseShape& p) { return p.get_if<shape::Tabulated>() != nullptr; }

bool involves_tabulated(const Schedule& s) { return is_tabulated(s.delta_shape()) || is_tabulated(s.omega_shape()); }

void require_declared(const Schedule& schedule, double t_c) {
  const double slack = 1e-12 * schedule.duration();
  const auto& xs = schedule.crossings();
  if (std::none_of(xs.begin(), xs.end(), [&](double x) { return std::abs(x - t_c) <= slack; })) {
    throw PreconditionError("t_c=" + format_number(t_c) + " is not a declared crossing of the schedule");
  }
}

double sgn(double x) { return x < 0.0 ? -1.0 : 1.0; }

ExtReal classify_magnitude(double a) {
  if (std::abs(a) > kDivergence) return ExtReal::infinity_with_sign(a);
  return a;
}

// Richardson extrapolation of α(t_c + s·ε₀·2⁻ᵏ) to ε → 0, assuming an
// expansion in integer powers of ε.
ExtReal extrapolate_alpha(const Schedule& schedule, double t_c, Side side) {
  const double s = side_sign(side);
  const double room = side == Side::plus ? schedule.t_end() - t_c : t_c - schedule.t_start();
  double eps = std::min(0.25 * room, 0.1 * schedule.duration());
  constexpr int kLevels = 12;
  std::array<std::array<double, kLevels>, kLevels> table{};
  double best = std::numeric_limits<double>::quiet_NaN();
  for (int k = 0; k < kLevels; ++k, eps *= 0.5) {
    const double t = t_c + s * eps;
    table[k][0] = alpha_of(schedule.delta(t), schedule.omega(t)).value();
    if (!std::isfinite(table[k][0])) return ExtReal::infinity_with_sign(table[k][0]);
    double factor = 1.0;
    for (int j = 1; j <= k; ++j) {
      factor *= 2.0;
      table[k][j] = table[k][j - 1] + (table[k][j - 1] - table[k - 1][j - 1]) / (factor - 1.0);
    }
    if (k >= 2) {
      const double prev = table[k - 1][k - 1];
      const double cur = table[k][k];
      best = cur;
      if (std::abs(cur - prev) <= 1e-10 * std::max(1.0, std::abs(cur))) break;
    }
  }
  if (!std::isfinite(best)) throw ClassificationError("alpha limit: Richardson extrapolation failed");
  return classify_magnitude(best);
}

}  // namespace

std::string to_string(AdiabaticVerdict v) {
  switch (v) {
    case AdiabaticVerdict::adiabatic_by_a:
      return "adiabatic_by_a";
    case AdiabaticVerdict::adiabatic_by_b:
      return "adiabatic_by_b";
    default:
      return "not_guaranteed";
  }
}

AdiabaticVerdict verdict_for(double a, double b) {
  if (a > 2.0 * b + 1.0) return AdiabaticVerdict::adiabatic_by_a;
  if (b > 2.0 * a + 1.0) return AdiabaticVerdict::adiabatic_by_b;
  return AdiabaticVerdict::not_guaranteed;
}

std::optional<double> predicted_eta_exponent(double a, double b) {
  if (a > b) return a - 2.0 * b - 1.0;
  if (b > a) return b - 2.0 * a - 1.0;
  return std::nullopt;
}

ExtReal alpha_limit(const Schedule& schedule, double t_c, Side side) {
  require_declared(schedule, t_c);
  const LeadingOrder d = leading_order(schedule.delta_shape(), t_c, side);
  const LeadingOrder o = leading_order(schedule.omega_shape(), t_c, side);
  if (d.identically_zero() && o.identically_zero()) {
    throw ClassificationError("alpha limit: Δ and Ω both vanish identically next to t_c");
  }
  if (d.identically_zero()) return 0.0;
  if (o.identically_zero()) return ExtReal::infinity_with_sign(d.coefficient);

  const bool fitted = involves_tabulated(schedule);
  const double gap = d.exponent - o.exponent;
  const double same = fitted ? kFittedExponentTol : 0.0;
  if (gap > same) return 0.0;
  if (gap < -same) return ExtReal::infinity_with_sign(sgn(d.coefficient) * sgn(o.coefficient));
  if (fitted) return extrapolate_alpha(schedule, t_c, side);
  return classify_magnitude(d.coefficient / o.coefficient);
}

ExponentClassification classify_exponents(const Schedule& schedule, double t_c) {
  require_declared(schedule, t_c);
  const auto& ds = schedule.delta_shape();
  const auto& os = schedule.omega_shape();
  const double a_l = leading_order(ds, t_c, Side::minus).exponent;
  const double a_r = leading_order(ds, t_c, Side::plus).exponent;
  const double b_l = leading_order(os, t_c, Side::minus).exponent;
  const double b_r = leading_order(os, t_c, Side::plus).exponent;

  ExponentClassification c;
  c.a = std::max(a_l, a_r);
  c.b = std::max(b_l, b_r);
  if (std::isinf(c.a) && std::isinf(c.b)) {
    throw ClassificationError("classify_exponents: Δ and Ω both vanish identically at t_c");
  }
  const double tol = involves_tabulated(schedule) ? kFittedExponentTol : 0.0;
  c.asymmetric = std::abs(a_l - a_r) > tol || std::abs(b_l - b_r) > tol;
  c.same_order = std::abs(c.a - c.b) <= tol;
  c.verdict_left = verdict_for(a_l, b_l);
  c.verdict_right = verdict_for(a_r, b_r);
  c.verdict = c.same_order ? AdiabaticVerdict::not_guaranteed : verdict_for(c.a, c.b);
  if (!c.same_order) c.eta_exponent = predicted_eta_exponent(c.a, c.b);
  return c;
}

CrossingReport theta_jump(const Schedule& schedule, double t_c) {
  CrossingReport r;
  r.t_c = t_c;
  r.alpha_left = alpha_limit(schedule, t_c, Side::minus);
  r.alpha_right = alpha_limit(schedule, t_c, Side::plus);
  r.theta_left = mixing_angle(r.alpha_left);
  r.theta_right = mixing_angle(r.alpha_right);
  r.jump = r.theta_right - r.theta_left;
  const double s = std::sin(r.jump);
  r.predicted_transition = s * s;
  r.predicted_survival = 1.0 - r.predicted_transition;

  const auto before = dressed_states_from_angle(r.theta_left);
  const auto after = dressed_states_from_angle(r.theta_right);
  auto dot = [](const RealPair& x, const RealPair& y) { return x[0] * y[0] + x[1] * y[1]; };
  r.overlap = {{{dot(after.plus, before.plus), dot(after.plus, before.minus)},
                {dot(after.minus, before.plus), dot(after.minus, before.minus)}}};
  const auto& m = r.overlap;
  const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  const double off = m[0][0] * m[0][1] + m[1][0] * m[1][1];
  if (std::abs(det - 1.0) > 1e-13 || std::abs(off) > 1e-13) {
    throw ClassificationError("theta_jump: reconstructed overlap matrix is not a rotation");
  }

  const auto& ds = schedule.delta_shape();
  const auto& os = schedule.omega_shape();
  r.delta_left = leading_order(ds, t_c, Side::minus);
  r.delta_right = leading_order(ds, t_c, Side::plus);
  r.omega_left = leading_order(os, t_c, Side::minus);
  r.omega_right = leading_order(os, t_c, Side::plus);
  r.classification = classify_exponents(schedule, t_c);
  return r;
}

AroundCrossing around_crossing_efficiency(const Schedule& schedule, double t_c, double tau, double quad_tol) {
  if (!(tau > 0.0)) throw PreconditionError("around_crossing_efficiency: tau must be > 0");
  if (t_c - tau < schedule.t_start() || t_c + tau > schedule.t_end()) {
    throw PreconditionError("around_crossing_efficiency: [t_c - tau, t_c + tau] leaves the schedule window");
  }
  const double bound = 1e-9 * schedule.energy_scale();
  constexpr int kCheckPoints = 101;
  for (int i = 1; i < kCheckPoints; ++i) {
    const double s = tau * i / (kCheckPoints - 1);
    if (std::abs(schedule.delta(t_c + s) + schedule.delta(t_c - s)) > bound) {
      throw PreconditionError("around_crossing_efficiency: Δ is not odd about t_c");
    }
  }

  AroundCrossing out;
  try {
    out.theta_minus = mixing_angle(alpha_of(schedule.delta(t_c - tau), schedule.omega(t_c - tau)));
    out.theta_plus = mixing_angle(alpha_of(schedule.delta(t_c + tau), schedule.omega(t_c + tau)));
  } catch (const DegeneracyError&) {
    throw PreconditionError("around_crossing_efficiency: θ(t_c ± tau) undefined (Δ = Ω = 0)");
  }
  auto omega = [&](double t) { return schedule.omega(t); };
  // Split at t_c where many couplings have a kink.
  out.xi = adaptive_simpson(omega, t_c - tau, t_c, 0.5 * quad_tol) +
           adaptive_simpson(omega, t_c, t_c + tau, 0.5 * quad_tol);

  const double c = std::cos(0.5 * out.xi);
  const double s = std::sin(0.5 * out.xi);
  const double diff = std::cos(out.theta_plus - out.theta_minus);
  const double sum = std::sin(out.theta_plus + out.theta_minus);
  out.efficiency = c * c * diff * diff + s * s * sum * sum;
  return out;
}

nlohmann::json ext_real_to_json(const ExtReal& x) {
  switch (x.kind()) {
    case ExtReal::Kind::pos_inf:
      return "+inf";
    case ExtReal::Kind::neg_inf:
      return "-inf";
    default:
      return {{"finite", x.value()}};
  }
}

ExtReal ext_real_from_json(const nlohmann::json& j) {
  if (j == "+inf") return ExtReal::plus_infinity();
  if (j == "-inf") return ExtReal::minus_infinity();
  if (j.is_object() && j.contains("finite") && j.at("finite").is_number()) return j.at("finite").get<double>();
  throw ConfigError("extended real must be {\"finite\": x}, \"+inf\" or \"-inf\"");
}

namespace {

nlohmann::json exponent_json(double p) {
  if (std::isinf(p)) return "+inf";
  return p;
}

nlohmann::json order_json(const LeadingOrder& l, const LeadingOrder& r) {
  return {{"exponent_left", exponent_json(l.exponent)},
          {"exponent_right", exponent_json(r.exponent)},
          {"coefficient_left", l.coefficient},
          {"coefficient_right", r.coefficient}};
}

}  // namespace

nlohmann::json report_to_json(const CrossingReport& r) {
  const auto& c = r.classification;
  nlohmann::json eta_exp = nullptr;
  if (c.eta_exponent) eta_exp = exponent_json(*c.eta_exponent);
  return {
      {"t_c", r.t_c},
      {"alpha_left", ext_real_to_json(r.alpha_left)},
      {"alpha_right", ext_real_to_json(r.alpha_right)},
      {"theta_left", r.theta_left},
      {"theta_right", r.theta_right},
      {"Theta", r.jump},
      {"predicted_survival", r.predicted_survival},
      {"predicted_transition", r.predicted_transition},
      {"overlap", r.overlap},
      {"exponents",
       {{"a", exponent_json(c.a)},
        {"A_left", r.delta_left.coefficient},
        {"A_right", r.delta_right.coefficient},
        {"b", exponent_json(c.b)},
        {"B_left", r.omega_left.coefficient},
        {"B_right", r.omega_right.coefficient},
        {"delta", order_json(r.delta_left, r.delta_right)},
        {"omega", order_json(r.omega_left, r.omega_right)}}},
      {"crossing_adiabatic", to_string(c.verdict)},
      {"crossing_adiabatic_left", to_string(c.verdict_left)},
      {"crossing_adiabatic_right", to_string(c.verdict_right)},
      {"eta_exponent", eta_exp},
      {"same_order", c.same_order},
      {"asymmetric", c.asymmetric},
  };
}

}  // namespace realcross
