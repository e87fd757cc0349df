#include "realcross/pulses.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "realcross/errors.hpp"

namespace realcross {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

void require_finite(double x, const char* field) {
  if (!std::isfinite(x)) throw ConfigError(std::string("pulse parameter '") + field + "' must be finite");
}

void require_positive(double x, const char* field) {
  require_finite(x, field);
  if (!(x > 0.0)) throw ConfigError(std::string("pulse parameter '") + field + "' must be > 0");
}

double sgn(double x) { return x < 0.0 ? -1.0 : 1.0; }

// Integer n with t = n·T to within 1e-12 relative, or nullopt.
std::optional<long> sine_zero_index(double t, double T) {
  const double q = t / T;
  const double n = std::round(q);
  if (std::abs(q - n) <= 1e-12) return static_cast<long>(n);
  return std::nullopt;
}

LeadingOrder nonvanishing_or_zero(double value) {
  if (value == 0.0) return {0.0, kInf};
  return {value, 0.0};
}

LeadingOrder fit_tabulated(const shape::Tabulated& tab, double t_c, Side side) {
  const double s = side_sign(side);
  const double room = side == Side::plus ? tab.back() - t_c : t_c - tab.front();
  if (!(room > 0.0)) {
    throw ClassificationError("exponent undetermined: no tabulated data on the requested side of t_c");
  }
  double vmax = 0.0;
  for (double v : tab.values()) vmax = std::max(vmax, std::abs(v));
  if (vmax == 0.0) return {0.0, kInf};

  const double f0 = tab.value(t_c);
  if (std::abs(f0) > 1e-12 * vmax) return {f0, 0.0};

  const double span = tab.back() - tab.front();
  double eps = std::min(0.25 * room, 0.1 * span);
  double prev_exponent = std::numeric_limits<double>::quiet_NaN();
  double f_prev = tab.value(t_c + s * eps) - f0;
  bool all_zero = f_prev == 0.0;
  for (int k = 0; k < 60; ++k) {
    const double half = 0.5 * eps;
    const double f_half = tab.value(t_c + s * half) - f0;
    all_zero = all_zero && f_half == 0.0;
    if (f_prev != 0.0 && f_half != 0.0) {
      const double exponent = std::log2(std::abs(f_prev) / std::abs(f_half));
      if (std::isfinite(prev_exponent) && std::abs(exponent - prev_exponent) <= 1e-3) {
        return {f_half / std::pow(half, exponent), exponent};
      }
      prev_exponent = exponent;
    }
    eps = half;
    f_prev = f_half;
    if (eps <= 1e-14 * span) break;
  }
  if (all_zero) return {0.0, kInf};
  throw ClassificationError("exponent undetermined: tabulated leading-order fit did not settle");
}

}  // namespace

// ---------------------------------------------------------------------------
// Tabulated

namespace shape {

Tabulated::Tabulated(std::vector<double> times, std::vector<double> values,
                     Interpolation interpolation)
    : times_(std::move(times)), values_(std::move(values)), interpolation_(interpolation) {
  if (times_.size() != values_.size()) throw ConfigError("tabulated pulse: 'times' and 'values' differ in length");
  if (times_.size() < 2) throw ConfigError("tabulated pulse: at least 2 samples are required");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    require_finite(times_[i], "times");
    require_finite(values_[i], "values");
    if (i > 0 && !(times_[i] > times_[i - 1])) {
      throw ConfigError("tabulated pulse: 'times' must be strictly increasing");
    }
  }
  if (interpolation_ != Interpolation::cubic) return;

  // Natural cubic spline moments via the Thomas algorithm.
  const std::size_t n = times_.size();
  second_derivs_.assign(n, 0.0);
  if (n < 3) return;
  std::vector<double> c(n, 0.0), d(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = times_[i] - times_[i - 1];
    const double h1 = times_[i + 1] - times_[i];
    const double a = h0 / 6.0;
    const double b = (h0 + h1) / 3.0;
    const double cc = h1 / 6.0;
    const double rhs = (values_[i + 1] - values_[i]) / h1 - (values_[i] - values_[i - 1]) / h0;
    const double denom = b - a * c[i - 1];
    c[i] = cc / denom;
    d[i] = (rhs - a * d[i - 1]) / denom;
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    second_derivs_[i] = d[i] - c[i] * second_derivs_[i + 1];
  }
}

void Tabulated::check_range(double t) const {
  if (!(t >= times_.front() && t <= times_.back())) {
    throw RangeError("tabulated pulse evaluated at t=" + std::to_string(t) + " outside [" +
                     std::to_string(times_.front()) + ", " + std::to_string(times_.back()) + "]");
  }
}

std::size_t Tabulated::segment(double t, Side side) const {
  const std::size_t last = times_.size() - 2;
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t i = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
  if (side == Side::minus && i > 0 && times_[i] == t) --i;
  return std::min(i, last);
}

double Tabulated::value(double t) const {
  check_range(t);
  const std::size_t i = segment(t, Side::plus);
  const double h = times_[i + 1] - times_[i];
  const double A = (times_[i + 1] - t) / h;
  const double B = (t - times_[i]) / h;
  double y = A * values_[i] + B * values_[i + 1];
  if (interpolation_ == Interpolation::cubic) {
    y += ((A * A * A - A) * second_derivs_[i] + (B * B * B - B) * second_derivs_[i + 1]) * h * h / 6.0;
  }
  return y;
}

double Tabulated::derivative(double t, Side side) const {
  check_range(t);
  const std::size_t i = segment(t, side);
  const double h = times_[i + 1] - times_[i];
  double dy = (values_[i + 1] - values_[i]) / h;
  if (interpolation_ == Interpolation::cubic) {
    const double A = (times_[i + 1] - t) / h;
    const double B = (t - times_[i]) / h;
    dy += (-(3.0 * A * A - 1.0) * second_derivs_[i] + (3.0 * B * B - 1.0) * second_derivs_[i + 1]) * h / 6.0;
  }
  return dy;
}

}  // namespace shape

// ---------------------------------------------------------------------------
// PulseShape

PulseShape::PulseShape(shape::Constant s) : v_(s) { require_finite(s.c, "c"); }

PulseShape::PulseShape(shape::Linear s) : v_(s) { require_finite(s.kappa, "kappa"); }

PulseShape::PulseShape(shape::ExpGap s) : v_(s) {
  require_finite(s.omega0, "omega0");
  require_positive(s.sigma, "sigma");
}

PulseShape::PulseShape(shape::Sine s) : v_(s) {
  require_finite(s.lam, "lam");
  require_finite(s.omega0, "omega0");
  require_positive(s.T, "T");
}

PulseShape::PulseShape(shape::SineAbs s) : v_(s) {
  require_finite(s.lam, "lam");
  require_finite(s.omega0, "omega0");
  require_positive(s.T, "T");
}

PulseShape::PulseShape(shape::TSine s) : v_(s) {
  require_finite(s.lam, "lam");
  require_finite(s.beta, "beta");
  require_positive(s.T, "T");
}

PulseShape::PulseShape(shape::PowerLaw s) : v_(s) {
  require_finite(s.a_minus, "a_minus");
  require_finite(s.a_plus, "a_plus");
  require_positive(s.a, "a");
}

PulseShape::PulseShape(shape::Tabulated s) : v_(std::move(s)) {}

std::string PulseShape::kind() const {
  struct Visitor {
    std::string operator()(const shape::Constant&) const { return "constant"; }
    std::string operator()(const shape::Linear&) const { return "linear"; }
    std::string operator()(const shape::ExpGap&) const { return "exp_gap"; }
    std::string operator()(const shape::Sine&) const { return "sine"; }
    std::string operator()(const shape::SineAbs&) const { return "sine_abs"; }
    std::string operator()(const shape::TSine&) const { return "t_sine"; }
    std::string operator()(const shape::PowerLaw&) const { return "power_law"; }
    std::string operator()(const shape::Tabulated&) const { return "tabulated"; }
  };
  return std::visit(Visitor{}, v_);
}

// ---------------------------------------------------------------------------
// Evaluation

double eval(const PulseShape& pulse, double t) {
  struct Visitor {
    double t;
    double operator()(const shape::Constant& s) const { return s.c; }
    double operator()(const shape::Linear& s) const { return s.kappa * t; }
    double operator()(const shape::ExpGap& s) const {
      return s.omega0 * -std::expm1(-std::abs(t / s.sigma));
    }
    double operator()(const shape::Sine& s) const { return s.lam * s.omega0 * std::sin(kPi * t / s.T); }
    double operator()(const shape::SineAbs& s) const {
      return s.lam * s.omega0 * std::abs(std::sin(kPi * t / s.T));
    }
    double operator()(const shape::TSine& s) const { return s.lam * s.beta * t * std::sin(kPi * t / s.T); }
    double operator()(const shape::PowerLaw& s) const {
      return t < 0.0 ? s.a_minus * std::pow(-t, s.a) : s.a_plus * std::pow(t, s.a);
    }
    double operator()(const shape::Tabulated& s) const { return s.value(t); }
  };
  return std::visit(Visitor{t}, pulse.variant());
}

double eval_derivative(const PulseShape& pulse, double t, Side side) {
  struct Visitor {
    double t;
    Side side;
    // Direction of approach used at kinks: +1 right derivative, -1 left derivative.
    double direction() const { return t == 0.0 ? side_sign(side) : sgn(t); }

    double operator()(const shape::Constant&) const { return 0.0; }
    double operator()(const shape::Linear& s) const { return s.kappa; }
    double operator()(const shape::ExpGap& s) const {
      return direction() * s.omega0 / s.sigma * std::exp(-std::abs(t / s.sigma));
    }
    double operator()(const shape::Sine& s) const {
      return s.lam * s.omega0 * kPi / s.T * std::cos(kPi * t / s.T);
    }
    double operator()(const shape::SineAbs& s) const {
      const double phase = kPi * t / s.T;
      const double slope = s.lam * s.omega0 * kPi / s.T * std::cos(phase);
      if (sine_zero_index(t, s.T)) {
        return side_sign(side) * std::abs(slope) * sgn(s.lam * s.omega0);
      }
      return std::sin(phase) < 0.0 ? -slope : slope;
    }
    double operator()(const shape::TSine& s) const {
      const double phase = kPi * t / s.T;
      return s.lam * s.beta * (std::sin(phase) + t * kPi / s.T * std::cos(phase));
    }
    double operator()(const shape::PowerLaw& s) const {
      const bool right = t > 0.0 || (t == 0.0 && side == Side::plus);
      if (t == 0.0) {
        const double coeff = right ? s.a_plus : -s.a_minus;
        if (s.a == 1.0) return coeff;
        if (s.a > 1.0) return 0.0;
        return coeff == 0.0 ? 0.0 : std::copysign(kInf, coeff);
      }
      return right ? s.a * s.a_plus * std::pow(t, s.a - 1.0)
                   : -s.a * s.a_minus * std::pow(-t, s.a - 1.0);
    }
    double operator()(const shape::Tabulated& s) const { return s.derivative(t, side); }
  };
  return std::visit(Visitor{t, side}, pulse.variant());
}

LeadingOrder leading_order(const PulseShape& pulse, double t_c, Side side) {
  const double s = side_sign(side);
  struct Visitor {
    double t_c;
    double s;
    Side side;

    LeadingOrder operator()(const shape::Constant& p) const { return nonvanishing_or_zero(p.c); }
    LeadingOrder operator()(const shape::Linear& p) const {
      if (p.kappa == 0.0) return {0.0, kInf};
      if (t_c == 0.0) return {s * p.kappa, 1.0};
      return {p.kappa * t_c, 0.0};
    }
    LeadingOrder operator()(const shape::ExpGap& p) const {
      if (p.omega0 == 0.0) return {0.0, kInf};
      if (t_c == 0.0) return {p.omega0 / p.sigma, 1.0};
      return {p.omega0 * -std::expm1(-std::abs(t_c / p.sigma)), 0.0};
    }
    LeadingOrder operator()(const shape::Sine& p) const {
      const double amp = p.lam * p.omega0;
      if (amp == 0.0) return {0.0, kInf};
      if (auto n = sine_zero_index(t_c, p.T)) {
        const double slope = amp * kPi / p.T * (*n % 2 == 0 ? 1.0 : -1.0);
        return {s * slope, 1.0};
      }
      return {amp * std::sin(kPi * t_c / p.T), 0.0};
    }
    LeadingOrder operator()(const shape::SineAbs& p) const {
      const double amp = p.lam * p.omega0;
      if (amp == 0.0) return {0.0, kInf};
      if (sine_zero_index(t_c, p.T)) return {std::abs(amp) * kPi / p.T * sgn(amp), 1.0};
      return {amp * std::abs(std::sin(kPi * t_c / p.T)), 0.0};
    }
    LeadingOrder operator()(const shape::TSine& p) const {
      const double amp = p.lam * p.beta;
      if (amp == 0.0) return {0.0, kInf};
      if (auto n = sine_zero_index(t_c, p.T)) {
        // t·sin(πt/T) ≈ πt²/T at the origin, simple zero elsewhere.
        if (*n == 0) return {amp * kPi / p.T, 2.0};
        const double slope = amp * static_cast<double>(*n) * kPi * (*n % 2 == 0 ? 1.0 : -1.0);
        return {s * slope, 1.0};
      }
      return {amp * t_c * std::sin(kPi * t_c / p.T), 0.0};
    }
    LeadingOrder operator()(const shape::PowerLaw& p) const {
      if (t_c == 0.0) {
        const double coeff = side == Side::plus ? p.a_plus : p.a_minus;
        if (coeff == 0.0) return {0.0, kInf};
        return {coeff, p.a};
      }
      return nonvanishing_or_zero(t_c < 0.0 ? p.a_minus * std::pow(-t_c, p.a)
                                            : p.a_plus * std::pow(t_c, p.a));
    }
    LeadingOrder operator()(const shape::Tabulated& p) const { return fit_tabulated(p, t_c, side); }
  };
  return std::visit(Visitor{t_c, s, side}, pulse.variant());
}

// ---------------------------------------------------------------------------
// Schedule

Schedule::Schedule(PulseShape delta, PulseShape omega, double t_start, double t_end,
                   std::vector<double> crossings)
    : delta_(std::move(delta)),
      omega_(std::move(omega)),
      t_start_(t_start),
      t_end_(t_end),
      crossings_(std::move(crossings)) {
  if (!std::isfinite(t_start_) || !std::isfinite(t_end_) || !(t_start_ < t_end_)) {
    throw ConfigError("schedule: require finite t_start < t_end");
  }
  std::sort(crossings_.begin(), crossings_.end());
  try {
    constexpr int kGrid = 1000;
    for (int i = 0; i < kGrid; ++i) {
      const double t = t_start_ + (t_end_ - t_start_) * i / (kGrid - 1);
      energy_scale_ = std::max(energy_scale_, std::hypot(eval(delta_, t), eval(omega_, t)));
    }
    for (double tc : crossings_) {
      if (!(tc >= t_start_ && tc <= t_end_)) {
        throw ConfigError("schedule: crossing at t=" + std::to_string(tc) + " lies outside the window");
      }
      const double bound = 1e-12 * energy_scale_;
      if (std::abs(eval(delta_, tc)) > bound || std::abs(eval(omega_, tc)) > bound) {
        throw ConfigError("schedule: Δ and Ω do not both vanish at declared crossing t=" + std::to_string(tc));
      }
    }
  } catch (const RangeError& e) {
    throw ConfigError(std::string("schedule: tabulated pulse does not cover the window: ") + e.what());
  }
}

bool Schedule::has_crossing_inside(double t1, double t2) const {
  const double lo = std::min(t1, t2);
  const double hi = std::max(t1, t2);
  return std::any_of(crossings_.begin(), crossings_.end(), [&](double tc) { return tc > lo && tc < hi; });
}

// ---------------------------------------------------------------------------
// JSON

namespace {

double number_field(const nlohmann::json& j, const char* name) {
  if (!j.contains(name)) throw ConfigError(std::string("missing field '") + name + "'");
  const auto& v = j.at(name);
  if (!v.is_number()) throw ConfigError(std::string("field '") + name + "' must be a number");
  return v.get<double>();
}

std::vector<double> number_array(const nlohmann::json& j, const char* name) {
  if (!j.contains(name)) throw ConfigError(std::string("missing field '") + name + "'");
  const auto& v = j.at(name);
  if (!v.is_array()) throw ConfigError(std::string("field '") + name + "' must be an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(std::string("field '") + name + "' must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace

PulseShape pulse_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("pulse shape must be a JSON object");
  if (!j.contains("kind") || !j.at("kind").is_string()) throw ConfigError("pulse shape: missing string field 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") return shape::Constant{number_field(j, "c")};
  if (kind == "linear") return shape::Linear{number_field(j, "kappa")};
  if (kind == "exp_gap") return shape::ExpGap{number_field(j, "omega0"), number_field(j, "sigma")};
  if (kind == "sine") return shape::Sine{number_field(j, "lam"), number_field(j, "omega0"), number_field(j, "T")};
  if (kind == "sine_abs") {
    return shape::SineAbs{number_field(j, "lam"), number_field(j, "omega0"), number_field(j, "T")};
  }
  if (kind == "t_sine") return shape::TSine{number_field(j, "lam"), number_field(j, "beta"), number_field(j, "T")};
  if (kind == "power_law") {
    return shape::PowerLaw{number_field(j, "a_minus"), number_field(j, "a_plus"), number_field(j, "a")};
  }
  if (kind == "tabulated") {
    auto interp = shape::Interpolation::cubic;
    if (j.contains("interpolation")) {
      const auto& v = j.at("interpolation");
      if (v == "linear") {
        interp = shape::Interpolation::linear;
      } else if (v != "cubic") {
        throw ConfigError("field 'interpolation' must be \"linear\" or \"cubic\"");
      }
    }
    return shape::Tabulated(number_array(j, "times"), number_array(j, "values"), interp);
  }
  throw ConfigError("field 'kind': unknown pulse kind '" + kind + "'");
}

nlohmann::json pulse_to_json(const PulseShape& pulse) {
  struct Visitor {
    nlohmann::json operator()(const shape::Constant& s) const { return {{"c", s.c}}; }
    nlohmann::json operator()(const shape::Linear& s) const { return {{"kappa", s.kappa}}; }
    nlohmann::json operator()(const shape::ExpGap& s) const { return {{"omega0", s.omega0}, {"sigma", s.sigma}}; }
    nlohmann::json operator()(const shape::Sine& s) const {
      return {{"lam", s.lam}, {"omega0", s.omega0}, {"T", s.T}};
    }
    nlohmann::json operator()(const shape::SineAbs& s) const {
      return {{"lam", s.lam}, {"omega0", s.omega0}, {"T", s.T}};
    }
    nlohmann::json operator()(const shape::TSine& s) const { return {{"lam", s.lam}, {"beta", s.beta}, {"T", s.T}}; }
    nlohmann::json operator()(const shape::PowerLaw& s) const {
      return {{"a_minus", s.a_minus}, {"a_plus", s.a_plus}, {"a", s.a}};
    }
    nlohmann::json operator()(const shape::Tabulated& s) const {
      return {{"times", s.times()},
              {"values", s.values()},
              {"interpolation", s.interpolation() == shape::Interpolation::linear ? "linear" : "cubic"}};
    }
  };
  nlohmann::json j = std::visit(Visitor{}, pulse.variant());
  j["kind"] = pulse.kind();
  return j;
}

Schedule schedule_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("schedule must be a JSON object");
  if (!j.contains("delta")) throw ConfigError("schedule: missing field 'delta'");
  if (!j.contains("omega")) throw ConfigError("schedule: missing field 'omega'");
  PulseShape delta = [&] {
    try {
      return pulse_from_json(j.at("delta"));
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("schedule.delta: ") + e.what());
    }
  }();
  PulseShape omega = [&] {
    try {
      return pulse_from_json(j.at("omega"));
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("schedule.omega: ") + e.what());
    }
  }();
  std::vector<double> crossings;
  if (j.contains("crossings")) crossings = number_array(j, "crossings");
  return Schedule(std::move(delta), std::move(omega), number_field(j, "t_start"), number_field(j, "t_end"),
                  std::move(crossings));
}

nlohmann::json schedule_to_json(const Schedule& schedule) {
  return {{"delta", pulse_to_json(schedule.delta_shape())},
          {"omega", pulse_to_json(schedule.omega_shape())},
          {"t_start", schedule.t_start()},
          {"t_end", schedule.t_end()},
          {"crossings", schedule.crossings()}};
}

}  // namespace realcross
