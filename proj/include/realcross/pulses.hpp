#pragma once

#include <limits>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace realcross {

/// Which side of an instant a one-sided quantity refers to.
enum class Side { minus, plus };

constexpr double side_sign(Side s) { return s == Side::minus ? -1.0 : 1.0; }

namespace shape {

/// f(t) = c
struct Constant {
  double c = 0.0;
};

/// f(t) = κ t
struct Linear {
  double kappa = 0.0;
};

/// f(t) = Ω₀ (1 − exp(−|t/σ|)), a coupling that is flat except near t = 0.
struct ExpGap {
  double omega0 = 0.0;
  double sigma = 1.0;
};

/// f(t) = λ Ω₀ sin(π t / T)
struct Sine {
  double lam = 1.0;
  double omega0 = 0.0;
  double T = 1.0;
};

/// f(t) = λ Ω₀ |sin(π t / T)|
struct SineAbs {
  double lam = 1.0;
  double omega0 = 0.0;
  double T = 1.0;
};

/// f(t) = λ β t sin(π t / T)
struct TSine {
  double lam = 1.0;
  double beta = 0.0;
  double T = 1.0;
};

/// f(t) = A₋ |t|ᵃ for t < 0 and A₊ tᵃ for t ≥ 0.
struct PowerLaw {
  double a_minus = 0.0;
  double a_plus = 0.0;
  double a = 1.0;
};

enum class Interpolation { linear, cubic };

/// Sampled pulse on a strictly increasing grid, interpolated linearly or
/// with a natural cubic spline.
class Tabulated {
 public:
  Tabulated(std::vector<double> times, std::vector<double> values,
            Interpolation interpolation = Interpolation::cubic);

  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }
  Interpolation interpolation() const { return interpolation_; }

  double front() const { return times_.front(); }
  double back() const { return times_.back(); }

  double value(double t) const;
  /// Interpolant derivative; at a knot of the linear interpolant `side`
  /// selects the adjacent segment.
  double derivative(double t, Side side) const;

 private:
  std::size_t segment(double t, Side side) const;
  void check_range(double t) const;

  std::vector<double> times_;
  std::vector<double> values_;
  std::vector<double> second_derivs_;  // natural spline moments; empty for linear
  Interpolation interpolation_;
};

}  // namespace shape

/// Parametric scalar function of time used for the detuning Δ(t) or the
/// coupling Ω(t). Construction validates the parameters.
class PulseShape {
 public:
  using Variant = std::variant<shape::Constant, shape::Linear, shape::ExpGap, shape::Sine,
                               shape::SineAbs, shape::TSine, shape::PowerLaw, shape::Tabulated>;

  PulseShape() : PulseShape(shape::Constant{}) {}
  PulseShape(shape::Constant s);
  PulseShape(shape::Linear s);
  PulseShape(shape::ExpGap s);
  PulseShape(shape::Sine s);
  PulseShape(shape::SineAbs s);
  PulseShape(shape::TSine s);
  PulseShape(shape::PowerLaw s);
  PulseShape(shape::Tabulated s);

  const Variant& variant() const { return v_; }
  /// JSON kind tag ("constant", "exp_gap", ...).
  std::string kind() const;

  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&v_);
  }

 private:
  Variant v_;
};

/// Leading term of a pulse at a point: f(t_c + s·ε) ≈ coefficient · εᵉˣᵖᵒⁿᵉⁿᵗ.
/// A pulse that vanishes identically on the requested side has coefficient 0
/// and exponent +∞.
struct LeadingOrder {
  double coefficient = 0.0;
  double exponent = 0.0;

  bool identically_zero() const { return exponent == std::numeric_limits<double>::infinity(); }
};

double eval(const PulseShape& shape, double t);

/// Analytic derivative. At a kink (|·| shapes at their zeros) the one-sided
/// derivative on `side` is returned; elsewhere `side` has no effect.
double eval_derivative(const PulseShape& shape, double t, Side side = Side::plus);

/// Leading-order behavior of `shape` approaching `t_c` from `side`.
/// Symbolic shapes return exact metadata; tabulated shapes are fitted from
/// successively halved offsets and throw ClassificationError when the fitted
/// exponent does not settle.
LeadingOrder leading_order(const PulseShape& shape, double t_c, Side side);

/// Detuning/coupling pair over a finite window with declared crossing times.
class Schedule {
 public:
  /// Throws ConfigError unless t_start < t_end, every crossing lies in the
  /// window, and both pulses vanish there to 1e-12 of the energy scale.
  Schedule(PulseShape delta, PulseShape omega, double t_start, double t_end,
           std::vector<double> crossings = {});

  const PulseShape& delta_shape() const { return delta_; }
  const PulseShape& omega_shape() const { return omega_; }
  double t_start() const { return t_start_; }
  double t_end() const { return t_end_; }
  double duration() const { return t_end_ - t_start_; }
  const std::vector<double>& crossings() const { return crossings_; }

  /// max of √(Δ²+Ω²) over a 1000-point uniform grid of the window.
  double energy_scale() const { return energy_scale_; }

  double delta(double t) const { return eval(delta_, t); }
  double omega(double t) const { return eval(omega_, t); }
  double delta_dot(double t, Side side = Side::plus) const { return eval_derivative(delta_, t, side); }
  double omega_dot(double t, Side side = Side::plus) const { return eval_derivative(omega_, t, side); }

  /// True when a declared crossing lies strictly inside (t1, t2) (either order).
  bool has_crossing_inside(double t1, double t2) const;

 private:
  PulseShape delta_;
  PulseShape omega_;
  double t_start_;
  double t_end_;
  std::vector<double> crossings_;
  double energy_scale_ = 0.0;
};

// JSON: {"kind": "exp_gap", "omega0": 1.0, "sigma": 2.0}, ...
PulseShape pulse_from_json(const nlohmann::json& j);
nlohmann::json pulse_to_json(const PulseShape& shape);

// JSON: {"delta": {...}, "omega": {...}, "t_start": ..., "t_end": ..., "crossings": [...]}
Schedule schedule_from_json(const nlohmann::json& j);
nlohmann::json schedule_to_json(const Schedule& schedule);

}  // namespace realcross
