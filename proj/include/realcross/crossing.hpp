#pragma once

#include <array>
#include <optional>
#include <string>

#include <json.hpp>

#include "realcross/ext_real.hpp"
#include "realcross/pulses.hpp"

namespace realcross {

enum class AdiabaticVerdict { adiabatic_by_a, adiabatic_by_b, not_guaranteed };

std::string to_string(AdiabaticVerdict v);

/// Verdict for leading exponents Δ ~ tᵃ, Ω ~ tᵇ at a crossing:
/// a > 2b+1 or b > 2a+1 keeps η → 0 there.
AdiabaticVerdict verdict_for(double a, double b);

/// Local power of η(t) ~ |t − t_c|^p: a−2b−1 when a > b, b−2a−1 when b > a,
/// none when a = b (the leading terms cancel).
std::optional<double> predicted_eta_exponent(double a, double b);

struct ExponentClassification {
  AdiabaticVerdict verdict = AdiabaticVerdict::not_guaranteed;
  AdiabaticVerdict verdict_left = AdiabaticVerdict::not_guaranteed;
  AdiabaticVerdict verdict_right = AdiabaticVerdict::not_guaranteed;
  double a = 0.0;  // Δ exponent, max over sides
  double b = 0.0;  // Ω exponent, max over sides
  std::optional<double> eta_exponent;
  /// a = b: the verdict needs the coefficient ratio, not just exponents.
  bool same_order = false;
  /// Left and right exponents differ for Δ or Ω.
  bool asymmetric = false;
};

/// Summary of a real crossing: one-sided limits of α and θ, the jump
/// Θ = θ(t_c⁺) − θ(t_c⁻), the predicted adiabatic-state survival cos²Θ and
/// the exponent classification.
struct CrossingReport {
  double t_c = 0.0;
  ExtReal alpha_left;
  ExtReal alpha_right;
  double theta_left = 0.0;
  double theta_right = 0.0;
  double jump = 0.0;
  double predicted_survival = 1.0;
  double predicted_transition = 0.0;
  /// ⟨ψ_k(t_c⁺)|ψ_l(t_c⁻)⟩ for k, l ∈ {+, −}.
  std::array<std::array<double, 2>, 2> overlap{};
  LeadingOrder delta_left, delta_right;
  LeadingOrder omega_left, omega_right;
  ExponentClassification classification;
};

/// Limit of α = Δ/Ω approaching t_c from `side`, from the leading orders of
/// both pulses. Tabulated pulses with equal fitted exponents are resolved by
/// Richardson extrapolation of α(t_c ± ε·2⁻ᵏ); |α| > 1e6 counts as ±∞.
/// Throws PreconditionError if t_c is not a declared crossing and
/// ClassificationError when the leading orders cannot be determined.
ExtReal alpha_limit(const Schedule& schedule, double t_c, Side side);

ExponentClassification classify_exponents(const Schedule& schedule, double t_c);

CrossingReport theta_jump(const Schedule& schedule, double t_c);

struct AroundCrossing {
  double xi = 0.0;  // ∫Ω over [t_c − τ, t_c + τ]
  double theta_minus = 0.0;
  double theta_plus = 0.0;
  double efficiency = 0.0;
};

/// Dressed-state survival across a nonadiabatic window [t_c − τ, t_c + τ]
/// with odd Δ, using U(τ, −τ) ≈ exp(−i∫H). Since H = (Ω/2)σx there, the
/// rotation angle is ξ/2:
///   cos²(ξ/2)·cos²[θ(τ)−θ(−τ)] + sin²(ξ/2)·sin²[θ(τ)+θ(−τ)].
/// Throws PreconditionError when Δ is not odd about t_c or θ(±τ) is undefined.
AroundCrossing around_crossing_efficiency(const Schedule& schedule, double t_c, double tau, double quad_tol);

nlohmann::json ext_real_to_json(const ExtReal& x);
ExtReal ext_real_from_json(const nlohmann::json& j);
nlohmann::json report_to_json(const CrossingReport& report);

}  // namespace realcross
