#pragma once

#include <array>

#include "realcross/ext_real.hpp"
#include "realcross/pulses.hpp"

namespace realcross {

/// Dressed-state label: ψ₊ (upper adiabatic energy) or ψ₋.
enum class Branch { plus, minus };

struct Eigenvalues {
  double plus = 0.0;
  double minus = 0.0;
};

/// Real amplitudes (c↓, c↑) in the bare basis.
using RealPair = std::array<double, 2>;

struct DressedStates {
  RealPair plus;   // (cos θ, sin θ)
  RealPair minus;  // (sin θ, −cos θ)
};

/// Instantaneous eigensystem data at one instant.
struct DressedSnapshot {
  double t = 0.0;
  double theta = 0.0;
  double omega_plus = 0.0;
  double omega_minus = 0.0;
  double theta_dot = 0.0;
  double eta = 0.0;
};

/// α = Δ/Ω. Ω = 0 with Δ ≠ 0 is read as the limit Ω → 0⁺ (α = ±∞ with the
/// sign of Δ). Throws DegeneracyError when Δ = Ω = 0.
ExtReal alpha_of(double delta, double omega);

/// θ with tan θ = α + √(1+α²), evaluated as π/4 + ½·arctan α. Exact 0 and
/// π/2 at α = ∓∞.
double mixing_angle(ExtReal alpha);

/// (+½√(Δ²+Ω²), −½√(Δ²+Ω²)); ω₊ ≥ ω₋ regardless of the sign of Ω.
Eigenvalues eigenvalues(double delta, double omega);

/// ψ₊ = (cos θ, sin θ), ψ₋ = (sin θ, −cos θ) with θ = mixing_angle(Δ/Ω).
/// For Ω < 0 the literal formula labels the pair the other way round: ψ₊ is
/// then the eigenvector of ω₋. Throws DegeneracyError at Δ = Ω = 0.
DressedStates dressed_states(double delta, double omega);

/// Dressed pair for a given mixing angle.
DressedStates dressed_states_from_angle(double theta);

/// θ̇ = (Δ̇Ω − ΔΩ̇) / (2(Δ²+Ω²)). Throws DegeneracyError at Δ = Ω = 0.
double theta_dot(double delta, double omega, double delta_dot, double omega_dot);

/// Adiabaticity parameter η = |θ̇| / |ω₊ − ω₋| = |Δ̇Ω − ΔΩ̇| / (2(Δ²+Ω²)^{3/2}).
/// Throws DegeneracyError at Δ = Ω = 0.
double eta(double delta, double omega, double delta_dot, double omega_dot);

/// All dressed quantities of `schedule` at time t. Derivatives at kinks are
/// taken on `side`.
DressedSnapshot snapshot(const Schedule& schedule, double t, Side side = Side::plus);

/// Dynamical phase φ_k = ∫ ω_k(s) ds over [t1, t2] by adaptive Simpson
/// quadrature to absolute tolerance `tol`. The geometric term ⟨ψ_k|ψ̇_k⟩ is
/// identically zero for real dressed states. Throws DomainError when a
/// declared crossing lies strictly inside the interval.
double adiabatic_phase(const Schedule& schedule, Branch k, double t1, double t2, double tol);

}  // namespace realcross
