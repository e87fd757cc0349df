#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "realcross/pulses.hpp"

namespace realcross {

using Complex = std::complex<double>;

/// State of the two-level system in the bare basis (|↓⟩, |↑⟩).
struct TwoStateKet {
  Complex c_down{1.0, 0.0};
  Complex c_up{0.0, 0.0};

  static TwoStateKet down() { return {{1.0, 0.0}, {0.0, 0.0}}; }
  static TwoStateKet up() { return {{0.0, 0.0}, {1.0, 0.0}}; }

  double p_down() const { return std::norm(c_down); }
  double p_up() const { return std::norm(c_up); }
  double norm() const { return std::sqrt(p_down() + p_up()); }
};

/// Sampled solution of iψ̇ = H(t)ψ. Dressed populations and η are absent at
/// samples where Δ = Ω = 0.
struct Trajectory {
  std::vector<double> times;
  std::vector<TwoStateKet> states;
  std::vector<std::array<double, 2>> populations_bare;                   // (P↓, P↑)
  std::vector<std::optional<std::array<double, 2>>> populations_dressed;  // (P₊, P₋)
  std::vector<std::optional<double>> eta_profile;

  std::size_t steps_accepted = 0;
  std::size_t steps_rejected = 0;

  const TwoStateKet& final_state() const { return states.back(); }
};

struct PropagateOptions {
  /// Constant energy added to both levels (H → H + c·I); a pure gauge.
  double energy_offset = 0.0;
  /// First trial step; 0 picks 10⁻³ of the window.
  double initial_step = 0.0;
};

/// exp(−iHh)ψ for H = ½[[−Δ, Ω], [Ω, Δ]], computed in closed form from the
/// Pauli decomposition. Exactly unitary; H = 0 leaves ψ unchanged.
/// Throws PreconditionError unless h > 0.
TwoStateKet step(double delta, double omega, double h, const TwoStateKet& psi);

/// Propagates psi0 across the schedule window.
///
/// Each step is a symmetric composition of exact exponentials of H sampled at
/// substep midpoints. Step size is controlled by step doubling of the plain
/// midpoint exponential: a step of length h is accepted when the one-step and
/// two-half-step states differ (in 2-norm) by at most tol·h. Steps are further
/// kept below a rotation of π (h·√(Δ²+Ω²) ≤ π) and never straddle a declared
/// crossing, where |·| shapes have kinks. Results are recorded on a uniform
/// grid of n_samples points spanning the window.
///
/// Throws PreconditionError for an unnormalized psi0, tol outside (0, 1e-2] or
/// n_samples < 2, and StiffnessError when the tolerance cannot be met above a
/// minimum step of 1e-8 × window.
Trajectory propagate(const Schedule& schedule, const TwoStateKet& psi0, double tol, std::size_t n_samples,
                     const PropagateOptions& options = {});

/// (P₊, P₋) of every sample of `trajectory` projected onto ψ±(t).
/// Throws DegeneracyError when a sample sits exactly on a crossing.
std::vector<std::array<double, 2>> dressed_populations(const Schedule& schedule, const Trajectory& trajectory);

struct EtaSample {
  double t = 0.0;
  std::optional<double> eta;  // absent where Δ = Ω = 0
};

struct EtaScan {
  std::vector<EtaSample> samples;
  /// Largest η at grid points farther than the exclusion half-width from
  /// every declared crossing (0 when no such point exists).
  double max_eta_outside = 0.0;
};

/// η along `grid`. Points within `exclusion_half_width` of a declared
/// crossing are reported but do not enter max_eta_outside.
EtaScan eta_scan(const Schedule& schedule, std::span<const double> grid, double exclusion_half_width);

/// n points from a to b inclusive.
std::vector<double> uniform_grid(double a, double b, std::size_t n);

/// CSV with header t,re_c_down,im_c_down,re_c_up,im_c_up,p_down,p_up,p_plus,p_minus,eta.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

}  // namespace realcross
