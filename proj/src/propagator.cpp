#include "realcross/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "realcross/dressed.hpp"
#include "realcross/errors.hpp"
#include "realcross/format.hpp"

namespace realcross {

namespace {

// exp(−iHh)ψ for any real h (negative h runs backwards).
TwoStateKet exponential(double delta, double omega, double h, const TwoStateKet& psi) {
  const double r = std::sqrt(delta * delta + omega * omega);
  if (r == 0.0 || h == 0.0) return psi;
  const double phi = 0.5 * h * r;
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  // n·σ with n = (Ω, 0, −Δ)/r in the (↓, ↑) ordering.
  const double nx = omega / r;
  const double nz = -delta / r;
  // −i s z = s·(Im z, −Re z), spelled out to stay off the generic complex multiply.
  const Complex a = nz * psi.c_down + nx * psi.c_up;
  const Complex b = nx * psi.c_down - nz * psi.c_up;
  return {{c * psi.c_down.real() + s * a.imag(), c * psi.c_down.imag() - s * a.real()},
          {c * psi.c_up.real() + s * b.imag(), c * psi.c_up.imag() - s * b.real()}};
}

constexpr double kMaxRotation = std::numbers::pi;
constexpr double kRoundoffFloor = 8 * std::numeric_limits<double>::epsilon();

double square(double x) { return x * x; }

TwoStateKet midpoint_step(const Schedule& sch, double t, double h, const TwoStateKet& psi) {
  const double tm = t + 0.5 * h;
  return exponential(sch.delta(tm), sch.omega(tm), h, psi);
}

// Fourth-order symmetric triple-jump composition of midpoint exponentials.
// Every substep midpoint lies inside [t, t+h].
TwoStateKet composed_step(const Schedule& sch, double t, double h, const TwoStateKet& psi) {
  static const double g1 = 1.0 / (2.0 - std::cbrt(2.0));
  static const double g2 = 1.0 - 2.0 * g1;
  TwoStateKet out = midpoint_step(sch, t, g1 * h, psi);
  out = midpoint_step(sch, t + g1 * h, g2 * h, out);
  return midpoint_step(sch, t + (g1 + g2) * h, g1 * h, out);
}

double distance(const TwoStateKet& a, const TwoStateKet& b) {
  return std::sqrt(std::norm(a.c_down - b.c_down) + std::norm(a.c_up - b.c_up));
}

std::optional<std::array<double, 2>> project_dressed(const Schedule& sch, double t, const TwoStateKet& psi) {
  const double d = sch.delta(t);
  const double o = sch.omega(t);
  if (d == 0.0 && o == 0.0) return std::nullopt;
  const auto ds = dressed_states(d, o);
  const double p_plus = std::norm(ds.plus[0] * psi.c_down + ds.plus[1] * psi.c_up);
  const double p_minus = std::norm(ds.minus[0] * psi.c_down + ds.minus[1] * psi.c_up);
  return std::array<double, 2>{p_plus, p_minus};
}

std::optional<double> eta_at(const Schedule& sch, double t) {
  const double d = sch.delta(t);
  const double o = sch.omega(t);
  if (d == 0.0 && o == 0.0) return std::nullopt;
  return eta(d, o, sch.delta_dot(t), sch.omega_dot(t));
}

}  // namespace

TwoStateKet step(double delta, double omega, double h, const TwoStateKet& psi) {
  if (!(h > 0.0)) throw PreconditionError("step: h must be > 0");
  return exponential(delta, omega, h, psi);
}

std::vector<double> uniform_grid(double a, double b, std::size_t n) {
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = a;
    return g;
  }
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = i + 1 == n ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return g;
}

Trajectory propagate(const Schedule& schedule, const TwoStateKet& psi0, double tol, std::size_t n_samples,
                     const PropagateOptions& options) {
  if (std::abs(psi0.norm() - 1.0) > 1e-9) throw PreconditionError("propagate: initial state is not normalized");
  if (!(tol > 0.0 && tol <= 1e-2)) throw PreconditionError("propagate: tol must lie in (0, 1e-2]");
  if (n_samples < 2) throw PreconditionError("propagate: n_samples must be >= 2");

  const double window = schedule.duration();
  const double h_min = 1e-8 * window;
  double h = options.initial_step > 0.0 ? options.initial_step : 1e-3 * window;

  Trajectory traj;
  traj.times = uniform_grid(schedule.t_start(), schedule.t_end(), n_samples);
  traj.states.reserve(n_samples);

  auto record = [&](double t, const TwoStateKet& psi) {
    traj.states.push_back(psi);
    traj.populations_bare.push_back({psi.p_down(), psi.p_up()});
    traj.populations_dressed.push_back(project_dressed(schedule, t, psi));
    traj.eta_profile.push_back(eta_at(schedule, t));
  };

  TwoStateKet psi = psi0;
  double t = traj.times.front();
  record(t, psi);

  for (std::size_t k = 1; k < n_samples; ++k) {
    const double target = traj.times[k];
    while (t < target) {
      // Beyond h·‖H‖ ~ π the midpoint expansion diverges and step doubling
      // can alias; keep well inside.
      const double r = std::sqrt(square(schedule.delta(t)) + square(schedule.omega(t)));
      if (r > 0.0) h = std::max(std::min(h, kMaxRotation / r), h_min);
      // Declared crossings are where |·| shapes have kinks; never step across one.
      double boundary = target;
      for (double tc : schedule.crossings()) {
        if (tc > t && tc < boundary) boundary = tc;
      }
      const bool truncated = h >= boundary - t;
      const double t_next = truncated ? boundary : t + h;
      // Integrate over the representable increment so steps tile the axis;
      // otherwise the rounding of t + h repeats step after step and drifts.
      const double hs = t_next - t;

      const TwoStateKet full = midpoint_step(schedule, t, hs, psi);
      const TwoStateKet halves =
          midpoint_step(schedule, t + 0.5 * hs, 0.5 * hs, midpoint_step(schedule, t, 0.5 * hs, psi));
      const double err = distance(full, halves);
      // Below a few ulps the estimate is rounding noise, not truncation error.
      const double allowed = std::max(tol * hs, kRoundoffFloor);

      if (err <= allowed) {
        psi = composed_step(schedule, t, hs, psi);
        if (options.energy_offset != 0.0) psi = {psi.c_down * std::polar(1.0, -options.energy_offset * hs),
                                                 psi.c_up * std::polar(1.0, -options.energy_offset * hs)};
        t = t_next;
        ++traj.steps_accepted;
        const double grow = err == 0.0 ? 4.0 : std::min(4.0, 0.9 * std::sqrt(allowed / err));
        const double proposal = hs * std::max(1.0, grow);
        // A step clipped to a boundary says nothing about the usable size.
        h = truncated ? std::max(h, proposal) : proposal;
      } else {
        ++traj.steps_rejected;
        if (hs <= h_min) {
          throw StiffnessError("propagate: tolerance " + format_number(tol) + " not met at minimum step " +
                               format_number(h_min) + " near t=" + format_number(t));
        }
        h = std::max(h_min, hs * std::max(0.2, 0.9 * std::sqrt(allowed / err)));
      }
    }
    record(target, psi);
  }
  return traj;
}

std::vector<std::array<double, 2>> dressed_populations(const Schedule& schedule, const Trajectory& trajectory) {
  std::vector<std::array<double, 2>> out;
  out.reserve(trajectory.times.size());
  for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
    auto p = project_dressed(schedule, trajectory.times[i], trajectory.states[i]);
    if (!p) {
      throw DegeneracyError("dressed_populations: sample at t=" + format_number(trajectory.times[i]) +
                            " sits on a crossing");
    }
    out.push_back(*p);
  }
  return out;
}

EtaScan eta_scan(const Schedule& schedule, std::span<const double> grid, double exclusion_half_width) {
  EtaScan scan;
  scan.samples.reserve(grid.size());
  const auto& xs = schedule.crossings();
  for (double t : grid) {
    const auto e = eta_at(schedule, t);
    scan.samples.push_back({t, e});
    const bool excluded =
        std::any_of(xs.begin(), xs.end(), [&](double tc) { return std::abs(t - tc) <= exclusion_half_width; });
    if (e && !excluded) scan.max_eta_outside = std::max(scan.max_eta_outside, *e);
  }
  return scan;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  out << "t,re_c_down,im_c_down,re_c_up,im_c_up,p_down,p_up,p_plus,p_minus,eta\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
    const auto& s = trajectory.states[i];
    const auto& pd = trajectory.populations_dressed[i];
    const auto& e = trajectory.eta_profile[i];
    out << format_number(trajectory.times[i]) << ',' << format_number(s.c_down.real()) << ','
        << format_number(s.c_down.imag()) << ',' << format_number(s.c_up.real()) << ','
        << format_number(s.c_up.imag()) << ',' << format_number(trajectory.populations_bare[i][0]) << ','
        << format_number(trajectory.populations_bare[i][1]) << ',' << format_number(pd ? (*pd)[0] : nan) << ','
        << format_number(pd ? (*pd)[1] : nan) << ',' << format_number(e ? *e : nan) << '\n';
  }
}

}  // namespace realcross
