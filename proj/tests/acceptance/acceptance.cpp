// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "realcross/crossing.hpp"
#include "realcross/dressed.hpp"
#include "realcross/harness.hpp"
#include "realcross/propagator.hpp"

using namespace realcross;
using std::numbers::pi;

namespace {

// Criterion 1
constexpr double kLzTolerance = 1e-3;
constexpr double kLzBudget = 1.0;
constexpr double kLzWindowFactor = 800.0;
constexpr double kLzIntegratorTol = 1e-6;
// Criterion 2
constexpr double kFig1EtaGate = 0.05;
constexpr double kFig1Tolerance = 0.02;
constexpr double kFig1ReferencePrediction = 0.99751;
constexpr double kFig1PredictionDigits = 5e-6;
constexpr double kFig1Budget = 30.0;
// Criterion 3
constexpr double kFig3MaxTransfer = 0.05;
constexpr double kFig3Budget = 5.0;
// Criterion 4
constexpr double kFig2Tolerance = 0.03;
constexpr double kFig2Budget = 5.0;
// Criterion 5
constexpr int kPropertyPoints = 10000;
constexpr double kEtaIdentityRel = 1e-12;
constexpr double kThetaIdentityAbs = 1e-12;
constexpr double kThetaDotFdRel = 1e-6;
constexpr double kUnitarity = 1e-9;
constexpr double kOrthogonality = 4 * std::numeric_limits<double>::epsilon();
constexpr double kPropertyBudget = 5.0;
// Criterion 6
constexpr double kSlopeTolerance = 0.05;
constexpr double kSlopeBudget = 2.0;

int failures = 0;

void report(const char* id, bool pass, const std::string& what) {
  std::printf("%s  %-3s %s\n", pass ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

double max_norm_defect(const Trajectory& tr) {
  double m = 0.0;
  for (const auto& k : tr.states) m = std::max(m, std::abs(k.norm() - 1.0));
  return m;
}

// Largest |‖ψ‖ − 1| seen on any trajectory below.
double unitarity_defect = 0.0;

void criterion_lz() {
  const Stopwatch sw;
  const std::vector<double> xs = {1.0, 2.0, 4.0};
  const auto rows = lz_check(xs, kLzWindowFactor, kLzIntegratorTol);
  const double t = sw.seconds();
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, r.error);
  report("1", worst <= kLzTolerance && t < kLzBudget,
         fmt("Landau-Zener oracle, kappa*T/Omega0 = %g: max |numeric - exp(-pi x/2)| = %.2e (<= %g) over x in "
             "{1,2,4}; %.2f s (< %g s)",
             kLzWindowFactor, worst, kLzTolerance, t, kLzBudget));
}

void criterion_fig1(unsigned workers) {
  const Stopwatch sw;
  const auto config = figure_config(1);
  const auto rows = run_sweep(config, workers);
  const double t = sw.seconds();
  int gated = 0, bad = 0;
  double worst = 0.0;
  for (const auto& r : rows) {
    if (!r.error.empty()) ++bad;
    if (r.max_eta_outside_crossing < kFig1EtaGate) {
      ++gated;
      const double sigma = 2.0 * r.param_value;
      const double expected = std::pow(std::cos(std::atan(0.025 * sigma)), 2);
      const double e = std::abs(r.p_up_final - expected);
      worst = std::max(worst, e);
      if (!(e <= kFig1Tolerance)) ++bad;
    }
  }
  const double ref = theta_jump(build_schedule(config, 1.0), 0.0).predicted_survival;
  const bool ok = bad == 0 && gated > 0 && std::abs(ref - kFig1ReferencePrediction) <= kFig1PredictionDigits &&
                  t < kFig1Budget && rows.size() == 40;
  report("2", ok,
         fmt("Fig. 1 sweep (40 points): %d rows with max eta < %g, worst |p_up - cos^2(atan(kappa sigma/Omega0))| = "
             "%.4f (<= %g); prediction at sigma = 2/Omega0 = %.5f; %.1f s (< %g s)",
             gated, kFig1EtaGate, worst, kFig1Tolerance, ref, t, kFig1Budget));
}

void criterion_fig3() {
  const Stopwatch sw;
  const auto config = figure_config(3);
  const auto run = run_single(config, 1.0);
  const double t = sw.seconds();
  unitarity_defect = std::max(unitarity_defect, max_norm_defect(run.trajectory));
  const double p_up = run.trajectory.final_state().p_up();
  // Prediction over the whole default sweep, not just λ = 1.
  bool all_zero = true;
  for (double lam : config.sweep->values) {
    all_zero = all_zero && theta_jump(build_schedule(config, lam), 0.0).predicted_survival == 0.0;
  }
  report("3", p_up <= kFig3MaxTransfer && all_zero && t < kFig3Budget,
         fmt("Fig. 3 at lambda = 1: p_up_final = %.4f (<= %g); prediction identically 0 over the sweep: %s; %.2f s "
             "(< %g s)",
             p_up, kFig3MaxTransfer, all_zero ? "yes" : "no", t, kFig3Budget));
}

void criterion_fig2() {
  const Stopwatch sw;
  const auto run = run_single(figure_config(2), 1.0);
  const double t = sw.seconds();
  unitarity_defect = std::max(unitarity_defect, max_norm_defect(run.trajectory));
  const double expected = std::pow(std::cos(std::atan(5.0 / pi)), 2);
  const double p_up = run.trajectory.final_state().p_up();
  const double e = std::abs(p_up - expected);
  report("4", e <= kFig2Tolerance && t < kFig2Budget,
         fmt("Fig. 2 (|sin| coupling) at lambda = 1: p_up_final = %.4f vs cos^2(atan(5/pi)) = %.5f, |diff| = %.4f "
             "(<= %g); %.2f s (< %g s)",
             p_up, expected, e, kFig2Tolerance, t, kFig2Budget));
}

void criterion_properties() {
  const Stopwatch sw;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::uniform_real_distribution<double> decade(-6.0, 6.0);

  // 5a: η as |θ̇|/|ω₊−ω₋| against the printed |sin 2θ|³·|α̇/Ω|.
  // 5a': the same with the factor ½ that the closed form implies.
  double worst_literal = 0.0, worst_half = 0.0, ratio_lo = 1e300, ratio_hi = 0.0;
  for (int i = 0; i < kPropertyPoints; ++i) {
    double d = u(rng), o = u(rng);
    if (o == 0.0) o = 1.0;
    const double dd = u(rng), od = u(rng);
    const double e = eta(d, o, dd, od);
    const double a = d / o;
    const double a_dot = (dd * o - d * od) / (o * o);
    // |sin 2θ| = 1/√(1+α²); sin(2θ) itself cancels badly as θ → π/2.
    const double s2 = 1.0 / std::sqrt(1.0 + a * a);
    const double printed = s2 * s2 * s2 * std::abs(a_dot / o);
    if (e == 0.0) continue;
    worst_literal = std::max(worst_literal, std::abs(printed - e) / e);
    worst_half = std::max(worst_half, std::abs(0.5 * printed - e) / e);
    ratio_lo = std::min(ratio_lo, printed / e);
    ratio_hi = std::max(ratio_hi, printed / e);
  }
  report("5a", worst_literal <= kEtaIdentityRel,
         fmt("eta identity, printed sin-form vs |theta_dot|/|omega+ - omega-|, %d random points: max rel. diff = %.3g "
             "(<= %g); printed/closed ratio in [%.12f, %.12f]",
             kPropertyPoints, worst_literal, kEtaIdentityRel, ratio_lo, ratio_hi));
  report("5a'", worst_half <= kEtaIdentityRel,
         fmt("eta identity with the factor 1/2, eta = |sin 2theta|^3 |alpha_dot/Omega| / 2: max rel. diff = %.3g "
             "(<= %g)",
             worst_half, kEtaIdentityRel));

  // 5b: θ = π/4 + ½ arctan α against arctan(α + √(1+α²)).
  double worst_theta = 0.0;
  for (int i = 0; i < kPropertyPoints; ++i) {
    const double a = std::pow(10.0, decade(rng)) * (i % 2 ? 1.0 : -1.0);
    const double r = std::sqrt(1.0 + a * a);
    const double by_tangent = std::atan(a >= 0.0 ? a + r : 1.0 / (r - a));
    worst_theta = std::max(worst_theta, std::abs(mixing_angle(a) - by_tangent));
  }
  report("5b", worst_theta <= kThetaIdentityAbs,
         fmt("theta identity, %d random alpha over 12 decades: max |diff| = %.3g (<= %g)", kPropertyPoints,
             worst_theta, kThetaIdentityAbs));

  // 5c: θ̇ closed form against a central difference of θ(α(t)).
  double worst_fd = 0.0;
  int fd_points = 0;
  while (fd_points < 1000) {
    const double d0 = u(rng), o0 = std::abs(u(rng)) + 0.1, dd = u(rng), od = u(rng);
    if (std::abs(dd * o0 - d0 * od) < 1e-2) continue;
    ++fd_points;
    auto th = [&](double t) { return mixing_angle(alpha_of(d0 + dd * t, o0 + od * t)); };
    const double h = 1e-3;
    const double fd = (-th(2 * h) + 8 * th(h) - 8 * th(-h) + th(-2 * h)) / (12 * h);
    const double exact = theta_dot(d0, o0, dd, od);
    worst_fd = std::max(worst_fd, std::abs(exact - fd) / std::abs(exact));
  }
  report("5c", worst_fd <= kThetaDotFdRel,
         fmt("theta_dot closed form vs finite difference, %d points: max rel. diff = %.3g (<= %g)", fd_points,
             worst_fd, kThetaDotFdRel));

  // 5d: unitarity on every trajectory of this suite plus a few sampled ones.
  const std::vector<Schedule> schedules = {
      build_schedule(figure_config(1), 1.0),
      build_schedule(figure_config(2), 1.0),
      build_schedule(figure_config(3), 1.0),
      Schedule(shape::PowerLaw{1.0, 1.0, 1.0}, shape::PowerLaw{1.0, 1.0, 2.0}, -3.0, 3.0, {0.0}),
  };
  int trajectories = 2;  // Figs. 2 and 3 above
  for (const auto& s : schedules) {
    for (const auto& psi0 : {TwoStateKet::down(), TwoStateKet::up(),
                             TwoStateKet{{std::sqrt(0.5), 0.0}, {0.0, std::sqrt(0.5)}}}) {
      unitarity_defect = std::max(unitarity_defect, max_norm_defect(propagate(s, psi0, 1e-7, 501)));
      ++trajectories;
    }
  }
  report("5d", unitarity_defect <= kUnitarity,
         fmt("unitarity over %d trajectories: max ||psi| - 1| = %.3g (<= %g)", trajectories, unitarity_defect,
             kUnitarity));

  // 5e: the reconstructed crossing overlap matrix is a rotation.
  double worst_orth = 0.0;
  std::uniform_real_distribution<double> pos(0.01, 10.0);
  for (int i = 0; i < 2000; ++i) {
    const double kappa = u(rng);
    const Schedule s(shape::Linear{kappa == 0.0 ? 1.0 : kappa}, shape::ExpGap{pos(rng), pos(rng)}, -10.0, 10.0,
                     {0.0});
    const auto m = theta_jump(s, 0.0).overlap;
    worst_orth = std::max({worst_orth, std::abs(m[0][0] * m[0][0] + m[1][0] * m[1][0] - 1.0),
                           std::abs(m[0][1] * m[0][1] + m[1][1] * m[1][1] - 1.0),
                           std::abs(m[0][0] * m[0][1] + m[1][0] * m[1][1]),
                           std::abs(m[0][0] * m[1][1] - m[0][1] * m[1][0] - 1.0)});
  }
  const double t = sw.seconds();
  report("5e", worst_orth <= kOrthogonality && t < kPropertyBudget,
         fmt("crossing overlap matrix, 2000 reports: max |M^T M - I|, |det M - 1| = %.3g (<= %.3g); property suite "
             "%.2f s (< %g s)",
             worst_orth, kOrthogonality, t, kPropertyBudget));
}

void criterion_slopes() {
  const Stopwatch sw;
  struct Pair {
    double a, b, predicted;
  };
  std::string detail;
  bool ok = true;
  for (const Pair p : {Pair{4, 1, 1}, Pair{1, 4, 1}, Pair{1, 2, -1}}) {
    const Schedule s(shape::PowerLaw{-1.0, 1.0, p.a}, shape::PowerLaw{1.0, 1.0, p.b}, -1.0, 1.0, {0.0});
    const auto cls = classify_exponents(s, 0.0);
    // Geometric grid over two decades approaching the crossing.
    std::vector<double> grid;
    for (int i = 0; i <= 40; ++i) grid.push_back(1e-2 * std::pow(10.0, -2.0 * i / 40));
    const auto scan = eta_scan(s, grid, 0.0);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& e : scan.samples) {
      const double x = std::log(e.t), y = std::log(*e.eta);
      sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const double n = static_cast<double>(scan.samples.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const bool match = cls.eta_exponent && *cls.eta_exponent == p.predicted &&
                       std::abs(slope - p.predicted) <= kSlopeTolerance;
    ok = ok && match;
    detail += fmt(" (a=%g,b=%g): slope %.4f vs %g [%s];", p.a, p.b, slope, p.predicted, to_string(cls.verdict).c_str());
  }
  const double t = sw.seconds();
  report("6", ok && t < kSlopeBudget,
         fmt("eta log-log slope near t=0 over two decades, within %g:%s %.3f s (< %g s)", kSlopeTolerance,
             detail.c_str(), t, kSlopeBudget));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void criterion_determinism() {
  const auto root = std::filesystem::temp_directory_path() / "realcross_acceptance";
  std::filesystem::remove_all(root);
  std::vector<std::string> outputs;
  for (const auto& [tag, workers] : {std::pair{"a", 1u}, {"b", 1u}, {"c", 4u}}) {
    const auto dir = root / tag;
    write_figure(emit_figure_data(2, figure_config(2), workers), dir);
    auto single = figure_config(1);
    single.n_samples = 201;
    write_single(run_single(single, 1.0), dir);
    outputs.push_back(slurp(dir / "figure2_a.csv") + slurp(dir / "figure2_b.csv") + slurp(dir / "trajectory.csv") +
                      slurp(dir / "report.json"));
  }
  std::filesystem::remove_all(root);
  const bool same = !outputs[0].empty() && outputs[0] == outputs[1] && outputs[0] == outputs[2];
  report("7", same,
         fmt("byte-identical figure and single-run outputs across 2 repeated runs and 1 vs 4 workers (%zu bytes)",
             outputs[0].size()));
}

}  // namespace

int main() {
  const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  criterion_lz();
  criterion_fig1(workers);
  criterion_fig3();
  criterion_fig2();
  criterion_properties();
  criterion_slopes();
  criterion_determinism();
  std::printf("%d criterion line(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
