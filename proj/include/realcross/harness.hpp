#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "realcross/crossing.hpp"
#include "realcross/propagator.hpp"
#include "realcross/pulses.hpp"

namespace realcross {

/// Sweep block: each value v sets the schedule field at `parameter` (a dotted
/// path such as "omega.sigma") to v·scale. Rows report the unscaled v.
struct SweepSpec {
  std::string parameter;
  std::vector<double> values;
  double scale = 1.0;
};

/// Experiment description read from JSON:
///
///   {
///     "schedule": {"delta": {...}, "omega": {...}, "t_start": -T, "t_end": T, "crossings": [0]},
///     "initial_state": "down" | "up" | {"c_down": [re, im], "c_up": [re, im]},
///     "tol": 1e-8, "n_samples": 1001,
///     "eta_exclusion_half_width": 80.0, "eta_grid_points": 4001,
///     "workers": 1,
///     "sweep": {"parameter": "omega.sigma", "values": [...], "scale": 2.0}
///   }
///
/// Everything except "schedule" is optional. The schedule is kept as JSON so
/// sweeps can rewrite individual fields.
struct ExperimentConfig {
  nlohmann::json schedule;
  TwoStateKet initial_state = TwoStateKet::down();
  double tol = 1e-8;
  std::size_t n_samples = 1001;
  /// Absolute half-width; unset means 2% of the window.
  std::optional<double> eta_exclusion_half_width;
  std::size_t eta_grid_points = 4001;
  unsigned workers = 1;
  std::optional<SweepSpec> sweep;
};

/// Throws ConfigError naming the offending field.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Schedule of the config, with the sweep parameter set when `sweep_value` is given.
Schedule build_schedule(const ExperimentConfig& config, std::optional<double> sweep_value = std::nullopt);

double exclusion_half_width(const ExperimentConfig& config, const Schedule& schedule);

/// Crossing analysis outcome; `report` is empty when the analysis failed
/// (for instance a schedule with H ≡ 0) and `error` says why.
struct CrossingOutcome {
  double t_c = 0.0;
  std::optional<CrossingReport> report;
  std::string error;
};

struct SingleRun {
  Trajectory trajectory;
  std::vector<CrossingOutcome> crossings;
  double max_eta_outside = 0.0;
};

SingleRun run_single(const ExperimentConfig& config, std::optional<double> sweep_value = std::nullopt);

/// Writes trajectory.csv and report.json into `out_dir`.
void write_single(const SingleRun& run, const std::filesystem::path& out_dir);
nlohmann::json single_report_json(const SingleRun& run);

struct SweepRow {
  double param_value = 0.0;
  double p_up_final = 0.0;
  double p_down_final = 0.0;
  double predicted_survival = 0.0;
  double abs_error = 0.0;
  double max_eta_outside_crossing = 0.0;
  std::string error;  // empty on success
};

/// One row per sweep value, computed on `workers` threads, sorted by value.
/// A failing point yields a row with an error marker; the sweep continues.
/// Throws ConfigError when the config has no sweep block.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config, unsigned workers);

/// Header: param_value,p_up_final,p_down_final,predicted_survival,abs_error,max_eta_outside_crossing,error
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

struct LzRow {
  double parameter = 0.0;  // Ω₀²/κ
  double numeric = 0.0;    // final bare survival P↓
  double analytic = 0.0;   // exp(−πΩ₀²/(2κ))
  double error = 0.0;
};

/// Linear detuning Δ = κt with constant coupling Ω₀ over [−T, T] with
/// κT/Ω₀ = window_factor, started in |↓⟩. Throws PreconditionError when
/// window_factor < 10.
std::vector<LzRow> lz_check(std::span<const double> omega0_sq_over_kappa, double window_factor, double tol);
void write_lz_csv(std::ostream& out, std::span<const LzRow> rows);

/// Reference setup of the three reproduced experiments (id 1, 2 or 3),
/// including the default sweep.
ExperimentConfig figure_config(int id);

struct FigureFrameB {
  std::vector<double> t, delta, omega;
  double time_unit = 1.0;
  double amplitude_unit = 1.0;
};

struct FigureData {
  int id = 0;
  std::string parameter_name;  // "sigma" or "lambda", in caption units
  std::vector<SweepRow> frame_a;
  FigureFrameB frame_b;
};

/// Runs the sweep of `config` (normally figure_config(id), possibly with
/// overrides) and samples the pulses at the captioned reference parameter.
FigureData emit_figure_data(int id, const ExperimentConfig& config, unsigned workers);

/// Writes figure<id>_a.csv and figure<id>_b.csv into `out_dir`.
void write_figure(const FigureData& data, const std::filesystem::path& out_dir);

}  // namespace realcross
