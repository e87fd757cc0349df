#include "realcross/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include "realcross/errors.hpp"
#include "realcross/format.hpp"

namespace realcross {

namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::stringstream ss(path);
  std::string item;
  while (std::getline(ss, item, '.')) parts.push_back(item);
  return parts;
}

// Numeric leaf of `root` addressed by a dotted path, or nullptr.
nlohmann::json* resolve_numeric(nlohmann::json& root, const std::string& path) {
  nlohmann::json* node = &root;
  for (const auto& key : split_path(path)) {
    if (key.empty() || !node->is_object() || !node->contains(key)) return nullptr;
    node = &(*node)[key];
  }
  return node->is_number() ? node : nullptr;
}

double number_or(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

std::size_t count_or(const nlohmann::json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(std::string("field '") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

Complex complex_from_json(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("initial_state: missing field '") + key + "'");
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError(std::string("initial_state.") + key + " must be [re, im]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

TwoStateKet initial_state_from_json(const nlohmann::json& j) {
  if (j == "down") return TwoStateKet::down();
  if (j == "up") return TwoStateKet::up();
  if (!j.is_object()) throw ConfigError("field 'initial_state' must be \"down\", \"up\" or explicit amplitudes");
  TwoStateKet psi{complex_from_json(j, "c_down"), complex_from_json(j, "c_up")};
  if (std::abs(psi.norm() - 1.0) > 1e-9) throw ConfigError("field 'initial_state': amplitudes are not normalized");
  return psi;
}

std::vector<double> linspace(double a, double b, std::size_t n) { return uniform_grid(a, b, n); }

CrossingOutcome analyze(const Schedule& schedule, double t_c) {
  CrossingOutcome out;
  out.t_c = t_c;
  try {
    out.report = theta_jump(schedule, t_c);
  } catch (const Error& e) {
    out.error = e.what();
  }
  return out;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open output file " + path.string());
  return f;
}

SweepRow row_from_run(double value, const SingleRun& run) {
  SweepRow row;
  row.param_value = value;
  const auto& psi = run.trajectory.final_state();
  row.p_up_final = psi.p_up();
  row.p_down_final = psi.p_down();
  row.max_eta_outside_crossing = run.max_eta_outside;
  if (run.crossings.empty()) {
    row.predicted_survival = 1.0;
  } else if (run.crossings.size() > 1) {
    row.predicted_survival = std::numeric_limits<double>::quiet_NaN();
    row.error = "no single-jump prediction for multiple crossings";
  } else if (run.crossings.front().report) {
    row.predicted_survival = run.crossings.front().report->predicted_survival;
  } else {
    row.predicted_survival = std::numeric_limits<double>::quiet_NaN();
    row.error = run.crossings.front().error;
  }
  row.abs_error = std::abs(row.p_up_final - row.predicted_survival);
  return row;
}

// CSV cells must not contain separators or line breaks.
std::string csv_text(std::string s) {
  std::replace_if(s.begin(), s.end(), [](char c) { return c == ',' || c == '\n' || c == '\r'; }, ';');
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (!j.contains("schedule")) throw ConfigError("missing field 'schedule'");
  ExperimentConfig c;
  c.schedule = j.at("schedule");
  if (j.contains("initial_state")) c.initial_state = initial_state_from_json(j.at("initial_state"));
  c.tol = number_or(j, "tol", c.tol);
  if (!(c.tol > 0.0 && c.tol <= 1e-2)) throw ConfigError("field 'tol' must lie in (0, 1e-2]");
  c.n_samples = count_or(j, "n_samples", c.n_samples);
  if (c.n_samples < 2) throw ConfigError("field 'n_samples' must be >= 2");
  if (j.contains("eta_exclusion_half_width")) {
    c.eta_exclusion_half_width = number_or(j, "eta_exclusion_half_width", 0.0);
    if (!(*c.eta_exclusion_half_width >= 0.0)) throw ConfigError("field 'eta_exclusion_half_width' must be >= 0");
  }
  c.eta_grid_points = count_or(j, "eta_grid_points", c.eta_grid_points);
  if (c.eta_grid_points < 2) throw ConfigError("field 'eta_grid_points' must be >= 2");
  c.workers = static_cast<unsigned>(count_or(j, "workers", c.workers));
  if (c.workers == 0) throw ConfigError("field 'workers' must be >= 1");

  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    if (!s.is_object()) throw ConfigError("field 'sweep' must be an object");
    if (!s.contains("parameter") || !s.at("parameter").is_string()) {
      throw ConfigError("field 'sweep.parameter' must be a string path");
    }
    SweepSpec spec;
    spec.parameter = s.at("parameter").get<std::string>();
    if (!resolve_numeric(c.schedule, spec.parameter)) {
      throw ConfigError("field 'sweep.parameter': '" + spec.parameter + "' is not a numeric schedule field");
    }
    if (!s.contains("values") || !s.at("values").is_array() || s.at("values").empty()) {
      throw ConfigError("field 'sweep.values' must be a nonempty array of numbers");
    }
    for (const auto& v : s.at("values")) {
      if (!v.is_number()) throw ConfigError("field 'sweep.values' must be a nonempty array of numbers");
      spec.values.push_back(v.get<double>());
    }
    spec.scale = number_or(s, "scale", 1.0);
    c.sweep = std::move(spec);
  }
  // Surface schedule errors now rather than at the first run.
  build_schedule(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

Schedule build_schedule(const ExperimentConfig& config, std::optional<double> sweep_value) {
  if (!sweep_value) return schedule_from_json(config.schedule);
  if (!config.sweep) throw ConfigError("sweep value given but config has no 'sweep' block");
  nlohmann::json j = config.schedule;
  nlohmann::json* leaf = resolve_numeric(j, config.sweep->parameter);
  if (!leaf) throw ConfigError("field 'sweep.parameter' does not resolve");
  *leaf = *sweep_value * config.sweep->scale;
  return schedule_from_json(j);
}

double exclusion_half_width(const ExperimentConfig& config, const Schedule& schedule) {
  return config.eta_exclusion_half_width.value_or(0.02 * schedule.duration());
}

// ---------------------------------------------------------------------------
// Single run and sweep

SingleRun run_single(const ExperimentConfig& config, std::optional<double> sweep_value) {
  const Schedule schedule = build_schedule(config, sweep_value);
  SingleRun run;
  run.trajectory = propagate(schedule, config.initial_state, config.tol, config.n_samples);
  for (double t_c : schedule.crossings()) run.crossings.push_back(analyze(schedule, t_c));
  const auto grid = uniform_grid(schedule.t_start(), schedule.t_end(), config.eta_grid_points);
  run.max_eta_outside = eta_scan(schedule, grid, exclusion_half_width(config, schedule)).max_eta_outside;
  return run;
}

nlohmann::json single_report_json(const SingleRun& run) {
  nlohmann::json crossings = nlohmann::json::array();
  bool degenerate = false;
  for (const auto& c : run.crossings) {
    if (c.report) {
      auto j = report_to_json(*c.report);
      j["status"] = "ok";
      if (c.report->classification.same_order) j["note"] = "same-order: ratio analysis required";
      crossings.push_back(std::move(j));
    } else {
      degenerate = true;
      crossings.push_back({{"t_c", c.t_c}, {"status", "degenerate"}, {"message", c.error}});
    }
  }
  const auto& psi = run.trajectory.final_state();
  return {{"crossings", crossings},
          {"degenerate", degenerate},
          {"p_down_final", psi.p_down()},
          {"p_up_final", psi.p_up()},
          {"max_eta_outside_crossing", run.max_eta_outside},
          {"steps_accepted", run.trajectory.steps_accepted},
          {"steps_rejected", run.trajectory.steps_rejected}};
}

void write_single(const SingleRun& run, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto csv = open_output(out_dir / "trajectory.csv");
  write_trajectory_csv(csv, run.trajectory);
  auto js = open_output(out_dir / "report.json");
  js << single_report_json(run).dump(2) << '\n';
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config, unsigned workers) {
  if (!config.sweep) throw ConfigError("missing field 'sweep'");
  const auto& values = config.sweep->values;
  std::vector<SweepRow> rows(values.size());

  auto compute = [&](std::size_t i) {
    try {
      rows[i] = row_from_run(values[i], run_single(config, values[i]));
    } catch (const std::exception& e) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      rows[i] = {values[i], nan, nan, nan, nan, nan, std::string("error: ") + e.what()};
    }
  };

  const unsigned n_threads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(values.size())));
  if (n_threads == 1) {
    for (std::size_t i = 0; i < values.size(); ++i) compute(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < n_threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < values.size(); i = next++) compute(i);
      });
    }
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SweepRow& a, const SweepRow& b) { return a.param_value < b.param_value; });
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "param_value,p_up_final,p_down_final,predicted_survival,abs_error,max_eta_outside_crossing,error\n";
  for (const auto& r : rows) {
    out << format_number(r.param_value) << ',' << format_number(r.p_up_final) << ','
        << format_number(r.p_down_final) << ',' << format_number(r.predicted_survival) << ','
        << format_number(r.abs_error) << ',' << format_number(r.max_eta_outside_crossing) << ','
        << csv_text(r.error) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Landau-Zener oracle

std::vector<LzRow> lz_check(std::span<const double> omega0_sq_over_kappa, double window_factor, double tol) {
  if (!(window_factor >= 10.0)) throw PreconditionError("lz_check: window_factor (κT/Ω₀) must be >= 10");
  std::vector<LzRow> rows;
  for (double x : omega0_sq_over_kappa) {
    if (!(x >= 0.0)) throw PreconditionError("lz_check: Ω₀²/κ must be >= 0");
    // Units with κ = 1 when the coupling is off, Ω₀ = 1 otherwise.
    const double omega0 = x == 0.0 ? 0.0 : 1.0;
    const double kappa = x == 0.0 ? 1.0 : 1.0 / x;
    const double T = x == 0.0 ? window_factor : window_factor * omega0 / kappa;
    const Schedule schedule(shape::Linear{kappa}, shape::Constant{omega0}, -T, T);
    const auto traj = propagate(schedule, TwoStateKet::down(), tol, 2);
    LzRow row;
    row.parameter = x;
    row.numeric = traj.final_state().p_down();
    row.analytic = std::exp(-std::numbers::pi * x / 2.0);
    row.error = std::abs(row.numeric - row.analytic);
    rows.push_back(row);
  }
  return rows;
}

void write_lz_csv(std::ostream& out, std::span<const LzRow> rows) {
  out << "omega0_sq_over_kappa,numeric,analytic,error\n";
  for (const auto& r : rows) {
    out << format_number(r.parameter) << ',' << format_number(r.numeric) << ',' << format_number(r.analytic)
        << ',' << format_number(r.error) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Figures

namespace {

struct FigureSetup {
  double reference_value;  // sweep value of the frame-(b) panel
  double time_unit;
  double amplitude_unit;
  const char* parameter_name;
};

FigureSetup figure_setup(int id) {
  switch (id) {
    case 1:
      // Ω₀ = 1: time in 2/Ω₀, amplitudes in Ω₀/2, σ in 2/Ω₀.
      return {1.0, 2.0, 0.5, "sigma"};
    case 2:
      return {1.0, 2.0, 0.5, "lambda"};
    case 3:
      // β = 1: time in √(2/β), amplitudes in √(β/2).
      return {1.0, std::sqrt(2.0), std::sqrt(0.5), "lambda"};
    default:
      throw ConfigError("figure id must be 1, 2 or 3");
  }
}

}  // namespace

ExperimentConfig figure_config(int id) {
  figure_setup(id);
  ExperimentConfig c;
  c.n_samples = 2;
  c.workers = 1;
  SweepSpec sweep;
  if (id == 1) {
    // Ω₀ = 1, κ/Ω₀² = 0.025, κT/Ω₀ = 50.
    const double kappa = 0.025;
    const double T = 50.0 / kappa;
    c.schedule = {{"delta", {{"kind", "linear"}, {"kappa", kappa}}},
                  {"omega", {{"kind", "exp_gap"}, {"omega0", 1.0}, {"sigma", 2.0}}},
                  {"t_start", -T},
                  {"t_end", T},
                  {"crossings", {0.0}}};
    sweep = {"omega.sigma", linspace(0.05, 4.0, 40), 2.0};
  } else if (id == 2) {
    // Ω₀ = 1, κ/Ω₀² = 0.025, κT/Ω₀ = 5; coupling magnitude |sin|.
    const double kappa = 0.025;
    const double T = 5.0 / kappa;
    c.schedule = {{"delta", {{"kind", "linear"}, {"kappa", kappa}}},
                  {"omega", {{"kind", "sine_abs"}, {"lam", 1.0}, {"omega0", 1.0}, {"T", T}}},
                  {"t_start", -T},
                  {"t_end", T},
                  {"crossings", {0.0}}};
    sweep = {"omega.lam", linspace(0.05, 3.0, 40), 1.0};
  } else {
    // β = 1, κ²/β = 5, βT² = 200.
    const double kappa = std::sqrt(5.0);
    const double T = std::sqrt(200.0);
    c.schedule = {{"delta", {{"kind", "linear"}, {"kappa", kappa}}},
                  {"omega", {{"kind", "t_sine"}, {"lam", 1.0}, {"beta", 1.0}, {"T", T}}},
                  {"t_start", -T},
                  {"t_end", T},
                  {"crossings", {0.0}}};
    sweep = {"omega.lam", linspace(0.05, 3.0, 40), 1.0};
  }
  c.sweep = std::move(sweep);
  return c;
}

FigureData emit_figure_data(int id, const ExperimentConfig& config, unsigned workers) {
  const FigureSetup setup = figure_setup(id);
  FigureData data;
  data.id = id;
  data.parameter_name = setup.parameter_name;
  data.frame_a = run_sweep(config, workers);

  const Schedule reference = build_schedule(config, setup.reference_value);
  auto& b = data.frame_b;
  b.time_unit = setup.time_unit;
  b.amplitude_unit = setup.amplitude_unit;
  b.t = uniform_grid(reference.t_start(), reference.t_end(), 2001);
  for (double t : b.t) {
    b.delta.push_back(reference.delta(t));
    b.omega.push_back(reference.omega(t));
  }
  return data;
}

void write_figure(const FigureData& data, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::string stem = "figure" + std::to_string(data.id);
  {
    auto f = open_output(out_dir / (stem + "_a.csv"));
    f << data.parameter_name
      << ",p_up_final,predicted_survival,abs_error,max_eta_outside_crossing,p_down_final,error\n";
    for (const auto& r : data.frame_a) {
      f << format_number(r.param_value) << ',' << format_number(r.p_up_final) << ','
        << format_number(r.predicted_survival) << ',' << format_number(r.abs_error) << ','
        << format_number(r.max_eta_outside_crossing) << ',' << format_number(r.p_down_final) << ','
        << csv_text(r.error) << '\n';
    }
  }
  auto f = open_output(out_dir / (stem + "_b.csv"));
  const auto& b = data.frame_b;
  f << "t,delta,omega,t_scaled,delta_scaled,omega_scaled\n";
  for (std::size_t i = 0; i < b.t.size(); ++i) {
    f << format_number(b.t[i]) << ',' << format_number(b.delta[i]) << ',' << format_number(b.omega[i]) << ','
      << format_number(b.t[i] / b.time_unit) << ',' << format_number(b.delta[i] / b.amplitude_unit) << ','
      << format_number(b.omega[i] / b.amplitude_unit) << '\n';
  }
}

}  // namespace realcross
