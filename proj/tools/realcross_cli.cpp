// realcross: command-line front end for real-crossing two-level simulations.
//
//   realcross run      --config cfg.json --out dir     trajectory.csv + report.json
//   realcross sweep    --config cfg.json --out dir     sweep.csv
//   realcross figure   --id 1|2|3 --out dir            figure<id>_a.csv + figure<id>_b.csv
//   realcross eta-scan --config cfg.json --out dir     eta_scan.csv + eta_summary.json
//   realcross lz-check --out dir                       lz_check.csv
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "realcross/errors.hpp"
#include "realcross/format.hpp"
#include "realcross/harness.hpp"

namespace fs = std::filesystem;
using namespace realcross;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Options {
  std::string config;
  std::string out = ".";
  std::optional<double> tol;
  std::optional<unsigned> workers;
  int figure_id = 1;
  std::vector<double> lz_values{1.0, 2.0, 4.0};
  double lz_window = 800.0;
};

ExperimentConfig load_with_overrides(const Options& opt) {
  if (opt.config.empty()) throw ConfigError("--config is required");
  ExperimentConfig cfg = load_config(opt.config);
  if (opt.tol) cfg.tol = *opt.tol;
  if (opt.workers) cfg.workers = *opt.workers;
  return cfg;
}

std::ofstream open_out(const fs::path& dir, const char* name) {
  fs::create_directories(dir);
  std::ofstream f(dir / name, std::ios::binary);
  if (!f) throw Error("cannot write " + (dir / name).string());
  return f;
}

int cmd_run(const Options& opt) {
  const auto cfg = load_with_overrides(opt);
  const auto run = run_single(cfg);
  write_single(run, opt.out);
  std::cout << "p_up_final=" << format_number(run.trajectory.final_state().p_up()) << '\n';
  return 0;
}

int cmd_sweep(const Options& opt) {
  const auto cfg = load_with_overrides(opt);
  const auto rows = run_sweep(cfg, cfg.workers);
  auto f = open_out(opt.out, "sweep.csv");
  write_sweep_csv(f, rows);
  std::cout << rows.size() << " sweep rows written\n";
  return 0;
}

int cmd_figure(const Options& opt) {
  ExperimentConfig cfg = figure_config(opt.figure_id);
  if (!opt.config.empty()) {
    // Optional overrides: "sweep.values", "tol", "workers".
    std::ifstream in(opt.config);
    if (!in) throw ConfigError("cannot read config file " + opt.config);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (j.contains("sweep") && j["sweep"].contains("values")) {
      cfg.sweep->values.clear();
      for (const auto& v : j["sweep"]["values"]) {
        if (!v.is_number()) throw ConfigError("field 'sweep.values' must be an array of numbers");
        cfg.sweep->values.push_back(v.get<double>());
      }
      if (cfg.sweep->values.empty()) throw ConfigError("field 'sweep.values' must be nonempty");
    }
    if (j.contains("tol")) {
      if (!j["tol"].is_number()) throw ConfigError("field 'tol' must be a number");
      cfg.tol = j["tol"].get<double>();
    }
    if (j.contains("workers")) {
      if (!j["workers"].is_number_unsigned()) throw ConfigError("field 'workers' must be a positive integer");
      cfg.workers = j["workers"].get<unsigned>();
    }
  }
  if (opt.tol) cfg.tol = *opt.tol;
  if (opt.workers) cfg.workers = *opt.workers;
  if (!(cfg.tol > 0.0 && cfg.tol <= 1e-2)) throw ConfigError("tol must lie in (0, 1e-2]");
  const auto data = emit_figure_data(opt.figure_id, cfg, cfg.workers);
  write_figure(data, opt.out);
  std::cout << "figure " << opt.figure_id << ": " << data.frame_a.size() << " sweep points\n";
  return 0;
}

int cmd_eta_scan(const Options& opt) {
  const auto cfg = load_with_overrides(opt);
  const Schedule schedule = build_schedule(cfg);
  const auto grid = uniform_grid(schedule.t_start(), schedule.t_end(), cfg.eta_grid_points);
  const double half_width = exclusion_half_width(cfg, schedule);
  const auto scan = eta_scan(schedule, grid, half_width);
  auto f = open_out(opt.out, "eta_scan.csv");
  f << "t,eta\n";
  for (const auto& s : scan.samples) {
    f << format_number(s.t) << ',' << format_number(s.eta ? *s.eta : std::numeric_limits<double>::quiet_NaN())
      << '\n';
  }
  auto js = open_out(opt.out, "eta_summary.json");
  js << nlohmann::json{{"max_eta_outside_crossing", scan.max_eta_outside},
                       {"exclusion_half_width", half_width},
                       {"grid_points", grid.size()}}
            .dump(2)
     << '\n';
  std::cout << "max_eta_outside_crossing=" << format_number(scan.max_eta_outside) << '\n';
  return 0;
}

int cmd_lz_check(const Options& opt) {
  // The finite-window error (~0.4/window_factor) dominates, so a looser
  // tolerance costs nothing in accuracy here.
  const double tol = opt.tol.value_or(1e-6);
  if (!(tol > 0.0 && tol <= 1e-2)) throw ConfigError("tol must lie in (0, 1e-2]");
  const auto rows = lz_check(opt.lz_values, opt.lz_window, tol);
  auto f = open_out(opt.out, "lz_check.csv");
  write_lz_csv(f, rows);
  for (const auto& r : rows) {
    std::cout << "omega0^2/kappa=" << format_number(r.parameter) << " numeric=" << format_number(r.numeric)
              << " analytic=" << format_number(r.analytic) << " error=" << format_number(r.error) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-level dynamics through a real level crossing"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", opt.config, "Experiment config (JSON)");
    if (config_required) c->required();
    sub->add_option("--out", opt.out, "Output directory")->capture_default_str();
    sub->add_option("--tol", opt.tol, "Integrator tolerance (default 1e-8)");
    sub->add_option("--workers", opt.workers, "Worker threads for sweeps");
  };

  auto* run = app.add_subcommand("run", "Single propagation with crossing report");
  add_common(run, true);
  auto* sweep = app.add_subcommand("sweep", "Parameter sweep");
  add_common(sweep, true);
  auto* figure = app.add_subcommand("figure", "Reproduce a reference experiment");
  add_common(figure, false);
  figure->add_option("--id", opt.figure_id, "Experiment id")->required()->check(CLI::IsMember({1, 2, 3}));
  auto* eta = app.add_subcommand("eta-scan", "Adiabaticity parameter along the window");
  add_common(eta, true);
  auto* lz = app.add_subcommand("lz-check", "Landau-Zener integrator check");
  add_common(lz, false);
  lz->get_option("--tol")->description("Integrator tolerance (default 1e-6)");
  lz->add_option("--values", opt.lz_values, "Omega0^2/kappa values")->capture_default_str();
  lz->add_option("--window-factor", opt.lz_window, "kappa*T/Omega0")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(opt);
    if (*sweep) return cmd_sweep(opt);
    if (*figure) return cmd_figure(opt);
    if (*eta) return cmd_eta_scan(opt);
    if (*lz) return cmd_lz_check(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const PreconditionError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
