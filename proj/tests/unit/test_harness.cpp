#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "realcross/errors.hpp"
#include "realcross/harness.hpp"

using namespace realcross;
using nlohmann::json;

namespace {

json fig1_config() {
  return {{"schedule",
           {{"delta", {{"kind", "linear"}, {"kappa", 0.025}}},
            {"omega", {{"kind", "exp_gap"}, {"omega0", 1.0}, {"sigma", 2.0}}},
            {"t_start", -2000.0},
            {"t_end", 2000.0},
            {"crossings", {0.0}}}},
          {"initial_state", "down"},
          {"n_samples", 2}};
}

std::string config_error(const json& j) {
  try {
    config_from_json(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  write_sweep_csv(os, rows);
  return os.str();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("config parsing") {
  auto j = fig1_config();
  j["initial_state"] = {{"c_down", {0.6, 0.0}}, {"c_up", {0.0, 0.8}}};
  j["tol"] = 1e-6;
  j["sweep"] = {{"parameter", "omega.sigma"}, {"values", {1.0, 2.0}}, {"scale", 2.0}};
  const auto c = config_from_json(j);
  CHECK(c.initial_state.c_down == Complex(0.6, 0.0));
  CHECK(c.initial_state.c_up == Complex(0.0, 0.8));
  CHECK(c.tol == 1e-6);
  CHECK(c.n_samples == 2);
  CHECK(c.sweep->values == std::vector<double>{1.0, 2.0});
  CHECK(eval(build_schedule(c, 1.5).omega_shape(), 3.0) == doctest::Approx(1.0 - std::exp(-1.0)));
  CHECK(exclusion_half_width(c, build_schedule(c)) == doctest::Approx(80.0));

  j = fig1_config();
  j["initial_state"] = "up";
  CHECK(config_from_json(j).initial_state.c_up == Complex(1.0, 0.0));
}

TEST_CASE("config errors name the field") {
  auto j = fig1_config();
  j.erase("schedule");
  CHECK(config_error(j).find("schedule") != std::string::npos);

  j = fig1_config();
  j["tol"] = 0.5;
  CHECK(config_error(j).find("tol") != std::string::npos);

  j = fig1_config();
  j["n_samples"] = 1;
  CHECK(config_error(j).find("n_samples") != std::string::npos);

  j = fig1_config();
  j["schedule"]["omega"]["sigma"] = "wide";
  CHECK(config_error(j).find("sigma") != std::string::npos);

  j = fig1_config();
  j["initial_state"] = {{"c_down", {1.0, 0.0}}, {"c_up", {1.0, 0.0}}};
  CHECK(config_error(j).find("initial_state") != std::string::npos);

  j = fig1_config();
  j["initial_state"] = "sideways";
  CHECK(config_error(j).find("initial_state") != std::string::npos);

  for (const char* path : {"omega.kind", "omega.nope", "omega", "t_end.x"}) {
    CAPTURE(path);
    j = fig1_config();
    j["sweep"] = {{"parameter", path}, {"values", {1.0}}};
    CHECK(config_error(j).find("sweep.parameter") != std::string::npos);
  }
  j = fig1_config();
  j["sweep"] = {{"parameter", "omega.sigma"}, {"values", json::array()}};
  CHECK(config_error(j).find("sweep.values") != std::string::npos);
}

TEST_CASE("run_single on a zero Hamiltonian") {
  const json j = {{"schedule",
                   {{"delta", {{"kind", "constant"}, {"c", 0.0}}},
                    {"omega", {{"kind", "constant"}, {"c", 0.0}}},
                    {"t_start", -1.0},
                    {"t_end", 1.0},
                    {"crossings", {0.0}}}},
                  {"n_samples", 5}};
  const auto run = run_single(config_from_json(j));
  for (const auto& k : run.trajectory.states) CHECK(k.c_down == Complex(1.0, 0.0));
  REQUIRE(run.crossings.size() == 1);
  CHECK_FALSE(run.crossings[0].report.has_value());
  const auto report = single_report_json(run);
  CHECK(report["degenerate"] == true);
  CHECK(report["crossings"][0]["status"] == "degenerate");
}

TEST_CASE("run_single reproduces the reference experiments") {
  auto fig1 = config_from_json(fig1_config());
  const auto run = run_single(fig1);
  CHECK(std::abs(run.trajectory.final_state().p_up() - 0.99751) <= 0.02);
  const auto report = single_report_json(run);
  CHECK(report["crossings"][0]["note"] == "same-order: ratio analysis required");

  const auto fig3 = figure_config(3);
  const auto r3 = run_single(fig3, 1.0);
  CHECK(r3.trajectory.final_state().p_up() <= 0.05);
  CHECK(r3.crossings[0].report->predicted_survival == 0.0);
}

TEST_CASE("write_single emits both files") {
  const auto dir = std::filesystem::temp_directory_path() / "realcross_unit_single";
  std::filesystem::remove_all(dir);
  auto j = fig1_config();
  j["n_samples"] = 11;
  j["tol"] = 1e-6;
  write_single(run_single(config_from_json(j)), dir);
  const auto csv = slurp(dir / "trajectory.csv");
  CHECK(csv.rfind("t,re_c_down,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 12);
  const auto report = json::parse(slurp(dir / "report.json"));
  CHECK(report["crossings"][0]["Theta"].get<double>() == doctest::Approx(std::atan(0.05)));
  std::filesystem::remove_all(dir);
}

TEST_CASE("sweep prediction columns") {
  auto c = figure_config(1);
  c.tol = 1e-5;
  c.sweep->values = {0.2, 0.6, 1.0, 1.4, 2.0};
  for (const auto& r : run_sweep(c, 1)) {
    const double sigma = 2.0 * r.param_value;
    CHECK(r.predicted_survival == doctest::Approx(std::pow(std::cos(std::atan(0.025 * sigma)), 2)).epsilon(1e-13));
    CHECK(std::abs(r.p_up_final + r.p_down_final - 1.0) <= 1e-9);
    CHECK(r.abs_error == std::abs(r.p_up_final - r.predicted_survival));
    CHECK(r.error.empty());
  }

  c = figure_config(2);
  c.tol = 1e-5;
  c.sweep->values = {0.5, 1.0, 2.0};
  const auto rows = run_sweep(c, 1);
  for (const auto& r : rows) {
    const double expected = 1.0 / (1.0 + std::pow(5.0 / (r.param_value * std::numbers::pi), 2));
    CHECK(r.predicted_survival == doctest::Approx(expected).epsilon(1e-13));
  }
  CHECK(rows[1].predicted_survival == doctest::Approx(0.28304319967510216).epsilon(1e-13));
}

TEST_CASE("single-value sweep equals run_single") {
  auto c = figure_config(3);
  c.sweep->values = {1.0};
  const auto rows = run_sweep(c, 1);
  const auto run = run_single(c, 1.0);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].p_up_final == run.trajectory.final_state().p_up());
  CHECK(rows[0].max_eta_outside_crossing == run.max_eta_outside);
}

TEST_CASE("sweeps are sorted, deterministic and keep going past failures") {
  auto c = figure_config(3);
  c.tol = 1e-6;
  c.sweep->values = {2.0, -1.0, 0.5, 0.0, 1.0, 0.25};
  auto check = [](const ExperimentConfig& cfg) {
    const auto one = run_sweep(cfg, 1);
    const auto csv = sweep_csv(one);
    CHECK(csv == sweep_csv(run_sweep(cfg, 3)));
    CHECK(csv == sweep_csv(run_sweep(cfg, 1)));
    for (std::size_t i = 1; i < one.size(); ++i) CHECK(one[i - 1].param_value <= one[i].param_value);
    return one;
  };
  const auto lam = check(c);
  // λ = 0 switches the coupling off; the limits are ±∞ and nothing fails.
  CHECK(lam[1].param_value == 0.0);
  CHECK(lam[1].error.empty());
  CHECK(lam[1].predicted_survival == 0.0);

  // A negative period is rejected for that point only.
  c.sweep = SweepSpec{"omega.T", {14.0, -1.0, 10.0, 20.0}, 1.0};
  const auto period = check(c);
  CHECK(period[0].param_value == -1.0);
  CHECK(period[0].error.find("error: ") == 0);
  CHECK(period[0].error.find("T") != std::string::npos);
  CHECK(std::isnan(period[0].predicted_survival));
  CHECK(sweep_csv(period).find("\n-1,nan,nan,nan,nan,nan,") != std::string::npos);
  for (std::size_t i = 1; i < period.size(); ++i) CHECK(period[i].error.empty());
}

TEST_CASE("sweep without a sweep block") {
  CHECK_THROWS_AS(run_sweep(config_from_json(fig1_config()), 1), ConfigError);
}

TEST_CASE("lz_check") {
  const std::vector<double> xs = {1.0, 2.0, 4.0};
  const auto rows = lz_check(xs, 800.0, 1e-6);
  for (const auto& r : rows) {
    CAPTURE(r.parameter);
    CHECK(r.analytic == doctest::Approx(std::exp(-std::numbers::pi * r.parameter / 2)));
    CHECK(r.error <= 1e-3);
  }
  CHECK(rows[0].analytic == doctest::Approx(0.20787957635076193).epsilon(1e-15));

  const std::vector<double> off = {0.0};
  CHECK(std::abs(lz_check(off, 50.0, 1e-8)[0].numeric - 1.0) <= 1e-12);

  const std::vector<double> strong = {40.0};
  const auto s = lz_check(strong, 800.0, 1e-6);
  CHECK(s[0].analytic < 1e-27);
  CHECK(s[0].numeric <= 1e-6);

  CHECK_THROWS_AS(lz_check(xs, 5.0, 1e-6), PreconditionError);

  std::ostringstream os;
  write_lz_csv(os, rows);
  CHECK(os.str().rfind("omega0_sq_over_kappa,numeric,analytic,error\n1,", 0) == 0);
}

TEST_CASE("figure data") {
  auto c = figure_config(1);
  c.sweep->values = {1.0};
  c.tol = 1e-6;
  const auto data = emit_figure_data(1, c, 1);
  CHECK(data.parameter_name == "sigma");
  const auto& b = data.frame_b;
  REQUIRE(b.t.size() == 2001);
  for (std::size_t i = 0; i < b.t.size(); ++i) {
    CHECK(b.omega[i] == doctest::Approx(1.0 - std::exp(-std::abs(b.t[i]) / 2.0)).epsilon(1e-14));
    CHECK(b.delta[i] == doctest::Approx(0.025 * b.t[i]).epsilon(1e-14));
  }
  CHECK(b.time_unit == 2.0);
  CHECK(b.amplitude_unit == 0.5);

  auto c3 = figure_config(3);
  c3.sweep->values = {0.3, 1.7};
  c3.tol = 1e-6;
  const auto d3 = emit_figure_data(3, c3, 2);
  for (const auto& r : d3.frame_a) CHECK(r.predicted_survival == 0.0);
  CHECK(d3.frame_b.time_unit == doctest::Approx(std::sqrt(2.0)));

  const auto dir = std::filesystem::temp_directory_path() / "realcross_unit_fig";
  std::filesystem::remove_all(dir);
  write_figure(d3, dir);
  CHECK(slurp(dir / "figure3_a.csv")
            .rfind("lambda,p_up_final,predicted_survival,abs_error,max_eta_outside_crossing,p_down_final,error\n0.3,",
                   0) == 0);
  CHECK(slurp(dir / "figure3_b.csv").rfind("t,delta,omega,t_scaled,delta_scaled,omega_scaled\n", 0) == 0);
  std::filesystem::remove_all(dir);

  // Default sweeps: 40 points over the declared ranges.
  CHECK(figure_config(1).sweep->values.size() == 40);
  CHECK(figure_config(1).sweep->values.front() == 0.05);
  CHECK(figure_config(1).sweep->values.back() == 4.0);
  CHECK(figure_config(2).sweep->values.back() == 3.0);
  CHECK_THROWS_AS(figure_config(4), ConfigError);
}
