// Batch front end: calibrate, run, estimate, make-toy.
// Exit codes: 0 success, 2 input error, 3 numerical failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include <fmt/format.h>

#include "sgem/calibration.hpp"
#include "sgem/error.hpp"
#include "sgem/estimation.hpp"
#include "sgem/io.hpp"
#include "sgem/scenario.hpp"
#include "sgem/toy.hpp"

namespace fs = std::filesystem;
using namespace sgem;

namespace {

constexpr int kInputError = 2;
constexpr int kNumericalError = 3;

struct RunConfig {
  fs::path model;
  fs::path calib;
  fs::path params;
  fs::path closure;
  fs::path solver;
  fs::path scenario;
  fs::path panel;
  fs::path truth;
  fs::path out = "out";
  std::optional<int> horizon;
  bool trace = false;
  std::uint64_t seed = 42;
  std::string channels;
  std::size_t regions = 2;
  std::size_t sectors = 2;
  double growth_rate = 0.0;
};

void require(const fs::path& p, const char* flag) {
  if (p.empty()) throw StructuralError(fmt::format("{} is required", flag));
  if (!fs::exists(p)) throw StructuralError(fmt::format("{} {}: no such file", flag, p.string()));
}

CalibrationConfig calibration_config(const RunConfig& c) {
  if (c.calib.empty()) return {};
  require(c.calib, "--calib");
  return load_calibration_config(c.calib);
}

// Validates, calibrates and writes the reports. Returns the result and whether the
// benchmark replicates.
std::pair<CalibrationResult, bool> calibrate_model(const ModelInput& in, const RunConfig& c,
                                                   const fs::path& dir) {
  const auto validation = validate_benchmark(in.data);
  write_validation_report(dir / "validation.csv", validation);
  if (!validation.ok()) {
    for (const auto& f : validation.flagged())
      fmt::print(stderr, "broken identity {} {} {}: {} vs {} (relative {:.3g})\n", to_string(f.kind),
                 f.region, f.sector, f.lhs, f.rhs, f.relative_residual);
    throw StructuralError("benchmark fails its accounting identities; see validation.csv");
  }
  auto cal = calibrate(in.data, in.dynamics, in.growth, calibration_config(c));
  write_calibration_report(dir / "calibration.csv", cal.report);
  for (const auto& w : cal.warnings)
    fmt::print(stderr, "LES subsistence capped: {} {} {} ({:.4g} -> {:.4g})\n", w.agent, w.region,
               w.sector, w.requested, w.clamped);
  const bool ok = cal.max_residual() < 1e-8;
  return {std::move(cal), ok};
}

int cmd_calibrate(const RunConfig& c) {
  require(c.model, "--model");
  const auto in = load_model(c.model);
  fs::create_directories(c.out);
  auto [cal, ok] = calibrate_model(in, c, c.out);
  write_json(c.out / "parameters.json", Json(cal.params));
  fmt::print("calibrated {} regions x {} sectors, max replication residual {:.3g}\n",
             in.data.dims.n_regions(), in.data.dims.n_sectors(), cal.max_residual());
  return ok ? 0 : kNumericalError;
}

void write_run(const fs::path& dir, const StatePath& path, const Dimensions& dims, bool trace) {
  write_states_csv(dir / "states.csv", path.states, dims);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t t = 0; t < path.states.size(); ++t) {
    const auto& rep = path.reports[t];
    rows.push_back({std::to_string(path.states[t].year), std::to_string(rep.iterations),
                    format_number(rep.max_residual), format_number(rep.walras)});
    if (trace) write_trace(dir / "trace" / fmt::format("{}.csv", path.states[t].year), rep.trace);
  }
  write_csv(dir / "solves.csv", {"year", "iterations", "max_residual", "walras"}, rows);
}

int cmd_run(const RunConfig& c) {
  require(c.model, "--model");
  const auto in = load_model(c.model);
  const auto& dims = in.data.dims;
  fs::create_directories(c.out);

  SimulationModel m;
  if (!c.params.empty()) {
    require(c.params, "--params");
    m.params = read_json(c.params).get<ParameterSet>();
    if (!(m.params.dims == dims)) throw StructuralError("--params does not match the model dimensions");
  } else {
    auto [cal, ok] = calibrate_model(in, c, c.out);
    if (!ok) throw NumericalError(fmt::format("calibration does not replicate the benchmark ({:.3g})",
                                              cal.max_residual()));
    m.params = std::move(cal.params);
  }
  if (!c.closure.empty()) {
    require(c.closure, "--closure");
    m.closure = load_closure(c.closure, dims);
  }
  if (!c.solver.empty()) {
    require(c.solver, "--solver");
    m.solver = load_solver_config(c.solver);
  }
  m.start = benchmark_state(in.data, m.params);
  const int horizon = c.horizon.value_or(dims.last_year() - dims.first_year());
  if (horizon < 0 || dims.first_year() + horizon > dims.last_year())
    throw StructuralError(fmt::format("--horizon {} leaves the model years {}-{}", horizon,
                                      dims.first_year(), dims.last_year()));

  try {
    if (c.scenario.empty()) {
      const auto base = run_baseline(m, horizon);
      write_run(c.out / "baseline", base, dims, c.trace);
      fmt::print("baseline {}-{} solved\n", base.states.front().year, base.states.back().year);
      return 0;
    }
    require(c.scenario, "--scenario");
    const auto sc = load_scenario(c.scenario);
    std::vector<ShockAuditRow> audit;
    const auto shocks = build_shocks(sc.table, sc.map, in.data, m.params, &audit);
    write_shock_audit(c.out / "shocks_audit.csv", audit);

    const auto ch = c.channels.empty() ? ChannelSet{true, true} : parse_channels(c.channels);
    if (!(ch.tfp && ch.demand)) {
      const auto base = run_baseline(m, horizon);
      const auto cf = run_counterfactual(m, shocks, horizon, ch);
      write_run(c.out / "baseline", base, dims, c.trace);
      write_run(c.out / "counterfactual", cf, dims, c.trace);
      ScenarioRuns runs{base, ch.tfp && !ch.demand ? cf : base, !ch.tfp && ch.demand ? cf : base, cf};
      write_effect_report(c.out / "effects", decompose_effects(runs, shocks, dims, sc.map));
      return 0;
    }
    const auto runs = run_scenario(m, shocks, horizon);
    write_run(c.out / "baseline", runs.baseline, dims, c.trace);
    write_run(c.out / "tfp", runs.tfp, dims, c.trace);
    write_run(c.out / "demand", runs.demand, dims, c.trace);
    write_run(c.out / "full", runs.full, dims, c.trace);
    const auto rep = decompose_effects(runs, shocks, dims, sc.map);
    write_effect_report(c.out / "effects", rep);
    fmt::print("scenario {}-{}: aggregate direct {:.6g}, total {:.6g}, ratio {:.4g}\n",
               runs.baseline.states.front().year, runs.baseline.states.back().year,
               rep.aggregate_total.direct, rep.aggregate_total.total, rep.total_direct_ratio);
    return 0;
  } catch (const SolveFailure& e) {
    write_trace(c.out / "failure_trace.csv", e.report().trace);
    throw;
  }
}

int cmd_estimate(const RunConfig& c) {
  require(c.panel, "--panel");
  const auto panel = read_panel_csv(c.panel);
  const auto design = build_regressors(panel);
  if (design.rows.empty())
    throw StructuralError(fmt::format("{}: no unit has two consecutive years", c.panel.string()));
  fs::create_directories(c.out);

  std::vector<std::pair<std::string, RegressionResult>> fits;
  fits.emplace_back("sector", fit_lsdv(design, {true, false, false}));
  fits.emplace_back("country_sector", fit_lsdv(design, {true, true, false}));
  fits.emplace_back("country_sector_trend", fit_lsdv(design, {true, true, true}));
  write_growth_table(c.out / "growth_coefficients.csv", fits);

  std::map<std::string, SectorGroup> groups;
  const auto& nace = default_nace_groups();
  for (const auto& s : design.sectors) {
    const auto it = nace.find(s);
    if (it != nace.end()) groups[s] = it->second;
    else fmt::print(stderr, "sector {} has no R&D group; left out of the group AR(1) fits\n", s);
  }
  std::vector<std::pair<std::string, Ar1Result>> ar;
  ar.emplace_back("Pooled", fit_ar1(panel));
  for (const auto& [g, res] : fit_ar1_by_group(panel, groups)) ar.emplace_back(std::string(to_string(g)), res);
  write_rd_table(c.out / "rd_process.csv", ar);

  const auto& main = fits[1].second;
  fmt::print("{} observations, adjusted R2 {:.4f}\n", main.observations, main.r2_adj);
  if (!c.truth.empty()) {
    require(c.truth, "--truth");
    const auto t = read_json(c.truth).at("coefficients");
    std::vector<std::vector<std::string>> rows;
    bool all = true;
    for (std::size_t k = 0; k < main.names.size(); ++k) {
      const double truth = t.at(main.names[k]).get<double>();
      const double z = main.se[k] > 0.0 ? (main.coef[k] - truth) / main.se[k] : 0.0;
      // An exact panel has zero standard errors; allow for rounding there.
      const bool within = std::abs(main.coef[k] - truth) <= std::max(2.0 * main.se[k], 1e-8);
      all = all && within;
      rows.push_back({main.names[k], format_number(truth), format_number(main.coef[k]),
                      format_number(main.se[k]), format_number(z), within ? "yes" : "no"});
      fmt::print("{} truth {:.4f} estimate {:.4f} se {:.4f}\n", main.names[k], truth, main.coef[k], main.se[k]);
    }
    write_csv(c.out / "recovery.csv", {"term", "truth", "estimate", "se", "z", "within_2se"}, rows);
    fmt::print("all coefficients within 2 s.e.: {}\n", all ? "yes" : "no");
  }
  return 0;
}

int cmd_make_toy(const RunConfig& c) {
  if (c.regions < 2 || c.sectors < 2) throw StructuralError("make-toy needs at least 2 regions and 2 sectors");
  ToySpec spec;
  spec.regions = c.regions;
  spec.sectors = c.sectors;
  spec.seed = c.seed;
  spec.growth_rate = c.growth_rate;
  const auto toy = make_toy(spec);
  ModelInput in{toy.data, toy.dynamics, GrowthParams::defaults()};
  save_model(c.out / "model", in);
  save_scenario(c.out / "scenario", make_toy_scenario(toy.data, c.seed));

  PanelSpec ps;
  ps.seed = c.seed;
  for (double noise : {ps.noise, 0.0}) {
    auto p = ps;
    p.noise = noise;
    p.rd_noise = noise > 0.0 ? ps.rd_noise : 0.0;
    const auto syn = make_panel(p);
    const auto dir = c.out / (noise > 0.0 ? "panel" : "panel_exact");
    write_panel_csv(dir / "panel.csv", syn.panel);
    Json truth;
    const auto& k = p.truth;
    truth["coefficients"] = {{"b1", k.b1}, {"b2", k.b2}, {"b3", k.b3}, {"b4", k.b4}, {"b5", k.b5}, {"b6", k.b6}};
    for (const auto& [g, proc] : syn.rd_truth)
      truth["rd_process"][std::string(to_string(g))] = {{"a", proc.a}, {"c", proc.c}};
    truth["noise"] = p.noise;
    truth["rd_noise"] = p.rd_noise;
    truth["seed"] = p.seed;
    write_json(dir / "truth.json", truth);
  }
  fmt::print("toy {}x{} (seed {}) written to {}\n", c.regions, c.sectors, c.seed, c.out.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial general equilibrium model: calibration, simulation, scenarios and estimation"};
  app.require_subcommand(1);
  RunConfig c;

  auto* cal = app.add_subcommand("calibrate", "Calibrate a benchmark and report replication residuals");
  auto* run = app.add_subcommand("run", "Simulate the baseline, optionally against a scenario");
  auto* est = app.add_subcommand("estimate", "Fit the growth regression and the R&D process on a panel");
  auto* toy = app.add_subcommand("make-toy", "Write a balanced synthetic model, scenario and panel");

  for (auto* sub : {cal, run}) {
    sub->add_option("--model", c.model, "Model manifest (manifest.json)");
    sub->add_option("--calib", c.calib, "Calibration config (JSON)");
    sub->add_option("--out", c.out, "Output directory");
  }
  run->add_option("--params", c.params, "Parameters written by calibrate, instead of calibrating");
  run->add_option("--closure", c.closure, "Closure spec (JSON)");
  run->add_option("--solver", c.solver, "Solver config (JSON)");
  run->add_option("--scenario", c.scenario, "Scenario manifest (JSON)");
  run->add_option("--horizon", c.horizon, "Years simulated after the benchmark year");
  run->add_flag("--trace", c.trace, "Write the Newton trace of every solve");
  run->add_option("--channels", c.channels, "Single counterfactual with these channels: tfp,demand");
  est->add_option("--panel", c.panel, "Panel CSV (country,sector,year,tfp,h,rd)");
  est->add_option("--truth", c.truth, "Generator truth file to compare against");
  est->add_option("--out", c.out, "Output directory");
  toy->add_option("--seed", c.seed, "Random seed");
  toy->add_option("--regions", c.regions, "Number of regions");
  toy->add_option("--sectors", c.sectors, "Number of sectors");
  toy->add_option("--growth-rate", c.growth_rate, "Exogenous growth rate g of every region");
  toy->add_option("--out", c.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    if (*cal) return cmd_calibrate(c);
    if (*run) return cmd_run(c);
    if (*est) return cmd_estimate(c);
    if (*toy) return cmd_make_toy(c);
  } catch (const NumericalError& e) {
    fmt::print(stderr, "numerical failure: {}\n", e.what());
    return kNumericalError;
  } catch (const DomainError& e) {
    fmt::print(stderr, "numerical failure: {}\n", e.what());
    return kNumericalError;
  } catch (const Error& e) {
    fmt::print(stderr, "input error: {}\n", e.what());
    return kInputError;
  } catch (const std::exception& e) {
    fmt::print(stderr, "input error: {}\n", e.what());
    return kInputError;
  }
  return 0;
}
