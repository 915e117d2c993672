#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sgem/benchmark.hpp"
#include "sgem/equilibrium.hpp"
#include "sgem/growth.hpp"
#include "sgem/parameters.hpp"
#include "sgem/state.hpp"

namespace sgem {

enum class SpendingCategory { Business, Education, Other, Research };

std::string_view to_string(SpendingCategory c);
SpendingCategory parse_spending_category(std::string_view name);

struct ExpenditureRecord {
  std::string region;
  std::string kic;
  SpendingCategory category = SpendingCategory::Other;
  int year = 0;
  double amount = 0.0;  // currency units
};

/// Budget split of one year. Shares are fractions of the total programme budget
/// spent in that year; the co-funding rate is the private leverage on supported
/// investment.
struct BudgetAssumption {
  int year = 0;
  double cofunding_rate = 0.0;
  double kic_share = 0.0;
  double direct_share = 0.0;
  double admin_share = 0.0;
};

struct ExpenditureTable {
  std::vector<ExpenditureRecord> records;
  std::map<int, BudgetAssumption> assumptions;

  /// Throws StructuralError on negative amounts, rates outside [0,1] or duplicate years.
  void check() const;
  std::map<SpendingCategory, double> category_totals() const;
};

ExpenditureTable read_expenditure(const std::filesystem::path& expenditure,
                                  const std::filesystem::path& assumptions);
void write_expenditure(const std::filesystem::path& expenditure,
                       const std::filesystem::path& assumptions, const ExpenditureTable& t);

/// Rules turning spending into model shocks.
///
/// Research and Business spending raises R&D intensity: the regional amount is spread
/// over sectors by `rd_weights` (default: benchmark value-added weights within
/// `rd_groups`) and divided by the sector's value added. Education spending raises H
/// by one percentage point per `h_cost_per_point` of the regional wage bill. Other
/// and administrative spending becomes purchases of the government basket, financed
/// by a levy on `financing_regions` proportional to benchmark GDP.
///
/// With `pattern_year` set, records of that year only fix the regional and category
/// pattern, and yearly amounts follow `total_budget` times the assumption shares.
struct ShockMap {
  double currency_scale = 1.0;  // model value units per currency unit
  std::optional<double> h_cost_per_point;
  std::vector<SectorGroup> rd_groups{SectorGroup::HighTech, SectorGroup::KnowledgeServices};
  std::map<std::string, std::map<std::string, double>> rd_weights;  // region -> sector -> weight
  std::optional<int> pattern_year;
  double total_budget = 0.0;
  std::vector<std::string> financing_regions;  // empty: all regions
  std::vector<std::string> aggregate_regions;  // the "EU" aggregate; empty: all regions
};

struct Scenario {
  ExpenditureTable table;
  ShockMap map;
};

/// Reads a scenario manifest (JSON) and the two CSV tables it references.
Scenario load_scenario(const std::filesystem::path& manifest);
std::filesystem::path save_scenario(const std::filesystem::path& dir, const Scenario& s);

/// Shocks of one year. `rd` and `h` feed the growth step out of that year; `demand`
/// and `levy` enter that year's equilibrium. Monetary entries are model units.
struct YearShocks {
  Array2 rd;
  std::vector<double> h;
  std::vector<double> demand;
  std::vector<double> levy;
  std::vector<double> expenditure;  // public programme spending, currency units
};

struct ShockSeries {
  std::map<int, YearShocks> years;

  /// True when every shock entry is zero.
  bool zero() const;
  /// Regions with a nonzero R&D or H shock in some year.
  std::vector<bool> tfp_supported(std::size_t regions) const;
};

struct ShockAuditRow {
  int year = 0;
  std::string region;
  std::string source;  // category, "direct" or "admin"
  double amount = 0.0;  // public amount, currency units
  double gross = 0.0;   // after co-funding leverage
  std::string target;   // "rd", "h", "demand", "levy"
  std::string sector;   // rd targets only
  double shock = 0.0;
};

/// Converts the table into per-year shocks for the model described by `data` and
/// `params`. Throws StructuralError listing regions absent from the model, and when
/// a needed assumption year or the H cost coefficient is missing.
ShockSeries build_shocks(const ExpenditureTable& table, const ShockMap& map,
                         const BenchmarkDataset& data, const ParameterSet& params,
                         std::vector<ShockAuditRow>* audit = nullptr);

void write_shock_audit(const std::filesystem::path& path, const std::vector<ShockAuditRow>& rows);

/// Which shock channels a counterfactual applies.
struct ChannelSet {
  bool tfp = false;
  bool demand = false;

  bool operator==(const ChannelSet&) const = default;
};

/// Parses a comma-separated list of "tfp" and "demand"; empty means none.
ChannelSet parse_channels(std::string_view text);

/// A calibrated model ready to simulate from its benchmark year.
struct SimulationModel {
  ParameterSet params;
  EconomyState start;
  ClosureSpec closure;
  SolverConfig solver;
};

/// Solved states for years start.year .. start.year + horizon.
struct StatePath {
  std::vector<EconomyState> states;
  std::vector<SolveReport> reports;
};

/// Throws SolveFailure whose message names the failing year.
StatePath run_baseline(const SimulationModel& m, int horizon);
StatePath run_counterfactual(const SimulationModel& m, const ShockSeries& shocks, int horizon,
                             ChannelSet channels);

struct ScenarioRuns {
  StatePath baseline;
  StatePath tfp;     // growth shocks only
  StatePath demand;  // purchases and levy only
  StatePath full;
};

/// The baseline and the three channel runs, run concurrently.
ScenarioRuns run_scenario(const SimulationModel& m, const ShockSeries& shocks, int horizon);

/// One (region, year) of the effect report. Money is in currency units; effects are
/// deviations of real GDP from the baseline.
struct EffectRow {
  std::string region;
  int year = 0;
  double expenditure = 0.0;
  double baseline_gdp = 0.0;
  double counterfactual_gdp = 0.0;
  double direct = 0.0;       // growth-shock run, supported regions only
  double total = 0.0;        // full run
  double demand = 0.0;       // demand-only run
  double structural = 0.0;   // growth-shock run, every region
  double interaction = 0.0;  // total - demand - structural
  double cost_share = 0.0;   // levy over baseline nominal GDP
};

struct CumulativeEffect {
  std::string region;
  double expenditure = 0.0;
  double direct = 0.0;
  double total = 0.0;
  double demand = 0.0;
  double structural = 0.0;
  double interaction = 0.0;
};

struct EffectReport {
  std::vector<EffectRow> rows;  // region-major, years ascending
  std::vector<CumulativeEffect> cumulative;
  std::vector<bool> supported;
  std::vector<bool> aggregate;
  CumulativeEffect aggregate_total;  // region "EU"
  double total_direct_ratio = 0.0;   // NaN when the direct effect vanishes
};

/// Throws StructuralError when the runs do not share years.
EffectReport decompose_effects(const ScenarioRuns& runs, const ShockSeries& shocks,
                               const Dimensions& dims, const ShockMap& map);

/// effects.csv, cumulative.csv, plot_data.csv and region_values.json.
void write_effect_report(const std::filesystem::path& dir, const EffectReport& rep);

/// Standard toy scenario: a subset of regions receives spending in all four
/// categories during the first seven simulated years.
Scenario make_toy_scenario(const BenchmarkDataset& data, std::uint64_t seed);

}  // namespace sgem
