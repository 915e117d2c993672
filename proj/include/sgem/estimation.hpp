#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sgem/dimensions.hpp"
#include "sgem/growth.hpp"

namespace sgem {

struct PanelObservation {
  std::string country;
  std::string sector;
  int year = 0;
  double tfp = 1.0;
  double h = 0.0;   // high-skill share of employment
  double rd = 0.0;  // private R&D spending per unit of value added
};

struct PanelDataset {
  std::vector<PanelObservation> observations;

  /// Throws StructuralError on TFP <= 0, H outside [0,1], RD < 0 or duplicate keys.
  void check() const;
  bool balanced() const;
};

PanelDataset read_panel_csv(const std::filesystem::path& path);
void write_panel_csv(const std::filesystem::path& path, const PanelDataset& panel);

/// One usable observation of the growth regression, built from years t-1 and t.
struct DesignRow {
  std::size_t country = 0;
  std::size_t sector = 0;
  int year = 0;
  double growth = 0.0;           // dln TFP
  double frontier_growth = 0.0;  // dln TFP*
  double gap = 0.0;              // ln(TFP / TFP*) at t-1
  double h = 0.0;                // H at t-1
  double rd = 0.0;               // RD at t-1
  double h_gap = 0.0;
  double rd_gap = 0.0;
  bool frontier = false;  // this country defines TFP* in year t
};

struct Design {
  std::vector<std::string> countries;
  std::vector<std::string> sectors;
  std::vector<DesignRow> rows;
  std::size_t dropped_units = 0;  // units without two consecutive years
};

/// Regressors of the growth equation. The frontier of (sector, year) is the maximum
/// TFP over the countries observed in that year. Rows of the country holding the
/// frontier in year t are kept but flagged: their growth is the frontier growth
/// regressor itself, so the fits leave them out.
Design build_regressors(const PanelDataset& panel);

/// Dummy blocks: sector effects, country-sector effects, country-specific linear trends.
/// Country-sector effects absorb sector effects, so d_s is ignored when d_sc is set.
struct FixedEffects {
  bool sector = true;          // d_s
  bool country_sector = false; // d_sc
  bool country_trend = false;  // d_ct

  bool operator==(const FixedEffects&) const = default;
};

struct RegressionResult {
  std::vector<std::string> names;
  std::vector<double> coef;
  std::vector<double> se;
  std::size_t observations = 0;
  std::size_t parameters = 0;  // including dummies and the constant
  double r2_adj = 0.0;
  double rss = 0.0;
  FixedEffects fe;

  GrowthCoefficients growth_coefficients() const;
};

/// OLS on the six regressors plus a constant and the requested dummy blocks, with
/// classical standard errors, over the non-frontier rows. Dummy coefficients are
/// not reported. Throws
/// NumericalError naming the collinear columns when the design is rank deficient.
RegressionResult fit_lsdv(const Design& design, const FixedEffects& fe);

/// Within (demeaned by country-sector) estimator; equal to fit_lsdv with d_sc only.
RegressionResult fit_within(const Design& design);

struct Ar1Result {
  RnDProcess process;
  double se_a = 0.0;
  double se_c = 0.0;
  std::size_t observations = 0;
  double r2_adj = 0.0;
  double long_run = 0.0;  // NaN when |a| >= 1
  bool near_collinear = false;
};

/// Pooled OLS of RD on its lag and a constant over the selected sectors (all when
/// empty). Every used unit needs at least three consecutive years.
Ar1Result fit_ar1(const PanelDataset& panel, const std::vector<std::string>& sectors = {});

/// fit_ar1 per sector group present in the panel.
std::map<SectorGroup, Ar1Result> fit_ar1_by_group(const PanelDataset& panel,
                                                  const std::map<std::string, SectorGroup>& groups);

/// Synthetic panel, the oracle for recovery tests. Country C01 is an outside frontier
/// economy on an exogenous path well ahead of the rest; every other country follows
/// the growth equation exactly, plus country-sector effects and noise.
struct PanelSpec {
  std::size_t countries = 28;
  std::size_t sectors = 6;
  std::size_t years = 21;  // 20 growth observations per unit
  int first_year = 2000;
  double noise = 0.01;
  double rd_noise = 0.001;
  double effect_scale = 0.005;  // std of the country-sector effects
  double frontier_growth = 0.1;  // mean growth of the frontier economy
  double frontier_noise = 0.03;
  std::uint64_t seed = 7;
  GrowthCoefficients truth{0.10, -0.47, 0.03, 0.29, 0.26, 0.47};
};

struct SyntheticPanel {
  PanelDataset panel;
  std::map<std::string, SectorGroup> groups;
  std::map<SectorGroup, RnDProcess> rd_truth;
};

SyntheticPanel make_panel(const PanelSpec& spec);

/// Table-shaped outputs: one column per fit, rows b1..b6 with standard errors,
/// observations and adjusted R^2.
void write_growth_table(const std::filesystem::path& path,
                        const std::vector<std::pair<std::string, RegressionResult>>& fits);
void write_rd_table(const std::filesystem::path& path,
                    const std::vector<std::pair<std::string, Ar1Result>>& fits);

}  // namespace sgem
