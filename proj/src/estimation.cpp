#include "sgem/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <tuple>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "sgem/error.hpp"
#include "sgem/io.hpp"
#include "sgem/toy.hpp"

namespace sgem {

void PanelDataset::check() const {
  std::set<std::tuple<std::string, std::string, int>> keys;
  for (const auto& o : observations) {
    const auto where = fmt::format("{}/{}/{}", o.country, o.sector, o.year);
    if (!(o.tfp > 0.0) || !std::isfinite(o.tfp))
      throw StructuralError(fmt::format("panel {}: TFP must be positive", where));
    if (!(o.h >= 0.0 && o.h <= 1.0))
      throw StructuralError(fmt::format("panel {}: H must lie in [0,1]", where));
    if (!(o.rd >= 0.0) || !std::isfinite(o.rd))
      throw StructuralError(fmt::format("panel {}: RD must be nonnegative", where));
    if (!keys.emplace(o.country, o.sector, o.year).second)
      throw StructuralError(fmt::format("panel {}: duplicate observation", where));
  }
}

bool PanelDataset::balanced() const {
  std::set<std::pair<std::string, std::string>> units;
  std::set<int> years;
  for (const auto& o : observations) {
    units.emplace(o.country, o.sector);
    years.insert(o.year);
  }
  return observations.size() == units.size() * years.size();
}

PanelDataset read_panel_csv(const std::filesystem::path& path) {
  const auto t = read_csv(path);
  const auto cc = t.column("country"), cs = t.column("sector"), cy = t.column("year"),
             ct = t.column("tfp"), ch = t.column("h"), cr = t.column("rd");
  PanelDataset p;
  p.observations.reserve(t.rows.size());
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const double year = t.number(k, cy);
    if (year != std::floor(year))
      throw StructuralError(fmt::format("{} line {}: year must be an integer", path.string(), k + 2));
    p.observations.push_back({t.text(k, cc), t.text(k, cs), static_cast<int>(year), t.number(k, ct),
                              t.number(k, ch), t.number(k, cr)});
  }
  p.check();
  return p;
}

void write_panel_csv(const std::filesystem::path& path, const PanelDataset& panel) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(panel.observations.size());
  for (const auto& o : panel.observations)
    rows.push_back({o.country, o.sector, std::to_string(o.year), format_number(o.tfp),
                    format_number(o.h), format_number(o.rd)});
  write_csv(path, {"country", "sector", "year", "tfp", "h", "rd"}, rows);
}

namespace {

// Observations indexed by (country, sector) with years sorted.
struct Indexed {
  std::vector<std::string> countries, sectors;
  std::map<std::pair<std::size_t, std::size_t>, std::map<int, const PanelObservation*>> units;
};

Indexed index_panel(const PanelDataset& panel) {
  Indexed ix;
  std::set<std::string> cs, ss;
  for (const auto& o : panel.observations) {
    cs.insert(o.country);
    ss.insert(o.sector);
  }
  ix.countries.assign(cs.begin(), cs.end());
  ix.sectors.assign(ss.begin(), ss.end());
  auto pos = [](const std::vector<std::string>& v, const std::string& s) {
    return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), s) - v.begin());
  };
  for (const auto& o : panel.observations)
    ix.units[{pos(ix.countries, o.country), pos(ix.sectors, o.sector)}][o.year] = &o;
  return ix;
}

}  // namespace

Design build_regressors(const PanelDataset& panel) {
  panel.check();
  const auto ix = index_panel(panel);
  Design d;
  d.countries = ix.countries;
  d.sectors = ix.sectors;

  // Frontier log level per (sector, year).
  std::map<std::pair<std::size_t, int>, double> frontier;
  for (const auto& [unit, years] : ix.units)
    for (const auto& [y, o] : years) {
      auto [it, fresh] = frontier.emplace(std::pair{unit.second, y}, std::log(o->tfp));
      if (!fresh) it->second = std::max(it->second, std::log(o->tfp));
    }

  for (const auto& [unit, years] : ix.units) {
    bool used = false;
    for (const auto& [y, o] : years) {
      const auto prev = years.find(y - 1);
      if (prev == years.end()) continue;
      const auto* p = prev->second;
      const double f_now = frontier.at({unit.second, y});
      const double f_prev = frontier.at({unit.second, y - 1});
      DesignRow r;
      r.country = unit.first;
      r.sector = unit.second;
      r.year = y;
      r.growth = std::log(o->tfp) - std::log(p->tfp);
      r.frontier_growth = f_now - f_prev;
      r.gap = std::log(p->tfp) - f_prev;
      r.h = p->h;
      r.rd = p->rd;
      r.h_gap = r.h * r.gap;
      r.rd_gap = r.rd * r.gap;
      r.frontier = std::log(o->tfp) == f_now;
      d.rows.push_back(r);
      used = true;
    }
    if (!used) ++d.dropped_units;
  }
  return d;
}

GrowthCoefficients RegressionResult::growth_coefficients() const {
  if (coef.size() < 6) throw StructuralError("regression result has fewer than six coefficients");
  return {coef[0], coef[1], coef[2], coef[3], coef[4], coef[5]};
}

namespace {

const std::vector<std::string> kRegressors = {"b1", "b2", "b3", "b4", "b5", "b6"};

void fill_regressors(const DesignRow& r, double* x) {
  x[0] = r.frontier_growth;
  x[1] = r.gap;
  x[2] = r.h;
  x[3] = r.h_gap;
  x[4] = r.rd;
  x[5] = r.rd_gap;
}

// OLS with classical standard errors for the first `report` columns.
RegressionResult ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const std::vector<std::string>& names, std::size_t report,
                     std::size_t absorbed, bool centered_tss) {
  const auto n = X.rows();
  const auto p = X.cols();
  if (n <= p + static_cast<Eigen::Index>(absorbed))
    throw NumericalError(fmt::format("design has {} rows for {} parameters", n, p + absorbed));
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) {
    std::vector<std::string> bad;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index k = qr.rank(); k < p; ++k) bad.push_back(names[perm[k]]);
    throw NumericalError(fmt::format("rank-deficient design; collinear columns: {}",
                                     fmt::join(bad, ", ")));
  }
  const Eigen::VectorXd beta = qr.solve(y);
  const Eigen::VectorXd resid = y - X * beta;
  const double rss = resid.squaredNorm();
  const double df = static_cast<double>(n - p) - static_cast<double>(absorbed);
  const double sigma2 = rss / df;

  const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd Rinv =
      R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd cov_perm = Rinv * Rinv.transpose();
  const auto& perm = qr.colsPermutation().indices();
  std::vector<Eigen::Index> where(p);
  for (Eigen::Index k = 0; k < p; ++k) where[perm[k]] = k;

  RegressionResult out;
  for (std::size_t k = 0; k < report; ++k) {
    out.names.push_back(names[k]);
    out.coef.push_back(beta[k]);
    const double v = sigma2 * cov_perm(where[k], where[k]);
    out.se.push_back(std::sqrt(std::max(v, 0.0)));
  }
  out.observations = static_cast<std::size_t>(n);
  out.parameters = static_cast<std::size_t>(p) + absorbed;
  out.rss = rss;
  const double mean = centered_tss ? y.mean() : 0.0;
  const double tss = (y.array() - mean).square().sum();
  out.r2_adj = tss > 0.0 ? 1.0 - (rss / df) / (tss / static_cast<double>(n - 1)) : 1.0;
  return out;
}

}  // namespace

namespace {

std::vector<const DesignRow*> estimation_rows(const Design& d) {
  std::vector<const DesignRow*> rows;
  for (const auto& r : d.rows)
    if (!r.frontier) rows.push_back(&r);
  return rows;
}

}  // namespace

RegressionResult fit_lsdv(const Design& d, const FixedEffects& fe) {
  const auto used = estimation_rows(d);
  const auto n = used.size();
  const auto C = d.countries.size();
  const auto S = d.sectors.size();
  std::vector<std::string> names = kRegressors;
  names.push_back("constant");

  std::map<std::pair<std::size_t, std::size_t>, std::size_t> unit_col;
  std::size_t cols = 7;
  std::vector<std::size_t> sector_col(S, 0);
  if (fe.country_sector) {
    std::set<std::pair<std::size_t, std::size_t>> units;
    for (const auto* r : used) units.emplace(r->country, r->sector);
    bool first = true;
    for (const auto& u : units) {
      if (first) {  // reference unit
        first = false;
        continue;
      }
      unit_col[u] = cols++;
      names.push_back(fmt::format("d_sc[{}/{}]", d.countries[u.first], d.sectors[u.second]));
    }
  } else if (fe.sector) {
    std::set<std::size_t> present;
    for (const auto* r : used) present.insert(r->sector);
    for (auto it = present.begin(); it != present.end(); ++it) {
      if (it == present.begin()) continue;  // reference sector
      sector_col[*it] = cols++;
      names.push_back(fmt::format("d_s[{}]", d.sectors[*it]));
    }
  }
  std::vector<std::size_t> trend_col(C, 0);
  double year_mean = 0.0;
  if (fe.country_trend) {
    for (const auto* r : used) year_mean += r->year;
    year_mean /= static_cast<double>(std::max<std::size_t>(n, 1));
    std::set<std::size_t> present;
    for (const auto* r : used) present.insert(r->country);
    for (const auto c : present) {
      trend_col[c] = cols++;
      names.push_back(fmt::format("d_ct[{}]", d.countries[c]));
    }
  }

  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols));
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const auto& r = *used[k];
    const auto row = static_cast<Eigen::Index>(k);
    double x[6];
    fill_regressors(r, x);
    for (int j = 0; j < 6; ++j) X(row, j) = x[j];
    X(row, 6) = 1.0;
    if (fe.country_sector) {
      const auto it = unit_col.find({r.country, r.sector});
      if (it != unit_col.end()) X(row, static_cast<Eigen::Index>(it->second)) = 1.0;
    } else if (fe.sector && sector_col[r.sector] > 0) {
      X(row, static_cast<Eigen::Index>(sector_col[r.sector])) = 1.0;
    }
    if (fe.country_trend) X(row, static_cast<Eigen::Index>(trend_col[r.country])) = r.year - year_mean;
    y[row] = r.growth;
  }
  auto out = ols(X, y, names, 6, 0, true);
  out.fe = fe;
  return out;
}

RegressionResult fit_within(const Design& d) {
  const auto used = estimation_rows(d);
  const auto n = used.size();
  std::map<std::pair<std::size_t, std::size_t>, std::pair<std::array<double, 7>, std::size_t>> sums;
  for (const auto* rp : used) {
    const auto& r = *rp;
    auto& [acc, count] = sums[{r.country, r.sector}];
    double x[6];
    fill_regressors(r, x);
    for (int j = 0; j < 6; ++j) acc[j] += x[j];
    acc[6] += r.growth;
    ++count;
  }
  Eigen::MatrixXd X(static_cast<Eigen::Index>(n), 6);
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const auto& r = *used[k];
    const auto& [acc, count] = sums.at({r.country, r.sector});
    const double m = static_cast<double>(count);
    double x[6];
    fill_regressors(r, x);
    const auto row = static_cast<Eigen::Index>(k);
    for (int j = 0; j < 6; ++j) X(row, j) = x[j] - acc[j] / m;
    y[row] = r.growth - acc[6] / m;
  }
  // One mean per unit is absorbed by the demeaning.
  auto out = ols(X, y, kRegressors, 6, sums.size(), false);
  out.fe = FixedEffects{false, true, false};
  // Report the same adjusted R^2 as the dummy-variable form: TSS about the grand mean.
  double ybar = 0.0;
  for (const auto* r : used) ybar += r->growth;
  ybar /= static_cast<double>(n);
  double tss = 0.0;
  for (const auto* r : used) tss += (r->growth - ybar) * (r->growth - ybar);
  const double df = static_cast<double>(n) - 6.0 - static_cast<double>(sums.size());
  out.r2_adj = tss > 0.0 ? 1.0 - (out.rss / df) / (tss / static_cast<double>(n - 1)) : 1.0;
  return out;
}

Ar1Result fit_ar1(const PanelDataset& panel, const std::vector<std::string>& sectors) {
  panel.check();
  const auto ix = index_panel(panel);
  const std::set<std::string> keep(sectors.begin(), sectors.end());
  std::vector<std::pair<double, double>> pairs;  // (lag, current)
  for (const auto& [unit, years] : ix.units) {
    if (!keep.empty() && !keep.count(ix.sectors[unit.second])) continue;
    if (years.size() < 3)
      throw StructuralError(fmt::format("R&D series of {}/{} has fewer than three periods",
                                        ix.countries[unit.first], ix.sectors[unit.second]));
    for (const auto& [y, o] : years) {
      const auto prev = years.find(y - 1);
      if (prev != years.end()) pairs.emplace_back(prev->second->rd, o->rd);
    }
  }
  if (pairs.size() < 3) throw StructuralError("too few lagged R&D observations");

  const auto n = static_cast<Eigen::Index>(pairs.size());
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    X(k, 0) = pairs[static_cast<std::size_t>(k)].first;
    X(k, 1) = 1.0;
    y[k] = pairs[static_cast<std::size_t>(k)].second;
  }
  Ar1Result out;
  out.observations = pairs.size();
  const Eigen::VectorXd lag = X.col(0);
  const double spread = (lag.array() - lag.mean()).square().sum();
  const double level = std::max(lag.squaredNorm(), 1e-300);
  if (spread <= 1e-12 * level) {
    // No variation in the lag: a and c are not separately identified.
    out.near_collinear = true;
    out.process = {0.0, y.mean()};
    out.se_a = out.se_c = std::numeric_limits<double>::quiet_NaN();
    out.long_run = y.mean();
    out.r2_adj = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const auto r = ols(X, y, {"a", "c"}, 2, 0, true);
  out.process = {r.coef[0], r.coef[1]};
  out.se_a = r.se[0];
  out.se_c = r.se[1];
  out.r2_adj = r.r2_adj;
  out.long_run = std::abs(out.process.a) < 1.0 ? long_run_rd(out.process)
                                               : std::numeric_limits<double>::quiet_NaN();
  return out;
}

std::map<SectorGroup, Ar1Result> fit_ar1_by_group(const PanelDataset& panel,
                                                  const std::map<std::string, SectorGroup>& groups) {
  std::map<SectorGroup, std::vector<std::string>> members;
  std::set<std::string> seen;
  for (const auto& o : panel.observations) {
    if (!seen.insert(o.sector).second) continue;
    const auto it = groups.find(o.sector);
    if (it == groups.end()) throw LookupError(fmt::format("sector '{}' has no group", o.sector));
    members[it->second].push_back(o.sector);
  }
  std::map<SectorGroup, Ar1Result> out;
  for (const auto& [g, secs] : members) out[g] = fit_ar1(panel, secs);
  return out;
}

SyntheticPanel make_panel(const PanelSpec& spec) {
  if (spec.countries < 2 || spec.sectors < 1 || spec.years < 3)
    throw StructuralError("synthetic panel needs two countries, one sector and three years");
  static const std::vector<std::string> codes = {"C26", "D35", "H49", "M72", "C19",
                                                 "A01", "C10-C12", "K64", "C24", "G46"};
  ToyRng rng(spec.seed);
  const auto defaults = GrowthParams::defaults();
  const auto& nace = default_nace_groups();
  const auto& k = spec.truth;

  SyntheticPanel out;
  std::vector<std::string> sectors, countries;
  for (std::size_t s = 0; s < spec.sectors; ++s) {
    sectors.push_back(s < codes.size() ? codes[s] : fmt::format("X{:02}", s + 1));
    const auto it = nace.find(sectors.back());
    const auto g = it != nace.end() ? it->second : SectorGroup::OtherServices;
    out.groups[sectors.back()] = g;
    out.rd_truth[g] = defaults.rd_process(g);
  }
  for (std::size_t c = 0; c < spec.countries; ++c) countries.push_back(fmt::format("C{:02}", c + 1));

  const auto C = spec.countries, S = spec.sectors, T = spec.years;
  std::vector<double> h(C);
  for (auto& x : h) x = rng.uniform(0.1, 0.4);
  std::vector<double> ln_a(C * S), rd(C * S), effect(C * S);
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t s = 0; s < S; ++s) {
      const auto& proc = out.rd_truth[out.groups[sectors[s]]];
      ln_a[c * S + s] = -rng.uniform(0.0, 0.6);
      rd[c * S + s] = rng.uniform(0.0, 2.0 * long_run_rd(proc));
      effect[c * S + s] = spec.effect_scale * rng.normal();
    }

  auto record = [&](int year) {
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t s = 0; s < S; ++s)
        out.panel.observations.push_back(
            {countries[c], sectors[s], year, std::exp(ln_a[c * S + s]), h[c], rd[c * S + s]});
  };
  for (std::size_t s = 0; s < S; ++s) ln_a[s] = 1.0;  // frontier economy
  record(spec.first_year);

  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      const double front = ln_a[s];
      const double x = spec.frontier_growth + spec.frontier_noise * rng.normal();
      ln_a[s] = front + x;
      for (std::size_t c = 1; c < C; ++c) {
        const double gap = ln_a[c * S + s] - front;
        ln_a[c * S + s] += tfp_growth(gap, x, h[c], rd[c * S + s], k) + effect[c * S + s] +
                           spec.noise * rng.normal();
      }
    }
    for (std::size_t c = 0; c < C; ++c) {
      h[c] = std::clamp(h[c] + 0.01 * rng.normal(), 0.0, 1.0);
      for (std::size_t s = 0; s < S; ++s) {
        const auto& proc = out.rd_truth[out.groups[sectors[s]]];
        rd[c * S + s] = std::max(0.0, rd_step(rd[c * S + s], proc) + spec.rd_noise * rng.normal());
      }
    }
    record(spec.first_year + static_cast<int>(t));
  }
  return out;
}

void write_growth_table(const std::filesystem::path& path,
                        const std::vector<std::pair<std::string, RegressionResult>>& fits) {
  std::vector<std::string> header{"term"};
  for (const auto& [name, _] : fits) header.push_back(name);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t j = 0; j < kRegressors.size(); ++j) {
    std::vector<std::string> est{kRegressors[j]}, se{kRegressors[j] + "_se"};
    for (const auto& [_, f] : fits) {
      est.push_back(format_number(f.coef[j]));
      se.push_back(format_number(f.se[j]));
    }
    rows.push_back(std::move(est));
    rows.push_back(std::move(se));
  }
  std::vector<std::string> obs{"observations"}, r2{"adjusted_r2"}, fe{"fixed_effects"};
  for (const auto& [_, f] : fits) {
    obs.push_back(std::to_string(f.observations));
    r2.push_back(format_number(f.r2_adj));
    std::vector<std::string> parts;
    if (f.fe.country_sector) parts.push_back("d_sc");
    else if (f.fe.sector) parts.push_back("d_s");
    if (f.fe.country_trend) parts.push_back("d_ct");
    fe.push_back(parts.empty() ? "none" : fmt::format("{}", fmt::join(parts, "+")));
  }
  rows.push_back(std::move(obs));
  rows.push_back(std::move(r2));
  rows.push_back(std::move(fe));
  write_csv(path, header, rows);
}

void write_rd_table(const std::filesystem::path& path,
                    const std::vector<std::pair<std::string, Ar1Result>>& fits) {
  std::vector<std::string> header{"term"};
  for (const auto& [name, _] : fits) header.push_back(name);
  std::vector<std::vector<std::string>> rows(7);
  rows[0] = {"a"};
  rows[1] = {"a_se"};
  rows[2] = {"c"};
  rows[3] = {"c_se"};
  rows[4] = {"long_run"};
  rows[5] = {"observations"};
  rows[6] = {"adjusted_r2"};
  for (const auto& [_, f] : fits) {
    rows[0].push_back(format_number(f.process.a));
    rows[1].push_back(format_number(f.se_a));
    rows[2].push_back(format_number(f.process.c));
    rows[3].push_back(format_number(f.se_c));
    rows[4].push_back(format_number(f.long_run));
    rows[5].push_back(std::to_string(f.observations));
    rows[6].push_back(format_number(f.r2_adj));
  }
  write_csv(path, header, rows);
}

}  // namespace sgem
