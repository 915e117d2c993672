#include "sgem/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <limits>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "sgem/dynamics.hpp"
#include "sgem/error.hpp"
#include "sgem/io.hpp"
#include "sgem/kernels.hpp"
#include "sgem/toy.hpp"

namespace sgem {

namespace fs = std::filesystem;

std::string_view to_string(SpendingCategory c) {
  switch (c) {
    case SpendingCategory::Business: return "Business";
    case SpendingCategory::Education: return "Education";
    case SpendingCategory::Other: return "Other";
    case SpendingCategory::Research: return "Research";
  }
  return "?";
}

SpendingCategory parse_spending_category(std::string_view name) {
  for (auto c : {SpendingCategory::Business, SpendingCategory::Education, SpendingCategory::Other,
                 SpendingCategory::Research})
    if (to_string(c) == name) return c;
  throw StructuralError(fmt::format(
      "unknown spending category '{}' (expected Business, Education, Other or Research)", name));
}

void ExpenditureTable::check() const {
  for (const auto& r : records)
    if (!(r.amount >= 0.0) || !std::isfinite(r.amount))
      throw StructuralError(fmt::format("expenditure {}/{}/{}/{}: amount must be nonnegative",
                                        r.region, r.kic, to_string(r.category), r.year));
  for (const auto& [year, a] : assumptions) {
    if (a.year != year) throw StructuralError(fmt::format("assumption keyed {} has year {}", year, a.year));
    for (double v : {a.cofunding_rate, a.kic_share, a.direct_share, a.admin_share})
      if (!(v >= 0.0 && v <= 1.0))
        throw StructuralError(fmt::format("assumptions {}: rates and shares must lie in [0,1]", year));
  }
}

std::map<SpendingCategory, double> ExpenditureTable::category_totals() const {
  std::map<SpendingCategory, double> out;
  for (const auto& r : records) out[r.category] += r.amount;
  return out;
}

ExpenditureTable read_expenditure(const fs::path& expenditure, const fs::path& assumptions) {
  ExpenditureTable t;
  const auto e = read_csv(expenditure);
  const auto cr = e.column("region"), ck = e.column("kic"), cc = e.column("category"),
             cy = e.column("year"), ca = e.column("amount");
  for (std::size_t k = 0; k < e.rows.size(); ++k)
    t.records.push_back({e.text(k, cr), e.text(k, ck), parse_spending_category(e.text(k, cc)),
                         static_cast<int>(e.number(k, cy)), e.number(k, ca)});

  const auto a = read_csv(assumptions);
  const auto ay = a.column("year"), af = a.column("cofunding_rate"), ak = a.column("kic_share"),
             ad = a.column("direct_share"), am = a.column("admin_share");
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    BudgetAssumption b{static_cast<int>(a.number(k, ay)), a.number(k, af), a.number(k, ak),
                       a.number(k, ad), a.number(k, am)};
    if (!t.assumptions.emplace(b.year, b).second)
      throw StructuralError(fmt::format("{}: year {} listed twice", assumptions.string(), b.year));
  }
  t.check();
  return t;
}

void write_expenditure(const fs::path& expenditure, const fs::path& assumptions,
                       const ExpenditureTable& t) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : t.records)
    rows.push_back({r.region, r.kic, std::string(to_string(r.category)), std::to_string(r.year),
                    format_number(r.amount)});
  write_csv(expenditure, {"region", "kic", "category", "year", "amount"}, rows);
  rows.clear();
  for (const auto& [y, a] : t.assumptions)
    rows.push_back({std::to_string(y), format_number(a.cofunding_rate), format_number(a.kic_share),
                    format_number(a.direct_share), format_number(a.admin_share)});
  write_csv(assumptions, {"year", "cofunding_rate", "kic_share", "direct_share", "admin_share"}, rows);
}

Scenario load_scenario(const fs::path& manifest) {
  const auto j = read_json(manifest);
  const auto dir = manifest.parent_path();
  Scenario s;
  try {
    s.table = read_expenditure(dir / j.value("expenditure", "expenditure.csv"),
                               dir / j.value("assumptions", "assumptions.csv"));
    auto& m = s.map;
    m.currency_scale = j.value("currency_scale", 1.0);
    if (j.contains("h_cost_per_point")) m.h_cost_per_point = j.at("h_cost_per_point").get<double>();
    if (j.contains("rd_groups")) {
      m.rd_groups.clear();
      for (const auto& g : j.at("rd_groups")) m.rd_groups.push_back(parse_sector_group(g.get<std::string>()));
    }
    if (j.contains("rd_weights"))
      m.rd_weights = j.at("rd_weights").get<std::map<std::string, std::map<std::string, double>>>();
    if (j.contains("pattern_year")) m.pattern_year = j.at("pattern_year").get<int>();
    m.total_budget = j.value("total_budget", 0.0);
    m.financing_regions = j.value("financing_regions", std::vector<std::string>{});
    m.aggregate_regions = j.value("aggregate_regions", std::vector<std::string>{});
  } catch (const Json::exception& e) {
    throw StructuralError(fmt::format("{}: {}", manifest.string(), e.what()));
  }
  if (!(s.map.currency_scale > 0.0))
    throw StructuralError(fmt::format("{}: currency_scale must be positive", manifest.string()));
  return s;
}

fs::path save_scenario(const fs::path& dir, const Scenario& s) {
  fs::create_directories(dir);
  write_expenditure(dir / "expenditure.csv", dir / "assumptions.csv", s.table);
  Json j;
  j["expenditure"] = "expenditure.csv";
  j["assumptions"] = "assumptions.csv";
  const auto& m = s.map;
  j["currency_scale"] = m.currency_scale;
  if (m.h_cost_per_point) j["h_cost_per_point"] = *m.h_cost_per_point;
  j["rd_groups"] = Json::array();
  for (auto g : m.rd_groups) j["rd_groups"].push_back(std::string(to_string(g)));
  if (!m.rd_weights.empty()) j["rd_weights"] = m.rd_weights;
  if (m.pattern_year) {
    j["pattern_year"] = *m.pattern_year;
    j["total_budget"] = m.total_budget;
  }
  if (!m.financing_regions.empty()) j["financing_regions"] = m.financing_regions;
  if (!m.aggregate_regions.empty()) j["aggregate_regions"] = m.aggregate_regions;
  const auto path = dir / "scenario.json";
  write_json(path, j);
  return path;
}

bool ShockSeries::zero() const {
  auto all_zero = [](const auto& v) { return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }); };
  for (const auto& [_, y] : years)
    if (!all_zero(y.rd.data()) || !all_zero(y.h) || !all_zero(y.demand) || !all_zero(y.levy))
      return false;
  return true;
}

std::vector<bool> ShockSeries::tfp_supported(std::size_t regions) const {
  std::vector<bool> out(regions, false);
  for (const auto& [_, y] : years)
    for (std::size_t r = 0; r < regions; ++r) {
      if (r < y.h.size() && y.h[r] != 0.0) out[r] = true;
      if (r < y.rd.rows())
        for (std::size_t i = 0; i < y.rd.cols(); ++i)
          if (y.rd(r, i) != 0.0) out[r] = true;
    }
  return out;
}

namespace {

// Spending slots per (year, region).
enum Slot { kBusiness, kEducation, kOther, kResearch, kDirectRd, kDirectH, kAdmin, kSlots };
using Buckets = std::map<int, std::vector<std::array<double, kSlots>>>;

const char* slot_name(int s) {
  static const char* names[] = {"Business", "Education", "Other", "Research", "direct", "direct", "admin"};
  return names[s];
}

std::vector<bool> region_mask(const std::vector<std::string>& names, const Dimensions& dims) {
  std::vector<bool> m(dims.n_regions(), names.empty());
  for (const auto& n : names) m[dims.region_index(n)] = true;
  return m;
}

Array2 rd_weights(const ShockMap& map, const BenchmarkDataset& data) {
  const auto& dims = data.dims;
  const auto R = dims.n_regions(), N = dims.n_sectors();
  Array2 w(R, N);
  for (std::size_t r = 0; r < R; ++r) {
    const auto over = map.rd_weights.find(dims.regions()[r]);
    if (over != map.rd_weights.end()) {
      double sum = 0.0;
      for (const auto& [sector, v] : over->second) {
        const auto i = dims.find_sector(sector);
        if (!i) throw StructuralError(fmt::format("rd_weights {}: unknown sector '{}'", over->first, sector));
        if (!(v >= 0.0)) throw StructuralError(fmt::format("rd_weights {}/{}: negative weight", over->first, sector));
        w(r, *i) = v;
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-9)
        throw StructuralError(fmt::format("rd_weights {}: weights sum to {}, not 1", over->first, sum));
      continue;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      if (std::find(map.rd_groups.begin(), map.rd_groups.end(), dims.group_of(i)) != map.rd_groups.end())
        sum += w(r, i) = benchmark_value_added(data, r, i);
    if (sum <= 0.0)  // no research-intensive sector: spread over the whole economy
      for (std::size_t i = 0; i < N; ++i) sum += w(r, i) = benchmark_value_added(data, r, i);
    for (std::size_t i = 0; i < N; ++i) w(r, i) = sum > 0.0 ? w(r, i) / sum : 0.0;
  }
  return w;
}

Buckets fill_buckets(const ExpenditureTable& table, const ShockMap& map, const Dimensions& dims) {
  const auto R = dims.n_regions();
  Buckets b;
  auto at = [&](int year, const std::string& region) -> std::array<double, kSlots>& {
    auto& v = b[year];
    if (v.empty()) v.assign(R, std::array<double, kSlots>{});
    return v[dims.region_index(region)];
  };

  if (!map.pattern_year) {
    for (const auto& rec : table.records) at(rec.year, rec.region)[static_cast<int>(rec.category)] += rec.amount;
    return b;
  }

  // The pattern year fixes where and on what the programme spends; the yearly
  // budget shares fix how much.
  std::vector<std::array<double, 4>> pattern(R, std::array<double, 4>{});
  double total = 0.0;
  for (const auto& rec : table.records)
    if (rec.year == *map.pattern_year) {
      pattern[dims.region_index(rec.region)][static_cast<int>(rec.category)] += rec.amount;
      total += rec.amount;
    }
  if (total <= 0.0) return b;
  double knowledge = 0.0;
  for (const auto& p : pattern) knowledge += p[kBusiness] + p[kResearch] + p[kEducation];

  for (const auto& [year, a] : table.assumptions) {
    const double kic = map.total_budget * a.kic_share;
    const double direct = map.total_budget * a.direct_share;
    const double admin = map.total_budget * a.admin_share;
    for (std::size_t r = 0; r < R; ++r) {
      const auto& p = pattern[r];
      auto& slot = at(year, dims.regions()[r]);
      for (int c = 0; c < 4; ++c) slot[c] += kic * p[c] / total;
      if (knowledge > 0.0) {
        slot[kDirectRd] += direct * (p[kBusiness] + p[kResearch]) / knowledge;
        slot[kDirectH] += direct * p[kEducation] / knowledge;
      }
      slot[kAdmin] += admin * (p[0] + p[1] + p[2] + p[3]) / total;
    }
  }
  return b;
}

}  // namespace

ShockSeries build_shocks(const ExpenditureTable& table, const ShockMap& map,
                         const BenchmarkDataset& data, const ParameterSet& params,
                         std::vector<ShockAuditRow>* audit) {
  table.check();
  const auto& dims = data.dims;
  const auto R = dims.n_regions(), N = dims.n_sectors();

  std::set<std::string> unmatched;
  for (const auto& rec : table.records)
    if (!dims.find_region(rec.region)) unmatched.insert(rec.region);
  for (const auto* list : {&map.financing_regions, &map.aggregate_regions})
    for (const auto& n : *list)
      if (!dims.find_region(n)) unmatched.insert(n);
  for (const auto& [n, _] : map.rd_weights)
    if (!dims.find_region(n)) unmatched.insert(n);
  if (!unmatched.empty())
    throw StructuralError(fmt::format("scenario regions absent from the model: {}", fmt::join(unmatched, ", ")));
  if (map.pattern_year && !(map.total_budget >= 0.0))
    throw StructuralError("scenario total_budget must be nonnegative");

  const auto weights = rd_weights(map, data);
  const auto financing = region_mask(map.financing_regions, dims);
  std::vector<double> va_total(R, 0.0), wage_bill(R, 0.0), gdp(R, 0.0);
  double gdp_financing = 0.0;
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t e = 0; e < dims.n_skills(); ++e) wage_bill[r] += data.wages(r, i, e);
    gdp[r] = benchmark_gdp(data, r);
    if (financing[r]) gdp_financing += gdp[r];
  }

  ShockSeries out;
  for (const auto& [year, regions] : fill_buckets(table, map, dims)) {
    const auto a = table.assumptions.find(year);
    if (a == table.assumptions.end())
      throw StructuralError(fmt::format("scenario: no budget assumptions for year {}", year));
    const double lever = 1.0 + a->second.cofunding_rate;
    YearShocks ys{Array2(R, N), std::vector<double>(R, 0.0), std::vector<double>(R, 0.0),
                  std::vector<double>(R, 0.0), std::vector<double>(R, 0.0)};
    const int elapsed = year - dims.first_year();

    for (std::size_t r = 0; r < R; ++r) {
      const auto& s = regions[r];
      const auto& region = dims.regions()[r];
      const double scale = std::pow(1.0 + params.dynamics.growth_rate[r], std::max(elapsed, 0));
      for (double v : s) ys.expenditure[r] += v;

      const double rd_spend = (s[kBusiness] + s[kResearch] + s[kDirectRd]) * lever * map.currency_scale;
      const double h_spend = (s[kEducation] + s[kDirectH]) * lever * map.currency_scale;
      ys.demand[r] = (s[kOther] + s[kAdmin]) * map.currency_scale;

      if (rd_spend > 0.0)
        for (std::size_t i = 0; i < N; ++i) {
          if (weights(r, i) == 0.0) continue;
          const double va = benchmark_value_added(data, r, i) * scale;
          if (!(va > 0.0))
            throw StructuralError(fmt::format("scenario: R&D spending in {}/{} without value added",
                                              region, dims.sectors()[i]));
          ys.rd(r, i) = rd_spend * weights(r, i) / va;
        }
      if (h_spend > 0.0) {
        if (!map.h_cost_per_point)
          throw StructuralError("scenario: Education spending needs h_cost_per_point");
        if (!(wage_bill[r] > 0.0))
          throw StructuralError(fmt::format("scenario: Education spending in {} without a wage bill", region));
        ys.h[r] = 0.01 * h_spend / (wage_bill[r] * scale) / *map.h_cost_per_point;
      }

      if (audit) {
        for (int k = 0; k < kSlots; ++k) {
          if (s[k] == 0.0) continue;
          const bool demand = k == kOther || k == kAdmin;
          const bool rd = k == kBusiness || k == kResearch || k == kDirectRd;
          const double gross = demand ? s[k] : s[k] * lever;
          if (rd) {
            for (std::size_t i = 0; i < N; ++i)
              if (weights(r, i) != 0.0)
                audit->push_back({year, region, slot_name(k), s[k] * weights(r, i), gross * weights(r, i),
                                  "rd", dims.sectors()[i], ys.rd(r, i)});
          } else {
            audit->push_back({year, region, slot_name(k), s[k], gross, demand ? "demand" : "h", "",
                              demand ? ys.demand[r] : ys.h[r]});
          }
        }
      }
    }

    double purchases = 0.0;
    for (double d : ys.demand) purchases += d;
    if (purchases > 0.0) {
      if (!(gdp_financing > 0.0)) throw StructuralError("scenario: financing regions have no GDP");
      for (std::size_t r = 0; r < R; ++r)
        if (financing[r]) {
          ys.levy[r] = purchases * gdp[r] / gdp_financing;
          if (audit) audit->push_back({year, dims.regions()[r], "levy", 0.0, 0.0, "levy", "", ys.levy[r]});
        }
    }
    out.years.emplace(year, std::move(ys));
  }
  return out;
}

void write_shock_audit(const fs::path& path, const std::vector<ShockAuditRow>& rows) {
  std::vector<std::vector<std::string>> out;
  out.reserve(rows.size());
  for (const auto& r : rows)
    out.push_back({std::to_string(r.year), r.region, r.source, format_number(r.amount),
                   format_number(r.gross), r.target, r.sector, format_number(r.shock)});
  write_csv(path, {"year", "region", "source", "amount", "gross", "target", "sector", "shock"}, out);
}

ChannelSet parse_channels(std::string_view text) {
  ChannelSet c;
  while (!text.empty()) {
    const auto comma = text.find(',');
    auto item = text.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item == "tfp") c.tfp = true;
    else if (item == "demand") c.demand = true;
    else if (!item.empty())
      throw StructuralError(fmt::format("unknown channel '{}' (expected tfp or demand)", item));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return c;
}

namespace {

StatePath run_path(const SimulationModel& m, const ShockSeries* shocks, int horizon, ChannelSet ch) {
  const auto& dims = m.params.dims;
  if (horizon < 0) throw StructuralError("horizon must be nonnegative");
  const int first = m.start.year;
  const int last = first + horizon;
  if (last > dims.last_year())
    throw StructuralError(fmt::format("horizon ends in {}, after the model's last year {}", last, dims.last_year()));
  if (shocks)
    for (const auto& [y, _] : shocks->years)
      if (y < first || y > last)
        throw StructuralError(fmt::format("shock year {} outside the simulated years {}-{}", y, first, last));

  const auto R = dims.n_regions();
  StatePath path;
  path.states.reserve(static_cast<std::size_t>(horizon) + 1);
  path.reports.reserve(static_cast<std::size_t>(horizon) + 1);
  EconomyState s = m.start;
  for (int t = 0; t <= horizon; ++t) {
    const YearShocks* ys = nullptr;
    if (shocks) {
      const auto it = shocks->years.find(s.year);
      if (it != shocks->years.end()) ys = &it->second;
    }
    if (ch.demand && ys) {
      s.demand_shock = ys->demand;
      s.levy = ys->levy;
    } else {
      s.demand_shock.assign(R, 0.0);
      s.levy.assign(R, 0.0);
    }
    SolveResult res;
    try {
      res = solve_period(s, m.params, m.closure, m.solver);
    } catch (const SolveFailure& e) {
      throw SolveFailure(fmt::format("year {}: {}", s.year, e.what()), e.best(), e.report());
    } catch (const NumericalError& e) {
      throw NumericalError(fmt::format("year {}: {}", s.year, e.what()));
    }
    if (ch.tfp && ys) res.state.rd_shock = ys->rd;
    path.states.push_back(res.state);
    path.reports.push_back(std::move(res.report));
    if (t == horizon) break;
    GrowthShocks g;
    if (ch.tfp && ys) g = {ys->rd, ys->h};
    s = step_period(path.states.back(), m.params, ch.tfp && ys ? &g : nullptr);
  }
  return path;
}

}  // namespace

StatePath run_baseline(const SimulationModel& m, int horizon) { return run_path(m, nullptr, horizon, {}); }

StatePath run_counterfactual(const SimulationModel& m, const ShockSeries& shocks, int horizon,
                             ChannelSet channels) {
  return run_path(m, &shocks, horizon, channels);
}

ScenarioRuns run_scenario(const SimulationModel& m, const ShockSeries& shocks, int horizon) {
  std::array<StatePath, 4> paths;
  std::array<std::exception_ptr, 4> errors;
  const ChannelSet channels[4] = {{}, {true, false}, {false, true}, {true, true}};
  const int threads = std::min(4, kernels::thread_count());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (int k = 0; k < 4; ++k) {
    try {
      paths[k] = k == 0 ? run_baseline(m, horizon) : run_counterfactual(m, shocks, horizon, channels[k]);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return {std::move(paths[0]), std::move(paths[1]), std::move(paths[2]), std::move(paths[3])};
}

EffectReport decompose_effects(const ScenarioRuns& runs, const ShockSeries& shocks,
                               const Dimensions& dims, const ShockMap& map) {
  const auto T = runs.baseline.states.size();
  for (const auto* p : {&runs.tfp, &runs.demand, &runs.full}) {
    if (p->states.size() != T)
      throw StructuralError(fmt::format("runs cover {} and {} years", T, p->states.size()));
    for (std::size_t t = 0; t < T; ++t)
      if (p->states[t].year != runs.baseline.states[t].year)
        throw StructuralError(fmt::format("runs disagree on year {}", runs.baseline.states[t].year));
  }
  const auto R = dims.n_regions();
  const double to_money = 1.0 / map.currency_scale;

  EffectReport rep;
  rep.supported = shocks.tfp_supported(R);
  rep.aggregate = region_mask(map.aggregate_regions, dims);
  rep.aggregate_total.region = "EU";
  for (std::size_t r = 0; r < R; ++r) {
    CumulativeEffect cum{dims.regions()[r]};
    for (std::size_t t = 0; t < T; ++t) {
      const auto& b = runs.baseline.states[t];
      EffectRow row;
      row.region = dims.regions()[r];
      row.year = b.year;
      const auto ys = shocks.years.find(b.year);
      if (ys != shocks.years.end()) row.expenditure = ys->second.expenditure[r];
      const double base = b.gdp_real[r];
      row.baseline_gdp = base * to_money;
      row.counterfactual_gdp = runs.full.states[t].gdp_real[r] * to_money;
      row.total = (runs.full.states[t].gdp_real[r] - base) * to_money;
      row.demand = (runs.demand.states[t].gdp_real[r] - base) * to_money;
      row.structural = (runs.tfp.states[t].gdp_real[r] - base) * to_money;
      row.direct = rep.supported[r] ? row.structural : 0.0;
      row.interaction = row.total - row.demand - row.structural;
      row.cost_share = b.gdp[r] > 0.0 ? runs.full.states[t].levy[r] / b.gdp[r] : 0.0;
      cum.expenditure += row.expenditure;
      cum.direct += row.direct;
      cum.total += row.total;
      cum.demand += row.demand;
      cum.structural += row.structural;
      cum.interaction += row.interaction;
      rep.rows.push_back(std::move(row));
    }
    if (rep.aggregate[r]) {
      auto& a = rep.aggregate_total;
      a.expenditure += cum.expenditure;
      a.direct += cum.direct;
      a.total += cum.total;
      a.demand += cum.demand;
      a.structural += cum.structural;
      a.interaction += cum.interaction;
    }
    rep.cumulative.push_back(std::move(cum));
  }
  const auto& a = rep.aggregate_total;
  rep.total_direct_ratio = a.direct != 0.0 ? a.total / a.direct : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

void write_effect_report(const fs::path& dir, const EffectReport& rep) {
  fs::create_directories(dir);
  auto pct = [](double effect, double base) { return base != 0.0 ? 100.0 * effect / base : 0.0; };

  std::vector<std::vector<std::string>> rows;
  for (const auto& r : rep.rows)
    rows.push_back({r.region, std::to_string(r.year), format_number(r.expenditure),
                    format_number(r.baseline_gdp), format_number(r.counterfactual_gdp),
                    format_number(r.direct), format_number(r.total), format_number(r.demand),
                    format_number(r.structural), format_number(r.interaction),
                    format_number(pct(r.direct, r.baseline_gdp)), format_number(pct(r.total, r.baseline_gdp)),
                    format_number(r.cost_share)});
  write_csv(dir / "effects.csv",
            {"region", "year", "expenditure", "baseline_gdp", "counterfactual_gdp", "direct", "total",
             "demand", "structural", "interaction", "direct_pct", "total_pct", "cost_share"},
            rows);

  rows.clear();
  auto table_row = [](const CumulativeEffect& c) {
    return std::vector<std::string>{c.region, format_number(c.expenditure), format_number(c.direct),
                                    format_number(c.total)};
  };
  for (const auto& c : rep.cumulative) rows.push_back(table_row(c));
  rows.push_back(table_row(rep.aggregate_total));
  write_csv(dir / "cumulative.csv", {"region", "expenditure", "direct_effect", "total_effect"}, rows);

  rows.clear();
  for (const auto& r : rep.rows) {
    const std::pair<const char*, double> series[] = {{"direct", r.direct}, {"total", r.total},
                                                     {"demand", r.demand}, {"structural", r.structural},
                                                     {"interaction", r.interaction}};
    for (const auto& [name, v] : series)
      rows.push_back({r.region, std::to_string(r.year), format_number(pct(v, r.baseline_gdp)), name});
  }
  write_csv(dir / "plot_data.csv", {"region", "year", "value", "channel"}, rows);

  auto cum_json = [](const CumulativeEffect& c) {
    return Json{{"expenditure", c.expenditure}, {"direct", c.direct},     {"total", c.total},
                {"demand", c.demand},           {"structural", c.structural}, {"interaction", c.interaction}};
  };
  Json j;
  j["regions"] = Json::object();
  for (std::size_t r = 0; r < rep.cumulative.size(); ++r) {
    auto v = cum_json(rep.cumulative[r]);
    v["supported"] = static_cast<bool>(rep.supported[r]);
    v["in_aggregate"] = static_cast<bool>(rep.aggregate[r]);
    j["regions"][rep.cumulative[r].region] = std::move(v);
  }
  j["aggregate"] = cum_json(rep.aggregate_total);
  if (std::isfinite(rep.total_direct_ratio)) j["aggregate"]["total_direct_ratio"] = rep.total_direct_ratio;
  else j["aggregate"]["total_direct_ratio"] = nullptr;
  write_json(dir / "region_values.json", j);
}

Scenario make_toy_scenario(const BenchmarkDataset& data, std::uint64_t seed) {
  // Co-funding rates and yearly budget shares of the 2021-2035 programme.
  static constexpr std::array<double, 15> cofunding = {0.0, 0.0, 0.0, 0.2, 0.2, 0.2, 0.3, 0.3,
                                                       0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  static constexpr std::array<double, 15> kic = {0.115, 0.1113, 0.1217, 0.1223, 0.1217,
                                                 0.1233, 0.1183, 0.1183, 0.1183, 0.1183,
                                                 0.1183, 0.1183, 0.1183, 0.1183, 0.118};
  static constexpr std::array<double, 15> admin = {0.002, 0.0023, 0.0027, 0.003, 0.0033,
                                                   0.0033, 0.0033, 0.0033, 0.0033, 0.0033,
                                                   0.0033, 0.0033, 0.0033, 0.0033, 0.0033};
  static constexpr std::array<double, 15> direct = {0.0067, 0.0133, 0.02, 0.0233, 0.0267,
                                                    0.0267, 0.03, 0.03, 0.03, 0.03,
                                                    0.03, 0.03, 0.03, 0.03, 0.03};
  const auto& dims = data.dims;
  ToyRng rng(seed);
  Scenario s;
  s.map.currency_scale = 1e-6;
  s.map.h_cost_per_point = 0.02;
  const int first = dims.first_year() + 1;
  for (std::size_t k = 0; k < cofunding.size(); ++k) {
    const int y = first + static_cast<int>(k);
    if (y > dims.last_year()) break;
    s.table.assumptions[y] = {y, cofunding[k], kic[k], direct[k], admin[k]};
  }
  static const char* kics[] = {"CLIMATE", "DIGITAL", "HEALTH"};
  for (std::size_t r = 1; r < dims.n_regions(); r += 2) {
    const double gdp = benchmark_gdp(data, r);
    const auto* label = kics[static_cast<std::size_t>(rng.uniform() * 3.0)];
    for (int year = first; year < first + 7 && year <= dims.last_year(); ++year)
      for (auto c : {SpendingCategory::Business, SpendingCategory::Education, SpendingCategory::Other,
                     SpendingCategory::Research}) {
        const double share = rng.uniform(0.0005, 0.002);
        s.table.records.push_back({dims.regions()[r], label, c, year, gdp * share / s.map.currency_scale});
      }
  }
  return s;
}

}  // namespace sgem
