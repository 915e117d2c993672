#include "sgem/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "sgem/error.hpp"

namespace fs = std::filesystem;

namespace sgem {

// ---------------------------------------------------------------------------
// CSV

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t k = 0; k < header.size(); ++k)
    if (header[k] == name) return k;
  throw StructuralError(fmt::format("{}: missing column '{}'", path.string(), name));
}

double CsvTable::number(std::size_t row, std::size_t col) const {
  return parse_number(rows[row][col],
                      fmt::format("{} line {} column '{}'", path.string(), row + 2, header[col]));
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char ch = line[k];
    if (quoted) {
      if (ch == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        cur += '"';
        ++k;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::string quote(const std::string& f) {
  if (f.find_first_of(",\"\n") == std::string::npos) return f;
  std::string out = "\"";
  for (char ch : f) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StructuralError(fmt::format("cannot open {}", path.string()));
  CsvTable t;
  t.path = path;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first) {
      if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      if (line.empty()) throw StructuralError(fmt::format("{}: missing header row", path.string()));
      t.header = split_line(line);
      first = false;
      continue;
    }
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (fields.size() != t.header.size())
      throw StructuralError(fmt::format("{} line {}: expected {} fields, found {}", path.string(),
                                        t.rows.size() + 2, t.header.size(), fields.size()));
    t.rows.push_back(std::move(fields));
  }
  if (first) throw StructuralError(fmt::format("{}: empty file", path.string()));
  return t;
}

double parse_number(std::string_view text, std::string_view where) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw StructuralError(fmt::format("{}: '{}' is not a number", where, text));
  return v;
}

std::string format_number(double v) { return fmt::format("{}", v); }

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StructuralError(fmt::format("cannot write {}", path.string()));
  auto put = [&](const std::vector<std::string>& r) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (k) out << ',';
      out << quote(r[k]);
    }
    out << '\n';
  };
  put(header);
  for (const auto& r : rows) put(r);
}

void write_json(const fs::path& path, const Json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StructuralError(fmt::format("cannot write {}", path.string()));
  out << j.dump(2) << '\n';
}

Json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StructuralError(fmt::format("cannot open {}", path.string()));
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw StructuralError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

// ---------------------------------------------------------------------------
// JSON conversions

namespace {

Json number_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double json_number(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    return parse_number(s, "json");
  }
  return j.get<double>();
}

Json numbers_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number_json(x));
  return a;
}

std::vector<double> json_numbers(const Json& j) {
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& x : j) v.push_back(json_number(x));
  return v;
}

}  // namespace

void to_json(Json& j, const Array2& a) {
  j = Json{{"rows", a.rows()}, {"cols", a.cols()}, {"data", numbers_json(a.data())}};
}

void from_json(const Json& j, Array2& a) {
  a = Array2(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  auto v = json_numbers(j.at("data"));
  if (v.size() != a.data().size()) throw StructuralError("json: table size mismatch");
  a.data() = std::move(v);
}

void to_json(Json& j, const Array3& a) {
  j = Json{{"dims", {a.dim0(), a.dim1(), a.dim2()}}, {"data", numbers_json(a.data())}};
}

void from_json(const Json& j, Array3& a) {
  const auto& d = j.at("dims");
  a = Array3(d.at(0).get<std::size_t>(), d.at(1).get<std::size_t>(), d.at(2).get<std::size_t>());
  auto v = json_numbers(j.at("data"));
  if (v.size() != a.data().size()) throw StructuralError("json: table size mismatch");
  a.data() = std::move(v);
}

void to_json(Json& j, const Dimensions& d) {
  Json groups = Json::object();
  for (const auto& [s, g] : d.sector_groups()) groups[s] = std::string(to_string(g));
  j = Json{{"regions", d.regions()},     {"sectors", d.sectors()},
           {"skills", d.skills()},       {"sector_groups", groups},
           {"first_year", d.first_year()}, {"last_year", d.last_year()}};
}

void from_json(const Json& j, Dimensions& d) {
  std::map<std::string, SectorGroup> groups;
  const auto sectors = j.at("sectors").get<std::vector<std::string>>();
  if (j.contains("sector_groups")) {
    for (const auto& [s, g] : j.at("sector_groups").items())
      groups[s] = parse_sector_group(g.get<std::string>());
  }
  for (const auto& s : sectors) {
    if (groups.count(s)) continue;
    const auto& nace = default_nace_groups();
    const auto it = nace.find(s);
    if (it == nace.end())
      throw LookupError(fmt::format("sector '{}' has no group and is not a known NACE code", s));
    groups[s] = it->second;
  }
  d = Dimensions(j.at("regions").get<std::vector<std::string>>(), sectors,
                 j.value("skills", std::vector<std::string>{"low", "medium", "high"}), groups,
                 j.at("first_year").get<int>(), j.at("last_year").get<int>());
}

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(DesignatedSectors, electricity, fuel, transport)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CesNest, sigma, theta, ref_price, ref_cost)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(NestedTechnology, top, kle, kl, energy, labour, materials,
                                   tfp_ref)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ArmingtonNest, top, origins, tradable)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TradeStructure, n_regions, n_sectors, sigma, sigma_lower,
                                   nests, margin, transport_sector)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(LesParams, mu, gamma)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(HouseholdRules, income_tax_rate, savings_rate)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RegionParams, household, government, household_rules,
                                   consumption_tax_rate, government_savings_share, transfers,
                                   foreign_transfers, government_budget, investment_shares,
                                   cpi_weights, government_shares, labour_supply,
                                   benchmark_savings, benchmark_gdp)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(GrowthCoefficients, b1, b2, b3, b4, b5, b6)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RnDProcess, a, c)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(NestElasticities, top, kle, kl, energy, labour)

NLOHMANN_JSON_SERIALIZE_ENUM(WkrForm, {{WkrForm::Product, "product"}, {WkrForm::Ratio, "ratio"}})
NLOHMANN_JSON_SERIALIZE_ENUM(AllocationScope, {{AllocationScope::Regional, "regional"},
                                               {AllocationScope::Pooled, "pooled"}})

// Non-inline definitions for the types declared in the header.
#define SGEM_JSON(Type, ...)                                                   \
  void to_json(Json& nlohmann_json_j, const Type& nlohmann_json_t) {           \
    NLOHMANN_JSON_EXPAND(NLOHMANN_JSON_PASTE(NLOHMANN_JSON_TO, __VA_ARGS__))   \
  }                                                                            \
  void from_json(const Json& nlohmann_json_j, Type& nlohmann_json_t) {         \
    NLOHMANN_JSON_EXPAND(NLOHMANN_JSON_PASTE(NLOHMANN_JSON_FROM, __VA_ARGS__)) \
  }

SGEM_JSON(BenchmarkDataset, dims, roles, output, energy_elec, energy_nelec, capital_rent,
          tax_production, household_consumption, government_consumption, investment_demand,
          tax_consumption, intermediate, wages, tax_income, household_wage_income,
          household_capital_income, household_transfers, household_savings, government_savings,
          foreign_transfers, trade, margin, capital_stock, tfp, rd_intensity, human_capital)

SGEM_JSON(DynamicsSettings, depreciation, growth_rate, adjustment_speed, wkr_form, scope)

SGEM_JSON(GrowthParams, enabled, pooled, pooled_rd, by_group, rd_by_group)

void to_json(Json& j, const ParameterSet& p) {
  j = Json{{"dims", p.dims},
           {"roles", p.roles},
           {"config_used", p.config_used},
           {"technology", p.technology},
           {"production_tax_rate", p.production_tax_rate},
           {"capital_per_stock", p.capital_per_stock},
           {"benchmark_output", p.benchmark_output},
           {"trade", p.trade},
           {"regions", p.regions},
           {"dynamics", p.dynamics},
           {"investment_attractor", p.investment_attractor},
           {"growth", p.growth},
           {"electricity", p.electricity},
           {"fuel", p.fuel},
           {"transport", p.transport}};
}

void from_json(const Json& j, ParameterSet& p) {
  j.at("dims").get_to(p.dims);
  j.at("roles").get_to(p.roles);
  j.at("config_used").get_to(p.config_used);
  j.at("technology").get_to(p.technology);
  j.at("production_tax_rate").get_to(p.production_tax_rate);
  j.at("capital_per_stock").get_to(p.capital_per_stock);
  j.at("benchmark_output").get_to(p.benchmark_output);
  j.at("trade").get_to(p.trade);
  j.at("regions").get_to(p.regions);
  j.at("dynamics").get_to(p.dynamics);
  j.at("investment_attractor").get_to(p.investment_attractor);
  j.at("growth").get_to(p.growth);
  j.at("electricity").get_to(p.electricity);
  j.at("fuel").get_to(p.fuel);
  j.at("transport").get_to(p.transport);
  p.check_invariants();
}

SGEM_JSON(EconomyState, year, capital, tfp, rd, rd_shock, human_capital, labour_supply,
          nominal_scale, foreign_scale, demand_shock, levy, pd, pa, pm, wage, rent, pi, numeraire,
          output, absorption, domestic, imports, flows, household, government, investment,
          sector_investment, household_income, income_tax, household_savings,
          consumption_budget, tax_revenue, government_savings, government_budget, savings, gdp,
          gdp_real)

#undef SGEM_JSON

void to_json(Json& j, const CalibrationConfig& c) {
  Json fr = Json::object();
  for (const auto& [k, v] : c.frisch_by_region) fr[k] = number_json(v);
  j = Json{{"nests", c.nests},
           {"armington", c.armington},
           {"nest_overrides", c.nest_overrides},
           {"armington_overrides", c.armington_overrides},
           {"frisch", number_json(c.frisch)},
           {"frisch_by_region", fr},
           {"income_elasticities", c.income_elasticities},
           {"government_frisch", number_json(c.government_frisch)},
           {"subsistence_cap", c.subsistence_cap}};
}

void from_json(const Json& j, CalibrationConfig& c) {
  c = CalibrationConfig{};
  if (j.contains("nests")) c.nests = j.at("nests").get<NestElasticities>();
  if (j.contains("armington")) c.armington = json_number(j.at("armington"));
  if (j.contains("nest_overrides"))
    for (const auto& [k, v] : j.at("nest_overrides").items()) {
      NestElasticities e = c.nests;
      for (const auto& [field, val] : v.items()) {
        const double x = json_number(val);
        if (field == "top") e.top = x;
        else if (field == "kle") e.kle = x;
        else if (field == "kl") e.kl = x;
        else if (field == "energy") e.energy = x;
        else if (field == "labour") e.labour = x;
        else throw StructuralError(fmt::format("calibration config: unknown nest '{}'", field));
      }
      c.nest_overrides[k] = e;
    }
  if (j.contains("armington_overrides"))
    for (const auto& [k, v] : j.at("armington_overrides").items())
      c.armington_overrides[k] = json_number(v);
  if (j.contains("frisch")) c.frisch = json_number(j.at("frisch"));
  if (j.contains("frisch_by_region"))
    for (const auto& [k, v] : j.at("frisch_by_region").items())
      c.frisch_by_region[k] = json_number(v);
  if (j.contains("income_elasticities"))
    for (const auto& [k, v] : j.at("income_elasticities").items())
      c.income_elasticities[k] = json_number(v);
  if (j.contains("government_frisch")) c.government_frisch = json_number(j.at("government_frisch"));
  if (j.contains("subsistence_cap")) c.subsistence_cap = json_number(j.at("subsistence_cap"));
}

CalibrationConfig load_calibration_config(const fs::path& path) {
  CalibrationConfig c;
  try {
    c = read_json(path).get<CalibrationConfig>();
  } catch (const Json::exception& e) {
    throw StructuralError(fmt::format("{}: {}", path.string(), e.what()));
  }
  c.check();
  return c;
}

ClosureSpec load_closure(const fs::path& path, const Dimensions& dims) {
  const Json j = read_json(path);
  ClosureSpec c;
  try {
    const auto num = j.value("numeraire", std::string("cpi"));
    if (num == "cpi") c.numeraire = NumeraireKind::RegionCpi;
    else if (num == "commodity") c.numeraire = NumeraireKind::CommodityPrice;
    else throw StructuralError(fmt::format("{}: numeraire must be 'cpi' or 'commodity'", path.string()));
    if (j.contains("numeraire_region"))
      c.numeraire_region = dims.region_index(j.at("numeraire_region").get<std::string>());
    if (j.contains("numeraire_sector"))
      c.numeraire_sector = dims.sector_index(j.at("numeraire_sector").get<std::string>());
    const auto gs = j.value("government_savings", std::string("exogenous"));
    if (gs == "exogenous") c.government_savings = GovSavingsMode::Exogenous;
    else if (gs == "endogenous") c.government_savings = GovSavingsMode::Endogenous;
    else throw StructuralError(fmt::format("{}: unknown government_savings '{}'", path.string(), gs));
    c.foreign_transfers_fixed = j.value("foreign_transfers_fixed", true);
    c.dropped.region = c.numeraire_region;
    if (j.contains("dropped")) {
      const auto& d = j.at("dropped");
      const auto kind = d.value("kind", std::string("savings_investment"));
      if (kind == "savings_investment") c.dropped.kind = DroppedCondition::Kind::SavingsInvestment;
      else if (kind == "goods") c.dropped.kind = DroppedCondition::Kind::Goods;
      else throw StructuralError(fmt::format("{}: unknown dropped kind '{}'", path.string(), kind));
      if (d.contains("region")) c.dropped.region = dims.region_index(d.at("region").get<std::string>());
      if (d.contains("sector")) c.dropped.sector = dims.sector_index(d.at("sector").get<std::string>());
    }
  } catch (const Json::exception& e) {
    throw StructuralError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return c;
}

SolverConfig load_solver_config(const fs::path& path) {
  const Json j = read_json(path);
  SolverConfig c;
  try {
    c.max_iterations = j.value("max_iterations", c.max_iterations);
    c.tolerance = j.value("tolerance", c.tolerance);
    c.damping = j.value("damping", c.damping);
    c.fd_step = j.value("fd_step", c.fd_step);
    c.shrink = j.value("shrink", c.shrink);
    c.price_floor = j.value("price_floor", c.price_floor);
    c.max_backtracks = j.value("max_backtracks", c.max_backtracks);
    c.parallel = j.value("parallel", c.parallel);
  } catch (const Json::exception& e) {
    throw StructuralError(fmt::format("{}: {}", path.string(), e.what()));
  }
  c.check();
  return c;
}

// ---------------------------------------------------------------------------
// Growth coefficient tables

GrowthParams read_growth_csv(const fs::path& coefficients, const fs::path& rd_process) {
  GrowthParams g = GrowthParams::defaults();
  const auto ct = read_csv(coefficients);
  const auto gc = ct.column("group");
  const std::size_t bc[6] = {ct.column("b1"), ct.column("b2"), ct.column("b3"),
                             ct.column("b4"), ct.column("b5"), ct.column("b6")};
  for (std::size_t r = 0; r < ct.rows.size(); ++r) {
    GrowthCoefficients k{ct.number(r, bc[0]), ct.number(r, bc[1]), ct.number(r, bc[2]),
                         ct.number(r, bc[3]), ct.number(r, bc[4]), ct.number(r, bc[5])};
    const auto& name = ct.text(r, gc);
    if (name == "Pooled") g.pooled = k;
    else g.by_group[static_cast<std::size_t>(parse_sector_group(name))] = k;
  }
  const auto rt = read_csv(rd_process);
  const auto rg = rt.column("group"), ra = rt.column("a"), rc = rt.column("c");
  for (std::size_t r = 0; r < rt.rows.size(); ++r) {
    RnDProcess p{rt.number(r, ra), rt.number(r, rc)};
    const auto& name = rt.text(r, rg);
    if (name == "Pooled") g.pooled_rd = p;
    else g.rd_by_group[static_cast<std::size_t>(parse_sector_group(name))] = p;
  }
  return g;
}

void write_growth_csv(const fs::path& coefficients, const fs::path& rd_process,
                      const GrowthParams& g) {
  std::vector<std::vector<std::string>> rows;
  auto add = [&](const std::string& name, const GrowthCoefficients& k) {
    std::vector<std::string> row{name};
    for (double b : k.as_array()) row.push_back(format_number(b));
    rows.push_back(std::move(row));
  };
  add("Pooled", g.pooled);
  for (auto grp : all_sector_groups()) add(std::string(to_string(grp)), g.coefficients(grp));
  write_csv(coefficients, {"group", "b1", "b2", "b3", "b4", "b5", "b6"}, rows);

  rows.clear();
  rows.push_back({"Pooled", format_number(g.pooled_rd.a), format_number(g.pooled_rd.c)});
  for (auto grp : all_sector_groups())
    rows.push_back({std::string(to_string(grp)), format_number(g.rd_process(grp).a),
                    format_number(g.rd_process(grp).c)});
  write_csv(rd_process, {"group", "a", "c"}, rows);
}

// ---------------------------------------------------------------------------
// Model manifest

namespace {

std::string sam_file(const std::string& pattern, const std::string& region) {
  const auto pos = pattern.find("{region}");
  if (pos == std::string::npos)
    throw StructuralError("manifest: the sam pattern must contain '{region}'");
  std::string out = pattern;
  out.replace(pos, 8, region);
  return out;
}

struct SamReader {
  BenchmarkDataset& d;
  std::size_t r;
  const std::string& file;

  std::optional<std::size_t> sector_of(const std::string& account, std::string_view prefix) const {
    if (account.rfind(prefix, 0) != 0) return std::nullopt;
    return d.dims.sector_index(std::string_view(account).substr(prefix.size()));
  }

  void add(const std::string& row, const std::string& col, double v, std::size_t line) {
    if (auto i = sector_of(col, "act:")) {
      if (auto j = sector_of(row, "com:")) return void(d.intermediate(r, *j, *i) += v);
      if (row == "energy_elec") return void(d.energy_elec(r, *i) += v);
      if (row == "energy_nelec") return void(d.energy_nelec(r, *i) += v);
      if (row == "capital") return void(d.capital_rent(r, *i) += v);
      if (row == "tax_production") return void(d.tax_production(r, *i) += v);
    }
    if (auto i = sector_of(row, "act:")) {
      if (auto j = sector_of(col, "com:"); j && *j == *i) return void(d.output(r, *i) += v);
    }
    if (auto j = sector_of(row, "com:")) {
      if (col == "households") return void(d.household_consumption(r, *j) += v);
      if (col == "government") return void(d.government_consumption(r, *j) += v);
      if (col == "investment") return void(d.investment_demand(r, *j) += v);
    }
    if (auto j = sector_of(col, "com:"); j && row == "tax_consumption")
      return void(d.tax_consumption(r, *j) += v);
    if (row == "households" && col == "labour") return void(d.household_wage_income[r] += v);
    if (row == "households" && col == "capital") return void(d.household_capital_income[r] += v);
    if (row == "households" && col == "government") return void(d.household_transfers[r] += v);
    if (row == "government" && col == "households") return void(d.tax_income[r] += v);
    if (row == "savings" && col == "households") return void(d.household_savings[r] += v);
    if (row == "savings" && col == "government") return void(d.government_savings[r] += v);
    if (row == "savings" && col == "rest_of_world") return void(d.foreign_transfers[r] += v);
    throw StructuralError(
        fmt::format("{} line {}: unknown account pair ({}, {})", file, line, row, col));
  }
};

}  // namespace

ModelInput load_model(const fs::path& manifest) {
  const Json j = read_json(manifest);
  const fs::path base = manifest.parent_path();
  ModelInput m;
  try {
    Dimensions dims = j.get<Dimensions>();
    DesignatedSectors roles = j.at("roles").get<DesignatedSectors>();
    m.data = BenchmarkDataset::zeros(dims, roles);
    auto& d = m.data;
    const auto& tables = j.at("tables");
    const auto table = [&](const char* key, const char* fallback) {
      return base / tables.value(key, std::string(fallback));
    };

    const auto pattern = tables.value("sam", std::string("sam_{region}.csv"));
    for (std::size_t r = 0; r < dims.n_regions(); ++r) {
      const auto path = base / sam_file(pattern, dims.regions()[r]);
      const auto t = read_csv(path);
      const auto cr = t.column("row"), cc = t.column("col"), cv = t.column("value");
      SamReader reader{d, r, path.string()};
      for (std::size_t k = 0; k < t.rows.size(); ++k)
        reader.add(t.text(k, cr), t.text(k, cc), t.number(k, cv), k + 2);
    }

    const auto ft = read_csv(table("factors", "factors.csv"));
    {
      const auto cr = ft.column("region"), cs = ft.column("sector"), ce = ft.column("skill"),
                 cv = ft.column("value");
      for (std::size_t k = 0; k < ft.rows.size(); ++k)
        d.wages(dims.region_index(ft.text(k, cr)), dims.sector_index(ft.text(k, cs)),
                dims.skill_index(ft.text(k, ce))) += ft.number(k, cv);
    }

    const auto tt = read_csv(table("trade", "trade.csv"));
    {
      const auto co = tt.column("origin"), cd = tt.column("destination"), cs = tt.column("sector"),
                 cv = tt.column("value"), cm = tt.column("margin_value");
      for (std::size_t k = 0; k < tt.rows.size(); ++k) {
        const auto o = dims.region_index(tt.text(k, co));
        const auto de = dims.region_index(tt.text(k, cd));
        const auto s = dims.sector_index(tt.text(k, cs));
        d.trade(o, de, s) += tt.number(k, cv);
        d.margin(o, de, s) += tt.number(k, cm);
      }
    }

    const auto st = read_csv(table("initial_stocks", "initial_stocks.csv"));
    {
      const auto cr = st.column("region"), cs = st.column("sector"), ck = st.column("K0"),
                 ca = st.column("A0"), cd = st.column("RD0");
      for (std::size_t k = 0; k < st.rows.size(); ++k) {
        const auto r = dims.region_index(st.text(k, cr));
        const auto s = dims.sector_index(st.text(k, cs));
        d.capital_stock(r, s) = st.number(k, ck);
        d.tfp(r, s) = st.number(k, ca);
        d.rd_intensity(r, s) = st.number(k, cd);
      }
    }

    const auto ht = read_csv(table("human_capital", "human_capital.csv"));
    {
      const auto cr = ht.column("region"), ch = ht.column("H0");
      for (std::size_t k = 0; k < ht.rows.size(); ++k)
        d.human_capital[dims.region_index(ht.text(k, cr))] = ht.number(k, ch);
    }

    const auto& dj = j.at("dynamics");
    auto& dyn = m.dynamics;
    dyn.depreciation.assign(dims.n_sectors(), 0.0);
    dyn.growth_rate.assign(dims.n_regions(), 0.0);
    for (const auto& [s, v] : dj.at("depreciation").items())
      dyn.depreciation[dims.sector_index(s)] = v.get<double>();
    if (dj.contains("growth_rate"))
      for (const auto& [r, v] : dj.at("growth_rate").items())
        dyn.growth_rate[dims.region_index(r)] = v.get<double>();
    dyn.adjustment_speed = dj.value("adjustment_speed", 0.0);
    dyn.wkr_form = dj.value("wkr_form", WkrForm::Product);
    dyn.scope = dj.value("allocation", AllocationScope::Regional);

    if (j.contains("growth")) {
      const auto& gj = j.at("growth");
      if (gj.contains("coefficients"))
        m.growth = read_growth_csv(base / gj.at("coefficients").get<std::string>(),
                                   base / gj.at("rd_process").get<std::string>());
      m.growth.enabled = gj.value("enabled", true);
    }
  } catch (const Json::exception& e) {
    throw StructuralError(fmt::format("{}: {}", manifest.string(), e.what()));
  }
  return m;
}

fs::path save_model(const fs::path& dir, const ModelInput& m) {
  fs::create_directories(dir);
  const auto& d = m.data;
  const auto& dims = d.dims;
  const auto R = dims.n_regions();
  const auto N = dims.n_sectors();
  const auto S = dims.n_skills();
  const auto& sec = dims.sectors();
  auto num = format_number;

  for (std::size_t r = 0; r < R; ++r) {
    std::vector<std::vector<std::string>> rows;
    auto put = [&](std::string row, std::string col, double v) {
      if (v != 0.0) rows.push_back({std::move(row), std::move(col), num(v)});
    };
    for (std::size_t i = 0; i < N; ++i) {
      const auto act = "act:" + sec[i];
      const auto com = "com:" + sec[i];
      put(act, com, d.output(r, i));
      for (std::size_t j = 0; j < N; ++j) put("com:" + sec[j], act, d.intermediate(r, j, i));
      put("energy_elec", act, d.energy_elec(r, i));
      put("energy_nelec", act, d.energy_nelec(r, i));
      put("capital", act, d.capital_rent(r, i));
      put("tax_production", act, d.tax_production(r, i));
      put(com, "households", d.household_consumption(r, i));
      put(com, "government", d.government_consumption(r, i));
      put(com, "investment", d.investment_demand(r, i));
      put("tax_consumption", com, d.tax_consumption(r, i));
    }
    put("households", "labour", d.household_wage_income[r]);
    put("households", "capital", d.household_capital_income[r]);
    put("households", "government", d.household_transfers[r]);
    put("government", "households", d.tax_income[r]);
    put("savings", "households", d.household_savings[r]);
    put("savings", "government", d.government_savings[r]);
    put("savings", "rest_of_world", d.foreign_transfers[r]);
    write_csv(dir / ("sam_" + dims.regions()[r] + ".csv"), {"row", "col", "value"}, rows);
  }

  std::vector<std::vector<std::string>> rows;
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t e = 0; e < S; ++e)
        if (d.wages(r, i, e) != 0.0)
          rows.push_back({dims.regions()[r], sec[i], dims.skills()[e], num(d.wages(r, i, e))});
  write_csv(dir / "factors.csv", {"region", "sector", "skill", "value"}, rows);

  rows.clear();
  for (std::size_t o = 0; o < R; ++o)
    for (std::size_t de = 0; de < R; ++de)
      for (std::size_t i = 0; i < N; ++i)
        if (d.trade(o, de, i) != 0.0 || d.margin(o, de, i) != 0.0)
          rows.push_back({dims.regions()[o], dims.regions()[de], sec[i], num(d.trade(o, de, i)),
                          num(d.margin(o, de, i))});
  write_csv(dir / "trade.csv", {"origin", "destination", "sector", "value", "margin_value"}, rows);

  rows.clear();
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t i = 0; i < N; ++i)
      rows.push_back({dims.regions()[r], sec[i], num(d.capital_stock(r, i)), num(d.tfp(r, i)),
                      num(d.rd_intensity(r, i))});
  write_csv(dir / "initial_stocks.csv", {"region", "sector", "K0", "A0", "RD0"}, rows);

  rows.clear();
  for (std::size_t r = 0; r < R; ++r) rows.push_back({dims.regions()[r], num(d.human_capital[r])});
  write_csv(dir / "human_capital.csv", {"region", "H0"}, rows);

  write_growth_csv(dir / "growth_coefficients.csv", dir / "rd_process.csv", m.growth);

  Json j = dims;
  j["roles"] = d.roles;
  j["tables"] = Json{{"sam", "sam_{region}.csv"},
                     {"factors", "factors.csv"},
                     {"trade", "trade.csv"},
                     {"initial_stocks", "initial_stocks.csv"},
                     {"human_capital", "human_capital.csv"}};
  Json dep = Json::object(), gr = Json::object();
  for (std::size_t i = 0; i < N; ++i) dep[sec[i]] = m.dynamics.depreciation[i];
  for (std::size_t r = 0; r < R; ++r) gr[dims.regions()[r]] = m.dynamics.growth_rate[r];
  j["dynamics"] = Json{{"depreciation", dep},
                       {"growth_rate", gr},
                       {"adjustment_speed", m.dynamics.adjustment_speed},
                       {"wkr_form", m.dynamics.wkr_form},
                       {"allocation", m.dynamics.scope}};
  j["growth"] = Json{{"enabled", m.growth.enabled},
                     {"coefficients", "growth_coefficients.csv"},
                     {"rd_process", "rd_process.csv"}};
  const auto path = dir / "manifest.json";
  write_json(path, j);
  return path;
}

// ---------------------------------------------------------------------------
// Reports

void write_calibration_report(const fs::path& path, const std::vector<CalibrationRow>& rows) {
  std::vector<std::vector<std::string>> out;
  out.reserve(rows.size());
  for (const auto& r : rows)
    out.push_back({r.nest, r.region, r.sector, r.parameter, format_number(r.value),
                   format_number(r.residual)});
  write_csv(path, {"nest", "region", "sector", "parameter", "value", "residual"}, out);
}

void write_validation_report(const fs::path& path, const ValidationReport& rep) {
  std::vector<std::vector<std::string>> out;
  for (const auto& c : rep.checks)
    out.push_back({to_string(c.kind), c.region, c.sector, format_number(c.lhs),
                   format_number(c.rhs), format_number(c.relative_residual)});
  write_csv(path, {"identity", "region", "sector", "lhs", "rhs", "relative_residual"}, out);
}

void write_trace(const fs::path& path, const std::vector<TraceRow>& trace) {
  std::vector<std::vector<std::string>> out;
  for (const auto& t : trace)
    out.push_back({std::to_string(t.iteration), format_number(t.max_residual), format_number(t.step)});
  write_csv(path, {"iteration", "max_residual", "step"}, out);
}

namespace {

void state_rows(const EconomyState& s, const Dimensions& dims,
                std::vector<std::vector<std::string>>& out) {
  const auto year = std::to_string(s.year);
  for (std::size_t r = 0; r < dims.n_regions(); ++r) {
    const auto& rn = dims.regions()[r];
    auto reg = [&](const char* name, double v) {
      out.push_back({year, rn, "", name, format_number(v)});
    };
    reg("gdp", s.gdp[r]);
    reg("gdp_real", s.gdp_real[r]);
    reg("investment_price", s.pi[r]);
    reg("investment", s.investment[r]);
    reg("savings", s.savings[r]);
    reg("household_income", s.household_income[r]);
    reg("human_capital", s.human_capital[r]);
    reg("demand_shock", s.demand_shock[r]);
    reg("levy", s.levy[r]);
    for (std::size_t e = 0; e < dims.n_skills(); ++e)
      out.push_back({year, rn, dims.skills()[e], "wage", format_number(s.wage(r, e))});
    for (std::size_t i = 0; i < dims.n_sectors(); ++i) {
      const auto& sn = dims.sectors()[i];
      auto sec = [&](const char* name, double v) {
        out.push_back({year, rn, sn, name, format_number(v)});
      };
      sec("price", s.pd(r, i));
      sec("armington_price", s.pa(r, i));
      sec("output", s.output(r, i));
      sec("absorption", s.absorption(r, i));
      sec("imports", s.imports(r, i));
      sec("household", s.household(r, i));
      sec("government", s.government(r, i));
      sec("rent", s.rent(r, i));
      sec("capital", s.capital(r, i));
      sec("tfp", s.tfp(r, i));
      sec("rd", s.rd(r, i));
      sec("rd_shock", s.rd_shock(r, i));
    }
  }
}

}  // namespace

void write_state_csv(const fs::path& path, const EconomyState& s, const Dimensions& dims) {
  write_states_csv(path, std::span<const EconomyState>(&s, 1), dims);
}

void write_states_csv(const fs::path& path, std::span<const EconomyState> states,
                      const Dimensions& dims) {
  std::vector<std::vector<std::string>> out;
  for (const auto& s : states) state_rows(s, dims, out);
  write_csv(path, {"year", "region", "sector", "variable", "value"}, out);
}

}  // namespace sgem
