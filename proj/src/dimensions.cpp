#include "sgem/dimensions.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "sgem/error.hpp"

namespace sgem {

std::string_view to_string(SectorGroup g) {
  switch (g) {
    case SectorGroup::Traditional: return "Traditional";
    case SectorGroup::LowTech: return "LowTech";
    case SectorGroup::MediumTech: return "MediumTech";
    case SectorGroup::HighTech: return "HighTech";
    case SectorGroup::KnowledgeServices: return "KnowledgeServices";
    case SectorGroup::OtherServices: return "OtherServices";
  }
  return "?";
}

SectorGroup parse_sector_group(std::string_view name) {
  for (auto g : all_sector_groups())
    if (to_string(g) == name) return g;
  throw LookupError(fmt::format("unknown sector group '{}'", name));
}

const std::vector<SectorGroup>& all_sector_groups() {
  static const std::vector<SectorGroup> groups = {
      SectorGroup::Traditional, SectorGroup::LowTech,           SectorGroup::MediumTech,
      SectorGroup::HighTech,    SectorGroup::KnowledgeServices, SectorGroup::OtherServices};
  return groups;
}

namespace {

// "C10-C12" -> C10 C11 C12; "N80- N82" -> N80 N81 N82. Anything else is returned unchanged.
std::vector<std::string> expand_range(const std::string& code) {
  auto dash = code.find('-');
  if (dash == std::string::npos) return {code};
  std::string lo = code.substr(0, dash);
  std::string hi = code.substr(dash + 1);
  hi.erase(std::remove(hi.begin(), hi.end(), ' '), hi.end());
  if (lo.size() < 2 || hi.size() < 2 || lo[0] != hi[0]) return {code};
  int a = std::stoi(lo.substr(1));
  int b = std::stoi(hi.substr(1));
  std::vector<std::string> out;
  for (int k = a; k <= b; ++k) out.push_back(fmt::format("{}{:02d}", lo[0], k));
  return out;
}

}  // namespace

const std::map<std::string, SectorGroup>& default_nace_groups() {
  static const std::map<std::string, SectorGroup> table = [] {
    using G = SectorGroup;
    // C33 is printed under both medium-tech manufacturing and other services;
    // the first listing wins.
    const std::vector<std::pair<G, std::vector<std::string>>> rows = {
        {G::Traditional, {"A01", "A02", "A03", "B"}},
        {G::LowTech, {"C10-C12", "C13-C15", "C16", "C17", "C18", "C31_C32"}},
        {G::MediumTech, {"C19", "C22", "C23", "C24", "C25", "C33"}},
        {G::HighTech, {"C21", "C26", "C20", "C27", "C28", "C29", "C30"}},
        {G::KnowledgeServices,
         {"H50", "H51", "J58", "J59_J60", "J61", "J62_J63", "K64", "K65", "K66", "M69_M70", "M71",
          "M72", "M73", "M74_M75", "N78", "N80-N82", "O84", "P85", "Q86", "Q87_Q88", "R90-R92",
          "R93"}},
        {G::OtherServices,
         {"C33", "D35", "E36", "E37-E39", "F", "G45", "G46", "G47", "H49", "H52", "H53", "I",
          "L68B", "L68A", "N77", "N79", "S94", "S95", "S96", "T", "U"}},
    };
    std::map<std::string, SectorGroup> m;
    for (const auto& [group, codes] : rows) {
      for (const auto& code : codes) {
        m.emplace(code, group);
        for (const auto& c : expand_range(code)) m.emplace(c, group);
      }
    }
    return m;
  }();
  return table;
}

namespace {

template <class T>
void require_unique_nonempty(const std::vector<T>& v, const char* what) {
  if (v.empty()) throw StructuralError(fmt::format("{} list is empty", what));
  std::set<T> seen;
  for (const auto& x : v)
    if (!seen.insert(x).second) throw StructuralError(fmt::format("duplicate {} '{}'", what, x));
}

std::size_t index_in(const std::vector<std::string>& v, std::string_view key, const char* what) {
  auto it = std::find(v.begin(), v.end(), key);
  if (it == v.end()) throw LookupError(fmt::format("unknown {} '{}'", what, key));
  return static_cast<std::size_t>(it - v.begin());
}

}  // namespace

Dimensions::Dimensions(std::vector<std::string> regions, std::vector<std::string> sectors,
                       std::vector<std::string> skills,
                       std::map<std::string, SectorGroup> sector_groups, int first_year,
                       int last_year)
    : regions_(std::move(regions)),
      sectors_(std::move(sectors)),
      skills_(std::move(skills)),
      groups_(std::move(sector_groups)),
      first_year_(first_year),
      last_year_(last_year) {
  require_unique_nonempty(regions_, "region");
  require_unique_nonempty(sectors_, "sector");
  require_unique_nonempty(skills_, "skill");
  if (first_year_ > last_year_)
    throw StructuralError(
        fmt::format("first_year {} is after last_year {}", first_year_, last_year_));
  for (const auto& s : sectors_) {
    auto it = groups_.find(s);
    if (it == groups_.end()) {
      auto d = default_nace_groups().find(s);
      if (d == default_nace_groups().end())
        throw StructuralError(fmt::format("sector '{}' has no sector group", s));
      it = groups_.emplace(s, d->second).first;
    }
    group_by_index_.push_back(it->second);
  }
  for (const auto& [s, g] : groups_)
    if (std::find(sectors_.begin(), sectors_.end(), s) == sectors_.end())
      throw StructuralError(fmt::format("sector group given for unknown sector '{}'", s));
}

std::size_t Dimensions::region_index(std::string_view r) const { return index_in(regions_, r, "region"); }
std::size_t Dimensions::sector_index(std::string_view s) const { return index_in(sectors_, s, "sector"); }
std::size_t Dimensions::skill_index(std::string_view e) const { return index_in(skills_, e, "skill"); }

std::optional<std::size_t> Dimensions::find_region(std::string_view r) const {
  auto it = std::find(regions_.begin(), regions_.end(), r);
  if (it == regions_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - regions_.begin());
}

std::optional<std::size_t> Dimensions::find_sector(std::string_view s) const {
  auto it = std::find(sectors_.begin(), sectors_.end(), s);
  if (it == sectors_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - sectors_.begin());
}

SectorGroup Dimensions::sector_group_of(std::string_view sector) const {
  return group_by_index_[sector_index(sector)];
}

}  // namespace sgem
