#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sgem {

enum class SectorGroup { Traditional, LowTech, MediumTech, HighTech, KnowledgeServices, OtherServices };

inline constexpr std::size_t kSectorGroupCount = 6;

std::string_view to_string(SectorGroup g);
SectorGroup parse_sector_group(std::string_view name);
const std::vector<SectorGroup>& all_sector_groups();

/// NACE Rev.2 codes of the six R&D-intensity groups. Ranges such as "C10-C12" are
/// listed both as printed and expanded into their member codes.
const std::map<std::string, SectorGroup>& default_nace_groups();

/// Ordered index sets of the model. Immutable once constructed.
class Dimensions {
 public:
  Dimensions() = default;
  Dimensions(std::vector<std::string> regions, std::vector<std::string> sectors,
             std::vector<std::string> skills, std::map<std::string, SectorGroup> sector_groups,
             int first_year, int last_year);

  const std::vector<std::string>& regions() const { return regions_; }
  const std::vector<std::string>& sectors() const { return sectors_; }
  const std::vector<std::string>& skills() const { return skills_; }
  const std::map<std::string, SectorGroup>& sector_groups() const { return groups_; }
  int first_year() const { return first_year_; }
  int last_year() const { return last_year_; }

  std::size_t n_regions() const { return regions_.size(); }
  std::size_t n_sectors() const { return sectors_.size(); }
  std::size_t n_skills() const { return skills_.size(); }

  std::size_t region_index(std::string_view r) const;
  std::size_t sector_index(std::string_view s) const;
  std::size_t skill_index(std::string_view e) const;
  std::optional<std::size_t> find_region(std::string_view r) const;
  std::optional<std::size_t> find_sector(std::string_view s) const;

  SectorGroup sector_group_of(std::string_view sector) const;
  SectorGroup group_of(std::size_t sector) const { return group_by_index_[sector]; }

  bool operator==(const Dimensions&) const = default;

 private:
  std::vector<std::string> regions_;
  std::vector<std::string> sectors_;
  std::vector<std::string> skills_;
  std::map<std::string, SectorGroup> groups_;
  std::vector<SectorGroup> group_by_index_;
  int first_year_ = 0;
  int last_year_ = 0;
};

}  // namespace sgem
