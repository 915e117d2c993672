#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "sgem/benchmark.hpp"
#include "sgem/calibration.hpp"
#include "sgem/equilibrium.hpp"
#include "sgem/parameters.hpp"
#include "sgem/state.hpp"

namespace sgem {

using Json = nlohmann::json;

/// A CSV file held as strings. The header row is required.
struct CsvTable {
  std::filesystem::path path;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by header name; StructuralError naming the file when absent.
  std::size_t column(std::string_view name) const;
  double number(std::size_t row, std::size_t col) const;
  const std::string& text(std::size_t row, std::size_t col) const { return rows[row][col]; }
};

/// Reads a comma-separated file with a header row. Quoted fields may contain commas.
/// Missing files raise StructuralError with the path.
CsvTable read_csv(const std::filesystem::path& path);

/// Locale-independent parse; the whole field must be consumed.
double parse_number(std::string_view text, std::string_view where);

/// Shortest decimal form that reads back to the same double.
std::string format_number(double v);

/// Writes rows verbatim, quoting fields that contain commas or quotes.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// Everything a model manifest describes.
struct ModelInput {
  BenchmarkDataset data;
  DynamicsSettings dynamics;
  GrowthParams growth = GrowthParams::defaults();
};

/// Loads `manifest.json` and the CSV tables it references (paths relative to the
/// manifest). Cells absent from a table are zero.
ModelInput load_model(const std::filesystem::path& manifest);

/// Writes manifest.json plus the CSV tables into `dir`. Returns the manifest path.
std::filesystem::path save_model(const std::filesystem::path& dir, const ModelInput& model);

/// Growth coefficients keyed by group ("Pooled" plus the six groups).
GrowthParams read_growth_csv(const std::filesystem::path& coefficients,
                             const std::filesystem::path& rd_process);
void write_growth_csv(const std::filesystem::path& coefficients,
                      const std::filesystem::path& rd_process, const GrowthParams& g);

CalibrationConfig load_calibration_config(const std::filesystem::path& path);
ClosureSpec load_closure(const std::filesystem::path& path, const Dimensions& dims);
SolverConfig load_solver_config(const std::filesystem::path& path);

void write_calibration_report(const std::filesystem::path& path,
                              const std::vector<CalibrationRow>& rows);
void write_validation_report(const std::filesystem::path& path, const ValidationReport& rep);
void write_trace(const std::filesystem::path& path, const std::vector<TraceRow>& trace);

/// Tidy per-region, per-sector dump of one solved period.
void write_state_csv(const std::filesystem::path& path, const EconomyState& s,
                     const Dimensions& dims);
void write_states_csv(const std::filesystem::path& path, std::span<const EconomyState> states,
                      const Dimensions& dims);

void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

// Exact JSON round-trips. Non-finite table entries and Frisch parameters are written
// as the strings "inf", "-inf" and "nan".
void to_json(Json& j, const Array2& a);
void from_json(const Json& j, Array2& a);
void to_json(Json& j, const Array3& a);
void from_json(const Json& j, Array3& a);
void to_json(Json& j, const Dimensions& d);
void from_json(const Json& j, Dimensions& d);
void to_json(Json& j, const BenchmarkDataset& d);
void from_json(const Json& j, BenchmarkDataset& d);
void to_json(Json& j, const CalibrationConfig& c);
void from_json(const Json& j, CalibrationConfig& c);
void to_json(Json& j, const DynamicsSettings& d);
void from_json(const Json& j, DynamicsSettings& d);
void to_json(Json& j, const GrowthParams& g);
void from_json(const Json& j, GrowthParams& g);
void to_json(Json& j, const ParameterSet& p);
void from_json(const Json& j, ParameterSet& p);
void to_json(Json& j, const EconomyState& s);
void from_json(const Json& j, EconomyState& s);

}  // namespace sgem
