#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "sgem/calibration.hpp"
#include "sgem/equilibrium.hpp"
#include "sgem/io.hpp"
#include "sgem/state.hpp"
#include "sgem/toy.hpp"

namespace sgem::test {

inline std::filesystem::path data_dir() { return SGEM_DATA_DIR; }

/// Fresh scratch directory under SGEM_TMP (or the system temp dir).
inline std::filesystem::path scratch(const std::string& name) {
  const char* env = std::getenv("SGEM_TMP");
  std::filesystem::path root =
      env ? std::filesystem::path(env) : std::filesystem::temp_directory_path() / "sgem_tests";
  auto dir = root / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline double rel(double a, double b) {
  const double m = std::max(std::abs(a), std::abs(b));
  return m == 0.0 ? 0.0 : std::abs(a - b) / m;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Calibrated {
  ModelInput input;
  CalibrationResult cal;
  EconomyState start;
};

inline Calibrated calibrate_bundle(const std::string& name, const CalibrationConfig& cfg = {}) {
  Calibrated c;
  c.input = load_model(data_dir() / name / "model" / "manifest.json");
  c.cal = calibrate(c.input.data, c.input.dynamics, c.input.growth, cfg);
  c.start = benchmark_state(c.input.data, c.cal.params);
  return c;
}

inline Calibrated calibrate_toy(const ToySpec& spec, const CalibrationConfig& cfg = {}) {
  Calibrated c;
  auto toy = make_toy(spec);
  c.input.data = toy.data;
  c.input.dynamics = toy.dynamics;
  c.cal = calibrate(c.input.data, c.input.dynamics, c.input.growth, cfg);
  c.start = benchmark_state(c.input.data, c.cal.params);
  return c;
}

/// Cached calibrations of the bundled toys; calibration is deterministic.
inline const Calibrated& bundle(const std::string& name) {
  static std::map<std::string, Calibrated> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, calibrate_bundle(name)).first;
  return it->second;
}

#ifdef SGEM_CLI
/// Runs the CLI with stdout/stderr sent to `log`; returns the exit code.
inline int run_cli(const std::string& args, const std::filesystem::path& log) {
  const std::string cmd = std::string("\"") + SGEM_CLI + "\" " + args + " > \"" + log.string() +
                          "\" 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
#endif

}  // namespace sgem::test
