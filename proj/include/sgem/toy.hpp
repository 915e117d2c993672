#pragma once

#include <cstdint>
#include <random>

#include "sgem/benchmark.hpp"
#include "sgem/parameters.hpp"

namespace sgem {

struct ToySpec {
  std::size_t regions = 2;
  std::size_t sectors = 2;
  std::uint64_t seed = 42;
  double growth_rate = 0.0;  // same g for every region
  int first_year = 2020;
  int last_year = 2050;
};

struct ToyModel {
  BenchmarkDataset data;
  DynamicsSettings dynamics;
};

/// Balanced synthetic benchmark. Region 0 is the TFP leader in every sector and
/// benchmark investment equals replacement investment, so with g = 0 and growth
/// switched off the benchmark is a stationary path.
ToyModel make_toy(const ToySpec& spec);

/// Draws from std::mt19937_64 mapped by hand, because the standard distributions
/// are implementation-defined and toy files must be identical across toolchains.
class ToyRng {
 public:
  explicit ToyRng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();  // Box-Muller

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sgem
