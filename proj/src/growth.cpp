#include "sgem/growth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "sgem/error.hpp"

namespace sgem {

GrowthParams GrowthParams::defaults() {
  using G = SectorGroup;
  GrowthParams p;
  p.pooled = {0.100, -0.47, 0.027, 0.29, 0.26, 0.47};
  p.pooled_rd = {0.976, 0.00129};

  // Frontier-growth estimates that are not significant fall back to pooled (0.100).
  auto group = [&](double b1, double b2) {
    GrowthCoefficients k = p.pooled;
    k.b1 = b1;
    k.b2 = b2;
    return k;
  };
  p.by_group[static_cast<std::size_t>(G::Traditional)] = group(0.24, -0.21);
  p.by_group[static_cast<std::size_t>(G::HighTech)] = group(0.20, -0.22);
  p.by_group[static_cast<std::size_t>(G::MediumTech)] = group(0.100, -0.51);
  p.by_group[static_cast<std::size_t>(G::LowTech)] = group(0.100, -0.13);
  p.by_group[static_cast<std::size_t>(G::KnowledgeServices)] = group(0.049, -0.077);
  p.by_group[static_cast<std::size_t>(G::OtherServices)] = group(0.100, -0.14);

  // Medium-tech persistence is not significant; pooled process used instead.
  p.rd_by_group[static_cast<std::size_t>(G::Traditional)] = {0.990, 0.000278};
  p.rd_by_group[static_cast<std::size_t>(G::HighTech)] = {0.958, 0.00627};
  p.rd_by_group[static_cast<std::size_t>(G::MediumTech)] = p.pooled_rd;
  p.rd_by_group[static_cast<std::size_t>(G::LowTech)] = {0.928, 0.00161};
  p.rd_by_group[static_cast<std::size_t>(G::KnowledgeServices)] = {0.985, 0.000522};
  p.rd_by_group[static_cast<std::size_t>(G::OtherServices)] = {0.907, 0.000366};
  return p;
}

std::vector<std::string> GrowthParams::warnings() const {
  std::vector<std::string> out;
  for (auto g : all_sector_groups()) {
    const auto& k = coefficients(g);
    if (!(k.b2 < 0.0))
      out.push_back(fmt::format("{}: gap coefficient {} is not negative", to_string(g), k.b2));
    if (!(k.b1 < 1.0))
      out.push_back(fmt::format("{}: frontier coefficient {} is not below 1", to_string(g), k.b1));
    if (!(std::abs(rd_process(g).a) < 1.0))
      out.push_back(fmt::format("{}: R&D persistence {} has no long-run mean", to_string(g),
                                rd_process(g).a));
  }
  return out;
}

double tfp_growth(double gap, double frontier_growth, double h, double rd,
                  const GrowthCoefficients& k) {
  return k.b1 * frontier_growth + k.b2 * gap + k.b3 * h + k.b4 * h * gap + k.b5 * rd +
         k.b6 * rd * gap;
}

double rd_step(double rd, const RnDProcess& p) { return p.a * rd + p.c; }

double long_run_rd(const RnDProcess& p) {
  if (!(std::abs(p.a) < 1.0))
    throw DomainError(fmt::format("AR(1) persistence {} has no long-run mean", p.a));
  return p.c / (1.0 - p.a);
}

double frontier_level(const Array2& tfp, std::size_t sector) {
  double m = 0.0;
  for (std::size_t r = 0; r < tfp.rows(); ++r) m = std::max(m, tfp(r, sector));
  return m;
}

double frontier_growth(const Array2& tfp_prev, const Array2& tfp_now, std::size_t sector) {
  return std::log(frontier_level(tfp_now, sector) / frontier_level(tfp_prev, sector));
}

Array2 tfp_gaps(const Array2& tfp) {
  Array2 g(tfp.rows(), tfp.cols());
  for (std::size_t i = 0; i < tfp.cols(); ++i) {
    const double f = frontier_level(tfp, i);
    for (std::size_t r = 0; r < tfp.rows(); ++r) g(r, i) = std::log(tfp(r, i) / f);
  }
  return g;
}

double gap_contraction_factor(const GrowthCoefficients& k, double h, double rd) {
  return 1.0 + k.b2 + k.b4 * h + k.b6 * rd;
}

GrowthState apply_growth(const GrowthState& now, const GrowthShocks* shocks,
                         const Dimensions& dims, const GrowthParams& params) {
  const auto R = dims.n_regions();
  const auto N = dims.n_sectors();
  GrowthState next;
  next.tfp = Array2(R, N);
  next.rd = Array2(R, N);
  next.h = now.h;

  std::vector<double> h_eff = now.h;
  if (shocks && !shocks->h.empty())
    for (std::size_t r = 0; r < R; ++r) h_eff[r] = std::min(1.0, now.h[r] + shocks->h[r]);

  std::vector<double> z(R);
  for (std::size_t i = 0; i < N; ++i) {
    const auto g = dims.group_of(i);
    const auto& k = params.coefficients(g);
    const auto& proc = params.rd_process(g);

    double ln_front = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < R; ++r) ln_front = std::max(ln_front, std::log(now.tfp(r, i)));

    // z_r: next log level without the frontier-growth term.
    double z_max = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < R; ++r) {
      const double ln_a = std::log(now.tfp(r, i));
      const double gap = ln_a - ln_front;
      double rd = now.rd(r, i);
      if (shocks && shocks->rd.rows() == R) rd += shocks->rd(r, i);
      z[r] = ln_a + tfp_growth(gap, 0.0, h_eff[r], rd, k);
      z_max = std::max(z_max, z[r]);
      next.rd(r, i) = rd_step(now.rd(r, i), proc);
    }
    // Next frontier: max_r (z_r + b1 x) - ln_front = x, solved for x.
    const double x = (z_max - ln_front) / (1.0 - k.b1);
    for (std::size_t r = 0; r < R; ++r) next.tfp(r, i) = std::exp(z[r] + k.b1 * x);
  }
  next.h = h_eff;
  return next;
}

}  // namespace sgem
