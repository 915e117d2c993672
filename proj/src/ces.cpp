#include "sgem/ces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "sgem/error.hpp"

namespace sgem {

namespace {

constexpr double kCobbDouglasBand = 1e-10;

bool is_cobb_douglas(double sigma) { return std::abs(sigma - 1.0) < kCobbDouglasBand; }

}  // namespace

double substitution_exponent(double sigma) {
  if (!(sigma > 0.0)) throw DomainError(fmt::format("elasticity {} must be positive", sigma));
  return (sigma - 1.0) / sigma;
}

CesNest CesNest::calibrate(std::span<const double> values, std::span<const double> prices,
                           double sigma, double composite_quantity) {
  if (values.size() != prices.size() || values.empty())
    throw DomainError("CES calibration needs one price per input");
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw DomainError(fmt::format("elasticity {} must be nonnegative", sigma));
  const double total = std::accumulate(values.begin(), values.end(), 0.0);
  if (!(total > 0.0)) throw DomainError("CES calibration with zero total value");
  if (!(composite_quantity > 0.0)) throw DomainError("CES calibration with zero composite");
  CesNest n;
  n.sigma = sigma;
  n.theta.resize(values.size());
  n.ref_price.assign(prices.begin(), prices.end());
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j] < 0.0 || !(prices[j] > 0.0)) throw DomainError("CES calibration with bad input");
    n.theta[j] = values[j] / total;
  }
  n.ref_cost = total / composite_quantity;
  return n;
}

CesNest CesNest::calibrate(std::span<const double> values, double sigma) {
  std::vector<double> ones(values.size(), 1.0);
  const double total = std::accumulate(values.begin(), values.end(), 0.0);
  return calibrate(values, ones, sigma, total);
}

double CesNest::unit_cost(std::span<const double> prices) const {
  const std::size_t n = theta.size();
  if (is_cobb_douglas(sigma)) {
    double log_c = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (theta[j] > 0.0) log_c += theta[j] * std::log(prices[j] / ref_price[j]);
    return ref_cost * std::exp(log_c);
  }
  const double e = 1.0 - sigma;
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    if (theta[j] > 0.0) sum += theta[j] * std::pow(prices[j] / ref_price[j], e);
  return ref_cost * std::pow(sum, 1.0 / e);
}

void CesNest::unit_demands(std::span<const double> prices, double cost,
                           std::span<double> out) const {
  const std::size_t n = theta.size();
  const double rel_cost = cost / ref_cost;
  for (std::size_t j = 0; j < n; ++j) {
    if (theta[j] == 0.0) {
      out[j] = 0.0;
      continue;
    }
    const double base = theta[j] * ref_cost / ref_price[j];
    const double rel_price = prices[j] / ref_price[j];
    if (sigma == 0.0)
      out[j] = base;
    else if (is_cobb_douglas(sigma))
      out[j] = base * rel_cost / rel_price;
    else
      out[j] = base * std::pow(rel_cost / rel_price, sigma);
  }
}

CesStandardForm CesNest::standard_form() const {
  const std::size_t n = theta.size();
  CesStandardForm f;
  f.sigma = sigma;
  f.shares.assign(n, 0.0);
  // Benchmark input quantities per unit of composite.
  std::vector<double> x0(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) x0[j] = theta[j] * ref_cost / ref_price[j];

  if (is_cobb_douglas(sigma)) {
    double log_y = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      f.shares[j] = theta[j];
      if (theta[j] > 0.0) log_y += theta[j] * std::log(x0[j]);
    }
    f.scale = std::exp(-log_y);
    return f;
  }
  if (sigma == 0.0) {
    const double total = std::accumulate(x0.begin(), x0.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) f.shares[j] = x0[j] / total;
    f.scale = 1.0 / total;
    return f;
  }
  // alpha_j proportional to p0_j * x0_j^(1/sigma); computed in logs so small sigmas stay finite.
  std::vector<double> log_w(n, -std::numeric_limits<double>::infinity());
  double log_max = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    if (theta[j] <= 0.0) continue;
    log_w[j] = std::log(ref_price[j]) + std::log(x0[j]) / sigma;
    log_max = std::max(log_max, log_w[j]);
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    if (theta[j] > 0.0) sum += std::exp(log_w[j] - log_max);
  const double log_norm = log_max + std::log(sum);
  for (std::size_t j = 0; j < n; ++j)
    if (theta[j] > 0.0) f.shares[j] = std::exp(log_w[j] - log_norm);
  // phi from 1 = phi * [sum alpha_j x0_j^rho]^(1/rho).
  const double rho = substitution_exponent(sigma);
  std::vector<double> log_terms;
  double log_tmax = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    if (theta[j] <= 0.0) continue;
    const double t = (log_w[j] - log_norm) + rho * std::log(x0[j]);
    log_terms.push_back(t);
    log_tmax = std::max(log_tmax, t);
  }
  double tsum = 0.0;
  for (double t : log_terms) tsum += std::exp(t - log_tmax);
  const double log_inner = log_tmax + std::log(tsum);
  f.scale = std::exp(-log_inner / rho);
  return f;
}

double CesStandardForm::output(std::span<const double> inputs) const {
  const std::size_t n = shares.size();
  if (is_cobb_douglas(sigma)) {
    double log_y = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (shares[j] > 0.0) log_y += shares[j] * std::log(inputs[j]);
    return scale * std::exp(log_y);
  }
  if (sigma == 0.0) {
    double y = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j)
      if (shares[j] > 0.0) y = std::min(y, inputs[j] / shares[j]);
    return scale * y;
  }
  const double rho = substitution_exponent(sigma);
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    if (shares[j] > 0.0) sum += shares[j] * std::pow(inputs[j], rho);
  return scale * std::pow(sum, 1.0 / rho);
}

}  // namespace sgem
