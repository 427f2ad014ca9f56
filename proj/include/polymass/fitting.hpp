#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "polymass/common.hpp"

namespace polymass {

/// True when every |v| is below the floor; order fits on such data are noise.
inline bool all_negligible(const std::vector<double>& values, double floor = 1e-13) {
  for (double v : values)
    if (std::abs(v) > floor) return false;
  return true;
}

/// Least-squares fit of log|v| = c - q log r; returns the decay order q.
/// Requires at least two samples with |v| > 0.
inline std::optional<double> fit_decay_order(const std::vector<double>& radii,
                                             const std::vector<double>& values) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double v = std::abs(values[i]);
    if (v <= 0.0 || !std::isfinite(v)) continue;
    lx.push_back(std::log(radii[i]));
    ly.push_back(std::log(v));
  }
  const std::size_t n = lx.size();
  if (n < 2) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-30) return std::nullopt;
  const double slope = (n * sxy - sx * sy) / denom;
  return -slope;
}

struct ExtrapolationResult {
  double limit = 0.0;
  std::optional<double> order;  // fitted decay order of |estimate - limit|
};

/// Limit of a scale ladder assuming a single dominant error order, fitted from
/// the successive differences, with Richardson extrapolation on the two finest
/// scales. Exactly-zero ladders extrapolate to the last value.
inline ExtrapolationResult extrapolate_limit(const std::vector<double>& scales,
                                             const std::vector<double>& estimates) {
  const std::size_t n = scales.size();
  if (n == 0) throw config_error("extrapolate_limit: empty ladder");
  ExtrapolationResult res;
  res.limit = estimates.back();
  if (n < 3) return res;

  std::vector<double> diff_scale, diff_val;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    diff_scale.push_back(std::sqrt(scales[i] * scales[i + 1]));
    diff_val.push_back(estimates[i + 1] - estimates[i]);
  }
  if (all_negligible(diff_val, 1e-14)) return res;  // flat ladder

  const auto q = fit_decay_order(diff_scale, diff_val);
  if (!q || !(*q > 0.0)) return res;

  const double sN = scales[n - 1], sM = scales[n - 2];
  const double ratio = std::pow(sN / sM, *q);
  res.limit = (estimates[n - 1] * ratio - estimates[n - 2]) / (ratio - 1.0);

  std::vector<double> errs(n);
  for (std::size_t i = 0; i < n; ++i) errs[i] = estimates[i] - res.limit;
  res.order = fit_decay_order(std::vector<double>(scales.begin(), scales.end()), errs);
  return res;
}

}  // namespace polymass
