#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace polymass {

// Exit-code contract used by the CLI: 0 success, 1 verification failure,
// 2 configuration/validation error, 3 numerical error.
struct config_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kPi = 3.14159265358979323846;

/// Volume of the standard unit k-sphere: 2 pi^{(k+1)/2} / Gamma((k+1)/2).
inline double sphere_volume(int k) {
  if (k < 1) throw config_error("sphere_volume: k must be >= 1");
  return 2.0 * std::pow(kPi, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1));
}

/// Smallness threshold for the metric deviation, 1/(2(n-1)).
inline double smallness_bound(int n) { return 0.5 / static_cast<double>(n - 1); }

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic uniform draw in [-1, 1) addressed by (seed, counter).
inline double counter_uniform(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t h = splitmix64(seed ^ (0x9e3779b97f4a7c15ULL * (counter + 1)));
  return static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
}

/// Fixed 17-significant-digit formatting used for CSV output.
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace polymass
