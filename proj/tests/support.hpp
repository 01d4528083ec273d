#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "neurocnn/parametrization.hpp"

namespace neurocnn::support {

inline std::vector<double> normals(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

inline WeightTuple<double> normal_weights(const Architecture& arch, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return random_like<double>(arch, [&] { return dist(rng); });
}

// max |a - b| / max(1, max |a|, max |b|)
inline double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0;
  double scale = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
  }
  return diff / scale;
}

inline Architecture app_c() { return validate_architecture(3, {2, 2}, {1, 1}, 2); }

// Strided, deep and r = 3 cases; all small enough for dense designs.
inline std::vector<Architecture> sample_architectures() {
  return {
      app_c(),
      validate_architecture(7, {3, 2}, {2, 1}, 2),
      validate_architecture(4, {2, 2, 2}, {1, 1, 1}, 2),
      validate_architecture(5, {3, 3}, {1, 1}, 3),
      validate_architecture(8, {2, 3}, {2, 1}, 2),
  };
}

}  // namespace neurocnn::support
