#pragma once

// Property suites behind `neurocnn verify`. Each property records how many
// instances it checked, how many failed, and the worst observed error.

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "neurocnn/conv.hpp"

namespace neurocnn::tools {

struct PropertyResult {
  explicit PropertyResult(std::string n = {}) : name(std::move(n)) {}

  std::string name;
  std::size_t checks = 0;
  std::size_t failures = 0;
  double worst = 0.0;
  bool skipped = false;
  std::string note;

  bool passed() const { return skipped || failures == 0; }
  // Counts one instance; fails it when error > limit or error is NaN.
  void record(double error, double limit);
  void record(bool ok);
};

struct SuiteResult {
  std::string suite;
  std::vector<PropertyResult> properties;

  bool passed() const;
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  std::optional<Architecture> arch;
  // Swaps in a deliberately wrong gED degree vector so the table check fails.
  bool canary = false;
};

const std::vector<std::string>& suite_names();

// Throws ParseError for an unknown suite name.
SuiteResult run_suite(const std::string& name, const VerifyOptions& opts);

std::string to_json(const std::vector<SuiteResult>& results, const VerifyOptions& opts);

// Rows r = 1..6, columns k = 2..6, L = 2, k_0 = k_1 = k; as published.
const std::array<std::array<std::uint64_t, 5>, 6>& reference_table1();

// gED grid computed either by the library or, with canary set, with the
// Segre-Veronese degrees shifted up by one power of r.
std::array<std::array<std::uint64_t, 5>, 6> computed_table1(bool canary);

// L in [1, max_layers], k_i in [1, max_k], s_i in [1, max_s], r in [min_r, max_r],
// d_L in [1, max_out]; d0 follows from the width relation.
Architecture random_architecture(std::mt19937_64& rng, int max_layers, int max_k, int max_s, int min_r, int max_r,
                                 int max_out = 3);

// Fixed architectures used when no --arch is given.
std::vector<Architecture> default_architectures();
// Subset small enough for dense dataset designs (N <= 40).
std::vector<Architecture> regression_architectures();

}  // namespace neurocnn::tools
