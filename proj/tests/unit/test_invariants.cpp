#include <gtest/gtest.h>

#include <random>

#include "neurocnn/invariants.hpp"
#include "support.hpp"

using namespace neurocnn;

namespace {

BigInt sv(std::vector<int> m, std::vector<int> p) { return ged_segre_veronese(m, p); }

BigInt big_pow(int base, int exp) {
  BigInt out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

}  // namespace

TEST(Table1, MatchesPublishedValues) {
  const std::array<std::array<std::uint64_t, 5>, 6> published{{
      {6, 39, 284, 2205, 17730},
      {14, 219, 3772, 68405, 1277898},
      {22, 543, 14684, 417005, 12186066},
      {30, 1011, 37244, 1439205, 57202074},
      {38, 1623, 75676, 3699005, 185917794},
      {46, 2379, 134204, 7933205, 482134890},
  }};
  const Table1 t = table1();
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(t[i][j], BigInt(published[i][j])) << "r=" << i + 1 << " k=" << j + 2;
  }
}

TEST(SegreVeroneseGed, LinearSpaceIsOne) {
  for (int n = 0; n < 6; ++n) EXPECT_EQ(sv({1}, {n}), 1);
}

TEST(SegreVeroneseGed, QuadricSurface) { EXPECT_EQ(sv({1, 1}, {1, 1}), 6); }

TEST(SegreVeroneseGed, RationalNormalCurve) {
  for (int d = 1; d < 10; ++d) EXPECT_EQ(sv({d}, {1}), 3 * d - 2);
}

TEST(SegreVeroneseGed, VeroneseVarieties) {
  // ((2d - 1)^{n+1} - (d - 1)^{n+1}) / d
  for (int d = 1; d < 6; ++d) {
    for (int n = 1; n < 5; ++n) {
      EXPECT_EQ(sv({d}, {n}), (big_pow(2 * d - 1, n + 1) - big_pow(d - 1, n + 1)) / d) << "d=" << d << " n=" << n;
    }
  }
}

TEST(SegreVeroneseGed, FactorsCommute) {
  EXPECT_EQ(sv({2, 1}, {2, 3}), sv({1, 2}, {3, 2}));
  EXPECT_EQ(sv({3, 2, 1}, {1, 2, 1}), sv({1, 3, 2}, {1, 1, 2}));
}

TEST(Invariants, ToyArchitecture) {
  const auto rep = invariant_report(support::app_c());
  EXPECT_EQ(rep.dim, 3);
  EXPECT_EQ(rep.degree, 4);
  EXPECT_EQ(rep.ged, 14);
  EXPECT_EQ(rep.m, (std::vector<int>{2, 1}));
  EXPECT_EQ(rep.p, (std::vector<int>{1, 1}));
}

TEST(Invariants, SingleLayerIsLinear) {
  for (int k = 1; k < 6; ++k) {
    for (int r = 1; r < 4; ++r) EXPECT_EQ(ged_neuromanifold(std::vector<int>{k}, r), 1);
  }
}

TEST(Invariants, LinearActivationIsRejected) {
  const auto arch = validate_architecture(3, {2, 2}, {1, 1}, 1);
  EXPECT_THROW(neuromanifold_dim(arch), Error);
  EXPECT_THROW(neuromanifold_degree(arch), Error);
  EXPECT_THROW(invariant_report(arch), Error);
}

TEST(Invariants, StridesDoNotMatter) {
  EXPECT_EQ(ged_neuromanifold(validate_architecture(7, {3, 2}, {2, 1}, 2)),
            ged_neuromanifold(validate_architecture(4, {3, 2}, {1, 1}, 2)));
}

TEST(Invariants, TwoFormulasAgreeOnRandomArchitectures) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> layers(1, 4), size(1, 5), act(1, 5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> k(static_cast<std::size_t>(layers(rng)));
    for (int& v : k) v = size(rng);
    const int r = act(rng);
    std::vector<int> m(k.size()), p(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) {
      m[i] = static_cast<int>(ipow(r, static_cast<int>(k.size() - 1 - i)));
      p[i] = k[i] - 1;
    }
    EXPECT_EQ(ged_filter_formula(k, r), ged_segre_veronese(m, p));
    EXPECT_GT(ged_neuromanifold(k, r), 0);
  }
}

TEST(Invariants, DegreeAndDimension) {
  // (|k| - L)! prod_j r^{(L-j-1)(k_j-1)} / (k_j-1)!
  const auto arch = validate_architecture(6, {3, 2, 2}, {1, 1, 1}, 2);
  EXPECT_EQ(neuromanifold_dim(arch), 7 - 3 + 1);
  EXPECT_EQ(neuromanifold_degree(arch), BigInt(24 * 16 * 2 / 2));
}
