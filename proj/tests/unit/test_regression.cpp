#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "neurocnn/regression.hpp"
#include "neurocnn/serialize.hpp"
#include "support.hpp"

using namespace neurocnn;

namespace {

Dataset sample(const Architecture& arch, std::uint64_t seed, std::size_t n = 0) {
  DatasetSpec spec;
  spec.seed = seed;
  spec.n = n;
  return generate_dataset(arch, spec);
}

}  // namespace

TEST(Loss, MatchesDirectForwardSum) {
  std::mt19937_64 rng(51);
  for (const auto& arch : support::sample_architectures()) {
    const auto data = sample(arch, 3);
    const auto w = support::normal_weights(arch, rng);
    double direct = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto y = forward<double>(arch, w, data.x[i]);
      for (std::size_t o = 0; o < y.size(); ++o) direct += (y[o] - data.y[i][o]) * (y[o] - data.y[i][o]);
    }
    EXPECT_NEAR(loss(arch, w, data), direct, 1e-10 * std::max(1.0, direct));
  }
}

TEST(Loss, VeronesePairingOracle) {
  // Each output is <coeffs, veronese(x)>: the design rows reproduce forward().
  std::mt19937_64 rng(52);
  for (const auto& arch : support::sample_architectures()) {
    const auto data = sample(arch, 4);
    const auto ds = design_system(data, arch);
    const auto w = support::normal_weights(arch, rng);
    const Eigen::MatrixXd pred = coefficient_matrix(arch, w) * ds.X;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto y = forward<double>(arch, w, data.x[i]);
      for (std::size_t o = 0; o < y.size(); ++o) {
        EXPECT_NEAR(pred(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(i)), y[o], 1e-9 * std::max(1.0, std::abs(y[o])));
      }
    }
  }
}

TEST(Loss, NoiselessTeacherHasZeroLoss) {
  std::mt19937_64 rng(53);
  for (const auto& arch : support::sample_architectures()) {
    const auto teacher = support::normal_weights(arch, rng);
    DatasetSpec spec;
    spec.mode = DatasetMode::Teacher;
    spec.noise = 0.0;
    spec.seed = 9;
    const auto data = generate_dataset(arch, spec, teacher);
    EXPECT_LT(loss(arch, teacher, data), 1e-18 * static_cast<double>(data.size()) + 1e-20);
  }
}

TEST(Loss, DecomposesAsDistancePlusConstant) {
  std::mt19937_64 rng(54);
  for (const auto& arch : support::sample_architectures()) {
    const auto data = sample(arch, 5);
    const auto ds = design_system(data, arch);
    ASSERT_TRUE(ds.full_rank);
    for (int trial = 0; trial < 5; ++trial) {
      const auto w = support::normal_weights(arch, rng);
      const auto dec = loss_as_distance(arch, w, ds);
      const double direct = loss(arch, w, data);
      EXPECT_NEAR(dec.dist_sq + dec.constant, direct, 1e-8 * std::max(1.0, direct));
    }
    // The constant is the unconstrained least-squares residual.
    const auto dec = loss_as_distance(arch, support::normal_weights(arch, rng), ds);
    EXPECT_NEAR(dec.constant, least_squares_residual(ds), 1e-8 * std::max(1.0, dec.constant));
    EXPECT_GE(dec.constant, -1e-9);
  }
}

TEST(Design, SingleInputGramIsFourthMoment) {
  // d0 = 1, one layer of size 1, r = 2, L = 2: N = 1 and G = sum x^4.
  const auto arch = validate_architecture(1, {1, 1}, {1, 1}, 2);
  Dataset data;
  for (double x : {0.5, -1.0, 2.0}) {
    data.x.push_back({x});
    data.y.push_back({x});
  }
  const auto ds = design_system(data, arch);
  ASSERT_EQ(ds.G.rows(), 1);
  EXPECT_DOUBLE_EQ(ds.G(0, 0), 0.0625 + 1.0 + 16.0);
}

TEST(Design, TooFewSamplesIsRankDeficient) {
  const auto arch = validate_architecture(5, {3, 3}, {1, 1}, 3);
  const std::size_t N = static_cast<std::size_t>(sym_dimension(5, 3));
  const auto data = sample(arch, 6, N - 1);
  const auto ds = design_system(data, arch);
  EXPECT_FALSE(ds.full_rank);
  EXPECT_EQ(ds.rank, static_cast<int>(N - 1));
  EXPECT_THROW(ds.v_anchor(), Error);
  std::mt19937_64 rng(1);
  EXPECT_THROW(loss_as_distance(arch, support::normal_weights(arch, rng), ds), Error);
}

TEST(Design, GenericDatasetsHaveFullRank) {
  const auto arch = support::app_c();
  for (std::uint64_t seed = 0; seed < 50; ++seed) EXPECT_TRUE(design_system(sample(arch, seed), arch).full_rank);
}

TEST(Design, ShapeChecks) {
  const auto arch = support::app_c();
  Dataset data{{{1, 2}}, {{1}}};
  EXPECT_THROW(check_dataset(arch, data), Error);
}

TEST(Anchor, ScalesWithTargets) {
  const auto arch = support::sample_architectures()[1];
  auto data = sample(arch, 7);
  const Eigen::MatrixXd a = design_system(data, arch).v_anchor();
  for (auto& y : data.y) {
    for (double& v : y) v *= 4.0;
  }
  const Eigen::MatrixXd b = design_system(data, arch).v_anchor();
  EXPECT_LT((b - 4.0 * a).norm(), 1e-9 * b.norm());
}

TEST(Anchor, InterpolatesExactPolynomialData) {
  // Targets that are themselves network outputs put the anchor on the network.
  std::mt19937_64 rng(55);
  const auto arch = support::sample_architectures()[2];
  const auto teacher = support::normal_weights(arch, rng);
  DatasetSpec spec;
  spec.mode = DatasetMode::Teacher;
  spec.noise = 0.0;
  spec.seed = 2;
  const auto ds = design_system(generate_dataset(arch, spec, teacher), arch);
  const Eigen::MatrixXd M = coefficient_matrix(arch, teacher);
  EXPECT_LT((ds.v_anchor() - M).norm(), 1e-8 * M.norm());
  EXPECT_LT(least_squares_residual(ds), 1e-12);
}

TEST(ConvSubspace, DimensionIsSymOfReceptiveField) {
  for (const auto& arch : support::sample_architectures()) {
    const auto sub = conv_subspace(arch);
    EXPECT_EQ(static_cast<std::int64_t>(sub.dimension()), sym_dimension(arch.receptive_field(), arch.output_degree()));
    EXPECT_EQ(sub.outputs, arch.output_width());
  }
}

TEST(ConvSubspace, ContainsTheNeuromanifold) {
  std::mt19937_64 rng(56);
  for (const auto& arch : support::sample_architectures()) {
    const auto sub = conv_subspace(arch);
    for (int trial = 0; trial < 5; ++trial) {
      EXPECT_LT(containment_residual(sub, coefficient_matrix(arch, support::normal_weights(arch, rng))), 1e-12);
    }
  }
}

TEST(ConvSubspace, ProjectionIsIdempotentAndOrthogonal) {
  std::mt19937_64 rng(57);
  for (const auto& arch : support::sample_architectures()) {
    const auto ds = design_system(sample(arch, 8), arch);
    const auto sub = conv_subspace(arch);
    const Eigen::MatrixXd P = project_anchor(ds, sub);
    EXPECT_LT(containment_residual(sub, P), 1e-9);
    // <A - P, M>_G = 0 for M in the subspace.
    const Eigen::MatrixXd R = ds.v_anchor() - P;
    for (std::size_t b = 0; b < sub.dimension(); b += std::max<std::size_t>(1, sub.dimension() / 7)) {
      const double ip = (R * ds.G * sub.basis[b].transpose()).trace();
      EXPECT_LT(std::abs(ip), 1e-7 * std::max(1.0, R.norm() * ds.G.norm()));
    }
  }
}

TEST(Serialize, JsonlRoundTrip) {
  const auto arch = support::sample_architectures()[1];
  const auto data = sample(arch, 10);
  std::stringstream buf;
  write_jsonl(buf, data);
  const auto back = read_jsonl(buf);
  ASSERT_EQ(back.size(), data.size());
  EXPECT_EQ(back.x, data.x);
  EXPECT_EQ(back.y, data.y);
  std::stringstream bad("{\"x\": [1, 2], \"y\": [1]}\n{oops\n");
  EXPECT_THROW(read_jsonl(bad), Error);
}
