#include <gtest/gtest.h>

#include <random>

#include "neurocnn/parametrization.hpp"
#include "support.hpp"

using namespace neurocnn;

TEST(Forward, AgreesWithSymbolicExpansion) {
  std::mt19937_64 rng(11);
  for (const auto& arch : support::sample_architectures()) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto w = support::normal_weights(arch, rng);
      const auto polys = symbolic_network(arch, w);
      ASSERT_EQ(static_cast<int>(polys.size()), arch.output_width());
      const auto x = support::normals(rng, static_cast<std::size_t>(arch.input_width()));
      const auto y = forward<double>(arch, w, x);
      std::vector<double> z;
      for (const auto& p : polys) {
        EXPECT_EQ(p.degree(), arch.output_degree());
        z.push_back(evaluate<double>(p, x));
      }
      EXPECT_LT(support::max_rel_diff(y, z), 1e-11);
    }
  }
}

TEST(Forward, ToyQuintupleExact) {
  // a=2, b=-3, c=5, d=7
  const auto arch = support::app_c();
  const WeightTuple<Rational> w{{{2, -3}, {5, 7}}};
  const auto coords = sym_coords(symbolic_network(arch, w).front());
  const Rational a = 2, b = -3, c = 5, d = 7;
  const std::vector<Rational> expected{a * a * c, 2 * a * b * c, 0, b * b * c + a * a * d, 2 * a * b * d, b * b * d};
  EXPECT_EQ(coords, expected);
}

TEST(SymbolicCoefficients, ToyInFilterVariables) {
  const auto coef = symbolic_coefficients(support::app_c());
  ASSERT_EQ(coef.size(), 1u);
  auto mono = [](std::vector<int> e, Rational c) {
    HomoPoly<Rational> p(4, 3);
    p.add_term(e, c);
    return p;
  };
  EXPECT_EQ(coef[0][0], mono({2, 0, 1, 0}, 1));
  EXPECT_EQ(coef[0][1], mono({1, 1, 1, 0}, 2));
  EXPECT_TRUE(coef[0][2].is_zero());
  auto mid = mono({0, 2, 1, 0}, 1);
  mid += mono({2, 0, 0, 1}, 1);
  EXPECT_EQ(coef[0][3], mid);
  EXPECT_EQ(coef[0][4], mono({1, 1, 0, 1}, 2));
  EXPECT_EQ(coef[0][5], mono({0, 2, 0, 1}, 1));
}

TEST(Factorization, LambdaTimesSegreVeroneseIsPhi) {
  std::mt19937_64 rng(12);
  for (const auto& arch : support::sample_architectures()) {
    const Eigen::MatrixXd lambda = factorization_matrix(arch);
    const SegreVeroneseBasis sv(arch);
    ASSERT_EQ(static_cast<std::size_t>(lambda.cols()), sv.size());
    for (int trial = 0; trial < 5; ++trial) {
      const auto w = support::normal_weights(arch, rng);
      const auto nu = segre_veronese_embed(arch, w);
      const Eigen::VectorXd m = lambda * Eigen::Map<const Eigen::VectorXd>(nu.data(), static_cast<Eigen::Index>(nu.size()));
      const auto phi = network_coords(arch, symbolic_network(arch, w));
      EXPECT_LT(support::max_rel_diff(phi, std::vector<double>(m.data(), m.data() + m.size())), 1e-11);
    }
  }
}

TEST(Factorization, GuardRefusesHugeMatrices) {
  const auto big = validate_architecture(40, {10, 10, 10}, {1, 1, 1}, 3);
  EXPECT_THROW(factorization_matrix(big), Error);
}

TEST(SegreVeronese, CoordinatesAreProductsOfFactorMonomials) {
  const auto arch = validate_architecture(4, {2, 2, 2}, {1, 1, 1}, 2);
  const WeightTuple<Rational> w{{{2, 3}, {5, -1}, {7, 11}}};
  const SegreVeroneseBasis sv(arch);
  EXPECT_EQ(sv.size(), 5u * 3u * 2u);
  const auto nu = segre_veronese_embed(arch, w);
  for (std::size_t a = 0; a < sv.size(); ++a) {
    const auto mu = sv.unravel(a);
    Rational expected = 1;
    for (int i = 0; i < sv.factors(); ++i) {
      const auto& e = sv.factor(i).exponent(mu[static_cast<std::size_t>(i)]);
      for (std::size_t j = 0; j < e.size(); ++j) {
        for (int p = 0; p < e[j]; ++p) expected *= w[static_cast<std::size_t>(i)][j];
      }
    }
    EXPECT_EQ(nu[a], expected);
  }
}

TEST(VeroneseLift, ActivatedLayerIsPlainConvolution) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 60; ++trial) {
    const int k = 1 + trial % 5;
    const int s = 1 + (trial / 5) % 3;
    const int r = 1 + trial % 4;
    const int d_out = 1 + trial % 4;
    const auto w = support::normals(rng, static_cast<std::size_t>(k));
    const auto x = support::normals(rng, static_cast<std::size_t>(s * (d_out - 1) + k));
    const LiftedLayer layer = veronese_lift(w, s, r);
    EXPECT_EQ(layer.lifted_size, binomial(r + k - 1, r));
    EXPECT_EQ(layer.lifted_stride, s * layer.lifted_size);
    auto act = convolve<double>(w, s, x);
    for (double& v : act) v = std::pow(v, r);
    EXPECT_LT(support::max_rel_diff(act, convolve<double>(layer.lifted_filter, layer.lifted_stride, lift_input(layer, x))), 1e-12);
  }
}

TEST(WeightTuple, FlattenRoundTrip) {
  const auto arch = validate_architecture(7, {3, 2}, {2, 1}, 2);
  const std::vector<double> flat{1, 2, 3, 4, 5};
  const auto w = WeightTuple<double>::unflatten(arch, flat);
  EXPECT_EQ(w.flatten(), flat);
  EXPECT_THROW(WeightTuple<double>::unflatten(arch, std::span<const double>(flat).first(4)), Error);
  EXPECT_THROW(check_weights(arch, WeightTuple<double>{{{1, 2}, {3, 4}}}), Error);
}
