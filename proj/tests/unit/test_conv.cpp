#include <gtest/gtest.h>

#include <random>

#include "neurocnn/conv.hpp"
#include "support.hpp"

using namespace neurocnn;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::ParseError;
}

}  // namespace

TEST(Convolve, SmallHandExample) {
  const std::vector<double> w{1, -1};
  const std::vector<double> x{3, 5, 2, 7, 1};
  EXPECT_EQ(convolve<double>(w, 1, x), (std::vector<double>{-2, 3, -5, 6}));
  EXPECT_EQ(convolve<double>(w, 3, std::span<const double>(x).first(5)), (std::vector<double>{-2, 6}));
}

TEST(Convolve, RejectsBadLength) {
  const std::vector<double> w{1, 2, 3};
  const std::vector<double> x{1, 2, 3, 4};
  EXPECT_EQ(code_of([&] { convolve<double>(w, 2, x); }), ErrorCode::LengthMismatch);
}

TEST(Convolve, ToeplitzMatchesDirectSum) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 1 + trial % 5;
    const int s = 1 + trial % 3;
    const int d_out = 1 + trial % 6;
    const auto w = support::normals(rng, static_cast<std::size_t>(k));
    const auto x = support::normals(rng, static_cast<std::size_t>(s * (d_out - 1) + k));
    const Eigen::MatrixXd T = toeplitz(w, s, d_out);
    std::vector<double> direct(static_cast<std::size_t>(d_out), 0.0);
    for (int i = 0; i < d_out; ++i) {
      for (int j = 0; j < k; ++j) direct[static_cast<std::size_t>(i)] += w[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(s * i + j)];
    }
    const Eigen::VectorXd tx = T * Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    EXPECT_LT(support::max_rel_diff(direct, std::vector<double>(tx.data(), tx.data() + tx.size())), 1e-14);
    EXPECT_LT(support::max_rel_diff(direct, convolve<double>(w, s, x)), 1e-14);
    EXPECT_EQ(toeplitz_rank(w, s, d_out), d_out);
  }
}

TEST(Convolve, ZeroFilterHasNoRank) {
  const std::vector<double> zero(3, 0.0);
  EXPECT_EQ(code_of([&] { toeplitz_rank(zero, 1, 4); }), ErrorCode::ZeroFilter);
}

TEST(ComposeFilters, TwoLayersCollapseToOne) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const int kw = 1 + trial % 4;
    const int kv = 1 + (trial / 4) % 4;
    const int t = 1 + trial % 3;
    const int s = 1 + (trial / 3) % 3;
    const auto w = support::normals(rng, static_cast<std::size_t>(kw));
    const auto v = support::normals(rng, static_cast<std::size_t>(kv));
    const int d2 = 2;
    const int d1 = s * (d2 - 1) + kv;
    const auto x = support::normals(rng, static_cast<std::size_t>(t * (d1 - 1) + kw));
    const auto q = compose_filters<double>(v, t, w);
    EXPECT_LT(support::max_rel_diff(convolve<double>(v, s, convolve<double>(w, t, x)), convolve<double>(q, s * t, x)), 1e-13);
  }
}

TEST(ComposeFilters, MatchesBivariateProduct) {
  const std::vector<Rational> v{1, 2, 3};
  const std::vector<Rational> w{5, -1};
  const int t = 2;
  const auto q = compose_filters<Rational>(v, t, w);
  EXPECT_EQ(filter_to_poly<Rational>(q, 1), poly_mul(filter_to_poly<Rational>(v, t), filter_to_poly<Rational>(w, 1)));
}

TEST(Architecture, WidthRelation) {
  const auto arch = validate_architecture(7, {3, 2}, {2, 1}, 2);
  EXPECT_EQ(arch.d, (std::vector<int>{7, 3, 2}));
  for (int i = 0; i < arch.layers(); ++i) {
    const auto u = static_cast<std::size_t>(i);
    EXPECT_EQ(arch.d[u], arch.s[u] * (arch.d[u + 1] - 1) + arch.k[u]);
  }
  EXPECT_EQ(arch.total_stride(), 2);
  EXPECT_EQ(arch.receptive_field(), 1 + 2 + 1 * 2);
  EXPECT_EQ(arch.input_width(), arch.total_stride() * (arch.output_width() - 1) + arch.receptive_field());
  EXPECT_EQ(arch.filter_degrees(), (std::vector<int>{2, 1}));
  EXPECT_EQ(arch.output_degree(), 2);
}

TEST(Architecture, RejectsInconsistentWidths) {
  EXPECT_EQ(code_of([] { validate_architecture(6, {3, 2}, {2, 1}, 2); }), ErrorCode::NonIntegralWidth);
  EXPECT_EQ(code_of([] { validate_architecture(2, {3}, {1}, 2); }), ErrorCode::NonPositiveWidth);
  EXPECT_EQ(code_of([] { validate_architecture(3, {2, 2}, {1}, 2); }), ErrorCode::ShapeMismatch);
}

TEST(Architecture, ParseFormatRoundTrip) {
  const auto arch = parse_architecture("d0=8;k=2,3;s=2,1;r=3");
  EXPECT_EQ(arch.k, (std::vector<int>{2, 3}));
  EXPECT_EQ(arch.s, (std::vector<int>{2, 1}));
  EXPECT_EQ(arch.r, 3);
  EXPECT_EQ(parse_architecture(format_architecture(arch)), arch);
  EXPECT_EQ(code_of([] { parse_architecture("d0=3;k=2,x;s=1,1;r=2"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { parse_architecture("d0=3;k=2,2;r=2"); }), ErrorCode::ParseError);
}

TEST(ComposeFilters, SmallExamples) {
  const std::vector<double> w{3, -1, 2};
  EXPECT_EQ(compose_filters<double>(std::vector<double>{1}, 2, w), w);
  const std::vector<double> ones{1, 1};
  EXPECT_EQ(compose_filters<double>(ones, 1, ones), (std::vector<double>{1, 2, 1}));
}

TEST(Convolve, ToeplitzRankOfShiftedIdentity) {
  EXPECT_EQ(toeplitz_rank(std::vector<double>{0, 0, 1}, 1, 4), 4);
  std::mt19937_64 rng(3);
  EXPECT_EQ(toeplitz_rank(support::normals(rng, 3), 2, 3), 3);
}
