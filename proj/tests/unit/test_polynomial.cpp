#include <gtest/gtest.h>

#include <random>

#include "neurocnn/polynomial.hpp"
#include "support.hpp"

using namespace neurocnn;

TEST(MonomialBasis, SizeMatchesStarsAndBars) {
  for (int n = 1; n <= 5; ++n) {
    for (int d = 0; d <= 5; ++d) {
      // Count exponent vectors by brute force over the box [0, d]^n.
      int brute = 0;
      std::vector<int> e(static_cast<std::size_t>(n), 0);
      while (true) {
        int sum = 0;
        for (int v : e) sum += v;
        if (sum == d) ++brute;
        std::size_t i = 0;
        while (i < e.size() && e[i] == d) e[i++] = 0;
        if (i == e.size()) break;
        ++e[i];
      }
      EXPECT_EQ(MonomialBasis(n, d).size(), static_cast<std::size_t>(brute)) << n << " " << d;
      EXPECT_EQ(sym_dimension(n, d), brute);
    }
  }
}

TEST(MonomialBasis, GradedLexOrderAndRoundTrip) {
  const MonomialBasis basis(3, 2);
  const std::vector<Exponent> expected{{2, 0, 0}, {1, 1, 0}, {1, 0, 1}, {0, 2, 0}, {0, 1, 1}, {0, 0, 2}};
  EXPECT_EQ(basis.exponents(), expected);
  for (std::size_t i = 0; i < basis.size(); ++i) EXPECT_EQ(basis.index_of(basis.exponent(i)), i);
  EXPECT_THROW(basis.index_of({1, 1, 1}), Error);
}

TEST(HomoPoly, BinomialSquare) {
  const auto x = HomoPoly<Rational>::variable(2, 0);
  const auto y = HomoPoly<Rational>::variable(2, 1);
  auto sum = x;
  sum += y;
  const auto sq = poly_pow(sum, 2);
  EXPECT_EQ(sym_coords(sq), (std::vector<Rational>{1, 2, 1}));
}

TEST(HomoPoly, CancellationErasesTerms) {
  auto p = HomoPoly<Rational>::variable(2, 0);
  p -= HomoPoly<Rational>::variable(2, 0);
  EXPECT_TRUE(p.is_zero());
}

TEST(HomoPoly, MismatchedVariablesRejected) {
  EXPECT_THROW(poly_mul(HomoPoly<double>::variable(2, 0), HomoPoly<double>::variable(3, 0)), Error);
}

TEST(HomoPoly, PowerMatchesRepeatedMultiplication) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> coef(-3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    HomoPoly<Rational> p(3, 1);
    for (int i = 0; i < 3; ++i) p += HomoPoly<Rational>::variable(3, i, Rational(coef(rng)));
    const int r = 1 + trial % 5;
    auto repeated = HomoPoly<Rational>::constant(3, Rational(1));
    for (int i = 0; i < r; ++i) repeated = poly_mul(repeated, p);
    EXPECT_EQ(poly_pow(p, r), repeated);
  }
}

TEST(HomoPoly, EvaluationIsVeronesePairing) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 4;
    const int d = trial % 5;
    const MonomialBasis basis(n, d);
    const auto coef = support::normals(rng, basis.size());
    const auto p = from_sym_coords<double>(coef, basis);
    const auto x = support::normals(rng, static_cast<std::size_t>(n));
    const auto v = veronese<double>(x, basis);
    double dot = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) dot += coef[i] * v[i];
    EXPECT_NEAR(evaluate<double>(p, x), dot, 1e-12 * std::max(1.0, std::abs(dot)));
  }
}

TEST(Multinomial, SumsToPowerOfVariableCount) {
  for (int n = 1; n <= 4; ++n) {
    for (int r = 0; r <= 5; ++r) {
      std::int64_t total = 0;
      for (const auto& a : enumerate_exponents(n, r)) total += multinomial(a);
      EXPECT_EQ(total, ipow(n, r));
    }
  }
}

TEST(HomoPoly, JsonRoundTrip) {
  std::mt19937_64 rng(8);
  const MonomialBasis basis(3, 3);
  const auto coef = support::normals(rng, basis.size());
  const auto p = from_sym_coords<double>(coef, basis);
  EXPECT_EQ(poly_from_json(to_json(p)), p);
  EXPECT_THROW(poly_from_json("{\"nvars\":2}"), Error);
}

TEST(HomoPoly, RationalJsonUsesFractions) {
  auto p = HomoPoly<Rational>::variable(2, 0, Rational(1, 3));
  EXPECT_NE(to_json(p).find("\"1/3\""), std::string::npos);
}
