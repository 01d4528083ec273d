#include "neurocnn/invariants.hpp"

#include <numeric>

namespace neurocnn {

namespace {

void require_nonlinear(int r) {
  if (r <= 1) {
    throw Error(ErrorCode::RequiresRGreaterOne, "dimension and degree formulas assume r > 1");
  }
}

// Odometer over alpha with 0 <= alpha_j <= caps[j]; calls fn(alpha) for every
// vector whose entries sum to total.
template <class Fn>
void for_each_capped(std::span<const int> caps, int total, Fn&& fn) {
  std::vector<int> alpha(caps.size(), 0);
  while (true) {
    if (std::accumulate(alpha.begin(), alpha.end(), 0) == total) fn(alpha);
    std::size_t pos = 0;
    while (pos < alpha.size() && alpha[pos] == caps[pos]) {
      alpha[pos] = 0;
      ++pos;
    }
    if (pos == alpha.size()) return;
    ++alpha[pos];
  }
}

BigInt big_pow(const BigInt& base, int exp) {
  BigInt v = 1;
  for (int i = 0; i < exp; ++i) v *= base;
  return v;
}

BigInt require_integral(const Rational& value, ErrorCode code, const char* what) {
  if (boost::multiprecision::denominator(value) != 1) {
    throw Error(code, std::string(what) + " evaluated to a non-integer");
  }
  return boost::multiprecision::numerator(value);
}

// sum_i (-1)^i (2^{n+1-i} - 1) (n-i)! inner(i), where n = |caps|.
template <class Term>
Rational alternating_sum(std::span<const int> caps, Term&& term) {
  const int n = std::accumulate(caps.begin(), caps.end(), 0);
  Rational total = 0;
  for (int i = 0; i <= n; ++i) {
    Rational inner = 0;
    for_each_capped(caps, i, [&](const std::vector<int>& alpha) { inner += term(alpha); });
    Rational outer = Rational(big_pow(2, n + 1 - i) - 1) * Rational(big_factorial(n - i));
    if (i % 2) outer = -outer;
    total += outer * inner;
  }
  return total;
}

}  // namespace

int neuromanifold_dim(const Architecture& arch) {
  require_nonlinear(arch.r);
  return arch.total_filter_size() - arch.layers() + 1;
}

BigInt neuromanifold_degree(const Architecture& arch) {
  require_nonlinear(arch.r);
  const int L = arch.layers();
  Rational value = Rational(big_factorial(arch.total_filter_size() - L));
  for (int j = 0; j < L; ++j) {
    const int kj = arch.k[static_cast<std::size_t>(j)];
    value *= Rational(big_pow(arch.r, (L - j - 1) * (kj - 1)), big_factorial(kj - 1));
  }
  return require_integral(value, ErrorCode::NonIntegralDegree, "degree");
}

BigInt ged_segre_veronese(std::span<const int> m, std::span<const int> p) {
  if (m.size() != p.size()) throw Error(ErrorCode::ShapeMismatch, "m and p must have equal length");
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (m[j] < 1 || p[j] < 0) throw Error(ErrorCode::ShapeMismatch, "need m_j >= 1 and p_j >= 0");
  }
  const Rational value = alternating_sum(p, [&](const std::vector<int>& alpha) {
    Rational t = 1;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      const int rest = p[j] - alpha[j];
      t *= Rational(big_binomial(p[j] + 1, alpha[j]) * big_pow(m[j], rest), big_factorial(rest));
    }
    return t;
  });
  return require_integral(value, ErrorCode::NonIntegralGED, "Segre-Veronese gED");
}

BigInt ged_filter_formula(std::span<const int> k, int r) {
  const int L = static_cast<int>(k.size());
  std::vector<int> caps(k.size());
  for (std::size_t j = 0; j < k.size(); ++j) {
    if (k[j] < 1) throw Error(ErrorCode::ShapeMismatch, "filter sizes must be >= 1");
    caps[j] = k[j] - 1;
  }
  const Rational value = alternating_sum(caps, [&](const std::vector<int>& alpha) {
    Rational t = 1;
    for (int j = 0; j < L; ++j) {
      const int kj = k[static_cast<std::size_t>(j)];
      const int rest = kj - alpha[static_cast<std::size_t>(j)] - 1;
      t *= Rational(big_binomial(kj, alpha[static_cast<std::size_t>(j)]) * big_pow(r, (L - j - 1) * rest),
                    big_factorial(rest));
    }
    return t;
  });
  return require_integral(value, ErrorCode::NonIntegralGED, "neuromanifold gED");
}

BigInt ged_neuromanifold(std::span<const int> k, int r) {
  const int L = static_cast<int>(k.size());
  std::vector<int> m(k.size());
  std::vector<int> p(k.size());
  for (int j = 0; j < L; ++j) {
    m[static_cast<std::size_t>(j)] = static_cast<int>(ipow(r, L - 1 - j));
    p[static_cast<std::size_t>(j)] = k[static_cast<std::size_t>(j)] - 1;
  }
  const BigInt by_filters = ged_filter_formula(k, r);
  const BigInt by_segre = ged_segre_veronese(m, p);
  if (by_filters != by_segre) {
    throw Error(ErrorCode::FormulaMismatch,
                "filter-size formula gives " + by_filters.str() + ", Segre-Veronese gives " + by_segre.str());
  }
  return by_filters;
}

BigInt ged_neuromanifold(const Architecture& arch) {
  return ged_neuromanifold(arch.k, arch.r);
}

InvariantReport invariant_report(const Architecture& arch) {
  InvariantReport report;
  report.dim = neuromanifold_dim(arch);
  report.degree = neuromanifold_degree(arch);
  report.ged = ged_neuromanifold(arch);
  report.m = arch.filter_degrees();
  for (int kj : arch.k) report.p.push_back(kj - 1);
  return report;
}

Table1 table1() {
  Table1 table;
  for (int r = 1; r <= 6; ++r) {
    for (int k = 2; k <= 6; ++k) {
      const std::array<int, 2> ks{k, k};
      table[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(k - 2)] = ged_neuromanifold(ks, r);
    }
  }
  return table;
}

}  // namespace neurocnn
