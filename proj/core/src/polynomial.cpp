#include "neurocnn/polynomial.hpp"

#include <limits>

namespace neurocnn {

std::int64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    // Exact at every step: result * (n - k + i) is divisible by i.
    result = result * (n - k + i) / i;
  }
  return result;
}

std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t result = 1;
  for (int i = 0; i < exp; ++i) result *= base;
  return result;
}

BigInt big_factorial(int n) {
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

BigInt big_binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  return big_factorial(n) / (big_factorial(k) * big_factorial(n - k));
}

std::int64_t sym_dimension(int nvars, int degree) {
  if (nvars <= 0) return degree == 0 ? 1 : 0;
  return binomial(nvars + degree - 1, degree);
}

std::int64_t multinomial(const Exponent& a) {
  std::int64_t result = 1;
  int running = 0;
  for (int ai : a) {
    running += ai;
    result *= binomial(running, ai);
  }
  return result;
}

namespace {

void enumerate_into(int pos, int remaining, Exponent& current, std::vector<Exponent>& out) {
  if (pos + 1 == static_cast<int>(current.size())) {
    current[static_cast<std::size_t>(pos)] = remaining;
    out.push_back(current);
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    current[static_cast<std::size_t>(pos)] = v;
    enumerate_into(pos + 1, remaining - v, current, out);
  }
}

}  // namespace

std::vector<Exponent> enumerate_exponents(int nvars, int degree) {
  std::vector<Exponent> out;
  if (nvars <= 0) {
    if (degree == 0) out.emplace_back();
    return out;
  }
  Exponent current(static_cast<std::size_t>(nvars), 0);
  enumerate_into(0, degree, current, out);
  return out;
}

MonomialBasis::MonomialBasis(int nvars, int degree)
    : nvars_(nvars), degree_(degree), exponents_(enumerate_exponents(nvars, degree)) {
  for (std::size_t i = 0; i < exponents_.size(); ++i) index_.emplace(exponents_[i], i);
}

std::size_t MonomialBasis::index_of(const Exponent& e) const {
  auto it = index_.find(e);
  if (it == index_.end()) {
    throw Error(ErrorCode::VarMismatch, "exponent is not a monomial of this basis");
  }
  return it->second;
}

}  // namespace neurocnn
