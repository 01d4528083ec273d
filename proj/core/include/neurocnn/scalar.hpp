#pragma once

#include <cmath>
#include <cstdint>
#include <type_traits>

#include <boost/multiprecision/cpp_int.hpp>

namespace neurocnn {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Integer-valued combinatorics on machine words. Callers keep arguments small.
std::int64_t binomial(int n, int k);
std::int64_t ipow(std::int64_t base, int exp);

BigInt big_factorial(int n);
BigInt big_binomial(int n, int k);

template <class T>
bool is_zero(const T& v) {
  return v == T(0);
}

template <class T>
double to_double(const T& v) {
  if constexpr (std::is_floating_point_v<T>) {
    return static_cast<double>(v);
  } else {
    return v.template convert_to<double>();
  }
}

}  // namespace neurocnn
