#pragma once

// Strided 1-D "valid" convolution, as a Toeplitz matrix and as bivariate
// polynomial multiplication.
//
//   (w *_s x)[i] = sum_{0 <= j < k} w[j] x[s*i + j],   len(x) = s*(d' - 1) + k.

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "neurocnn/errors.hpp"
#include "neurocnn/polynomial.hpp"

namespace neurocnn {

template <class T>
using Filter = std::vector<T>;

// Layer widths satisfy d[i] = s[i] * (d[i+1] - 1) + k[i].
struct Architecture {
  int r = 1;
  std::vector<int> k;
  std::vector<int> s;
  std::vector<int> d;

  int layers() const { return static_cast<int>(k.size()); }
  int input_width() const { return d.front(); }
  int output_width() const { return d.back(); }
  int total_filter_size() const;
  // Degree r^(L-1) of every output polynomial.
  int output_degree() const;
  // m = (r^(L-1), ..., r, 1): the degree in which filter i enters the output.
  std::vector<int> filter_degrees() const;
  // Product of all strides: the input shift between consecutive outputs.
  int total_stride() const;
  // Number of input variables seen by one output: 1 + sum (k_i-1) prod_{j<i} s_j.
  int receptive_field() const;

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

Architecture validate_architecture(int d0, std::vector<int> k, std::vector<int> s, int r);

// "d0=<int>;k=<int,...>;s=<int,...>;r=<int>", ASCII, no spaces.
Architecture parse_architecture(const std::string& text);
std::string format_architecture(const Architecture& arch);

template <class T>
std::vector<T> convolve(std::span<const T> w, int s, std::span<const T> x) {
  const int k = static_cast<int>(w.size());
  const int d = static_cast<int>(x.size());
  if (k < 1 || s < 1 || d < k || (d - k) % s != 0) {
    throw Error(ErrorCode::LengthMismatch,
                "convolve: input length must be s*(d_out-1)+k for some d_out >= 1");
  }
  const int d_out = (d - k) / s + 1;
  std::vector<T> out(static_cast<std::size_t>(d_out), T(0));
  for (int i = 0; i < d_out; ++i) {
    T acc(0);
    for (int j = 0; j < k; ++j) acc += w[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(s * i + j)];
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

// d_out x (s*(d_out-1)+k) matrix with entry (i, s*i+j) = w[j].
Eigen::MatrixXd toeplitz(std::span<const double> w, int s, int d_out);

// Numeric rank: singular values above 1e-9 * sigma_max. Throws ZeroFilter.
int toeplitz_rank(std::span<const double> w, int s, int d_out);

// pi_s(w) = sum_i w[i] a^{s(k-i-1)} b^{s i}, a bivariate form of degree s(k-1).
template <class T>
HomoPoly<T> filter_to_poly(std::span<const T> w, int s) {
  const int k = static_cast<int>(w.size());
  HomoPoly<T> p(2, s * (k - 1));
  for (int i = 0; i < k; ++i) {
    p.add_term({s * (k - i - 1), s * i}, w[static_cast<std::size_t>(i)]);
  }
  return p;
}

// Filter q of the composite v *_s (w *_t x) = q *_{st} x, where t is the
// stride of the inner convolution. Equivalently pi_1(q) = pi_t(v) pi_1(w).
template <class T>
Filter<T> compose_filters(std::span<const T> v, int t, std::span<const T> w) {
  const int kv = static_cast<int>(v.size());
  const int kw = static_cast<int>(w.size());
  Filter<T> q(static_cast<std::size_t>(t * (kv - 1) + kw), T(0));
  for (int i = 0; i < kv; ++i) {
    for (int j = 0; j < kw; ++j) {
      q[static_cast<std::size_t>(t * i + j)] += v[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)];
    }
  }
  return q;
}

template <class T>
bool is_nonzero_filter(std::span<const T> w) {
  for (const auto& v : w) {
    if (!neurocnn::is_zero(v)) return true;
  }
  return false;
}

}  // namespace neurocnn
