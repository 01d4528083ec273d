#pragma once

// The polynomial CNN map w -> phi_w, its exact coefficient expansion, the
// per-layer Veronese lift, and the factorization phi = Lambda o nu through the
// Segre-Veronese embedding.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "neurocnn/conv.hpp"
#include "neurocnn/polynomial.hpp"

namespace neurocnn {

template <class T>
struct WeightTuple {
  std::vector<Filter<T>> filters;

  int layers() const { return static_cast<int>(filters.size()); }
  const Filter<T>& operator[](std::size_t i) const { return filters[i]; }
  Filter<T>& operator[](std::size_t i) { return filters[i]; }

  std::size_t total_size() const {
    std::size_t n = 0;
    for (const auto& f : filters) n += f.size();
    return n;
  }

  bool all_nonzero() const {
    for (const auto& f : filters) {
      if (!is_nonzero_filter<T>(f)) return false;
    }
    return true;
  }

  // Filters concatenated in layer order.
  std::vector<T> flatten() const {
    std::vector<T> out;
    out.reserve(total_size());
    for (const auto& f : filters) out.insert(out.end(), f.begin(), f.end());
    return out;
  }

  static WeightTuple unflatten(const Architecture& arch, std::span<const T> flat) {
    if (flat.size() != static_cast<std::size_t>(arch.total_filter_size())) {
      throw Error(ErrorCode::ShapeMismatch, "flat parameter vector has the wrong length");
    }
    WeightTuple w;
    std::size_t pos = 0;
    for (int ki : arch.k) {
      w.filters.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(pos),
                             flat.begin() + static_cast<std::ptrdiff_t>(pos + static_cast<std::size_t>(ki)));
      pos += static_cast<std::size_t>(ki);
    }
    return w;
  }

  template <class U>
  WeightTuple<U> cast() const {
    WeightTuple<U> out;
    for (const auto& f : filters) out.filters.emplace_back(f.begin(), f.end());
    return out;
  }

  friend bool operator==(const WeightTuple&, const WeightTuple&) = default;
};

// Throws ShapeMismatch unless filter lengths match arch.k.
template <class T>
void check_weights(const Architecture& arch, const WeightTuple<T>& w) {
  if (w.layers() != arch.layers()) {
    throw Error(ErrorCode::ShapeMismatch, "weight tuple has the wrong number of layers");
  }
  for (int i = 0; i < arch.layers(); ++i) {
    if (static_cast<int>(w.filters[static_cast<std::size_t>(i)].size()) != arch.k[static_cast<std::size_t>(i)]) {
      throw Error(ErrorCode::ShapeMismatch, "filter " + std::to_string(i) + " has the wrong length");
    }
  }
}

// One homogeneous polynomial of degree r^(L-1) in d0 variables per output.
template <class T>
using NetworkPolynomials = std::vector<HomoPoly<T>>;

// Convolutions alternating with the entrywise r-th power; no activation after
// the last layer.
template <class T>
std::vector<T> forward(const Architecture& arch, const WeightTuple<T>& w, std::span<const T> x);

template <class T>
NetworkPolynomials<T> symbolic_network(const Architecture& arch, const WeightTuple<T>& w);

// Basis of Sym^{r^(L-1)}(d0) shared by every output polynomial.
MonomialBasis output_basis(const Architecture& arch);

// Output-major concatenation of sym_coords: entry o*N + i is the coefficient
// of monomial i in output o.
template <class T>
std::vector<T> network_coords(const Architecture& arch, const NetworkPolynomials<T>& polys);

// sigma_r(w *_s x) = lifted_filter *_{lifted_stride} lift_input(x).
//
// The lifted input has one block of lifted_size entries per input offset
// i in [0, d - k]: entry (i, a) = prod_j x[i + j]^{a_j}. Output position o
// reads block o*s, hence lifted_stride = s * lifted_size. Neighbouring blocks
// repeat monomials; the layout keeps the lifted map a plain convolution.
struct LiftedLayer {
  int k = 0;
  int s = 0;
  int r = 0;
  int lifted_size = 0;    // binomial(r + k - 1, r)
  int lifted_stride = 0;  // s * lifted_size
  std::vector<Exponent> multi_indices;  // |a| = r, graded-lex order
  std::vector<double> lifted_filter;    // multinomial(r; a) * prod_j w[j]^{a_j}
};

LiftedLayer veronese_lift(std::span<const double> w, int s, int r);
std::vector<double> lift_input(const LiftedLayer& layer, std::span<const double> x);

// Tensor product of Sym^{m_i}(k_i) bases, factor 0 varying slowest, with
// m = (r^(L-1), ..., r, 1).
class SegreVeroneseBasis {
 public:
  explicit SegreVeroneseBasis(const Architecture& arch);

  std::size_t size() const { return size_; }
  int factors() const { return static_cast<int>(factors_.size()); }
  const MonomialBasis& factor(int i) const { return factors_[static_cast<std::size_t>(i)]; }
  std::size_t stride(int i) const { return strides_[static_cast<std::size_t>(i)]; }

  // Per-factor monomial indices of a flat coordinate index.
  std::vector<std::size_t> unravel(std::size_t flat) const;

 private:
  std::vector<MonomialBasis> factors_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
};

// Coordinate (mu_0, ..., mu_{L-1}) equals prod_i mu_i(w_i).
template <class T>
std::vector<T> segre_veronese_embed(const Architecture& arch, const WeightTuple<T>& w);

// Coefficient of output o, monomial i of phi_w as a polynomial in the filter
// entries (layer-major variables): result[o][i].
std::vector<std::vector<HomoPoly<Rational>>> symbolic_coefficients(const Architecture& arch);

// Dense Lambda with Lambda * nu(w) = network_coords(phi_w), built by expanding
// phi with filter entries and inputs both symbolic. Throws TooLarge when the
// matrix would exceed max_factorization_entries.
inline constexpr std::size_t max_factorization_entries = 1'000'000;
Eigen::MatrixXd factorization_matrix(const Architecture& arch);

template <class T>
WeightTuple<T> random_like(const Architecture& arch, auto&& draw) {
  WeightTuple<T> w;
  for (int ki : arch.k) {
    Filter<T> f(static_cast<std::size_t>(ki));
    for (auto& v : f) v = draw();
    w.filters.push_back(std::move(f));
  }
  return w;
}

}  // namespace neurocnn
