#include "neurocnn/parametrization.hpp"

#include <numeric>

namespace neurocnn {

template <class T>
std::vector<T> forward(const Architecture& arch, const WeightTuple<T>& w, std::span<const T> x) {
  check_weights(arch, w);
  if (static_cast<int>(x.size()) != arch.input_width()) {
    throw Error(ErrorCode::LengthMismatch, "forward: input length differs from d0");
  }
  std::vector<T> h(x.begin(), x.end());
  for (int i = 0; i < arch.layers(); ++i) {
    h = convolve<T>(w[static_cast<std::size_t>(i)], arch.s[static_cast<std::size_t>(i)], h);
    if (i + 1 < arch.layers()) {
      for (auto& v : h) {
        T p(1);
        for (int e = 0; e < arch.r; ++e) p *= v;
        v = p;
      }
    }
  }
  return h;
}

template <class T>
NetworkPolynomials<T> symbolic_network(const Architecture& arch, const WeightTuple<T>& w) {
  check_weights(arch, w);
  const int d0 = arch.input_width();
  std::vector<HomoPoly<T>> h;
  h.reserve(static_cast<std::size_t>(d0));
  for (int j = 0; j < d0; ++j) h.push_back(HomoPoly<T>::variable(d0, j));

  for (int layer = 0; layer < arch.layers(); ++layer) {
    const auto& filter = w[static_cast<std::size_t>(layer)];
    const int s = arch.s[static_cast<std::size_t>(layer)];
    const int d_out = arch.d[static_cast<std::size_t>(layer) + 1];
    const int deg = h.front().degree();
    std::vector<HomoPoly<T>> next;
    next.reserve(static_cast<std::size_t>(d_out));
    for (int o = 0; o < d_out; ++o) {
      HomoPoly<T> acc(d0, deg);
      for (std::size_t j = 0; j < filter.size(); ++j) {
        if (is_zero(filter[j])) continue;
        acc += h[static_cast<std::size_t>(s * o) + j] * filter[j];
      }
      next.push_back(std::move(acc));
    }
    if (layer + 1 < arch.layers()) {
      for (auto& p : next) p = poly_pow(p, arch.r);
    }
    h = std::move(next);
  }
  return h;
}

MonomialBasis output_basis(const Architecture& arch) {
  return MonomialBasis(arch.input_width(), arch.output_degree());
}

template <class T>
std::vector<T> network_coords(const Architecture& arch, const NetworkPolynomials<T>& polys) {
  const MonomialBasis basis = output_basis(arch);
  std::vector<T> out;
  out.reserve(basis.size() * polys.size());
  for (const auto& p : polys) {
    auto c = sym_coords(p, basis);
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

LiftedLayer veronese_lift(std::span<const double> w, int s, int r) {
  if (r < 1) throw Error(ErrorCode::ShapeMismatch, "veronese_lift: r must be >= 1");
  LiftedLayer layer;
  layer.k = static_cast<int>(w.size());
  layer.s = s;
  layer.r = r;
  layer.multi_indices = enumerate_exponents(layer.k, r);
  layer.lifted_size = static_cast<int>(layer.multi_indices.size());
  layer.lifted_stride = s * layer.lifted_size;
  layer.lifted_filter.reserve(layer.multi_indices.size());
  for (const auto& a : layer.multi_indices) {
    double v = static_cast<double>(multinomial(a));
    for (std::size_t j = 0; j < a.size(); ++j) {
      for (int e = 0; e < a[j]; ++e) v *= w[j];
    }
    layer.lifted_filter.push_back(v);
  }
  return layer;
}

std::vector<double> lift_input(const LiftedLayer& layer, std::span<const double> x) {
  const int d = static_cast<int>(x.size());
  if (d < layer.k || (d - layer.k) % layer.s != 0) {
    throw Error(ErrorCode::LengthMismatch, "lift_input: input length must be s*(d_out-1)+k");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>((d - layer.k + 1) * layer.lifted_size));
  for (int i = 0; i + layer.k <= d; ++i) {
    for (const auto& a : layer.multi_indices) {
      double m = 1.0;
      for (std::size_t j = 0; j < a.size(); ++j) {
        for (int e = 0; e < a[j]; ++e) m *= x[static_cast<std::size_t>(i) + j];
      }
      out.push_back(m);
    }
  }
  return out;
}

SegreVeroneseBasis::SegreVeroneseBasis(const Architecture& arch) {
  const auto m = arch.filter_degrees();
  for (int i = 0; i < arch.layers(); ++i) {
    factors_.emplace_back(arch.k[static_cast<std::size_t>(i)], m[static_cast<std::size_t>(i)]);
  }
  strides_.assign(factors_.size(), 1);
  for (int i = static_cast<int>(factors_.size()) - 1; i >= 0; --i) {
    strides_[static_cast<std::size_t>(i)] = size_;
    size_ *= factors_[static_cast<std::size_t>(i)].size();
  }
}

std::vector<std::size_t> SegreVeroneseBasis::unravel(std::size_t flat) const {
  std::vector<std::size_t> idx(factors_.size());
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    idx[i] = flat / strides_[i];
    flat %= strides_[i];
  }
  return idx;
}

template <class T>
std::vector<T> segre_veronese_embed(const Architecture& arch, const WeightTuple<T>& w) {
  check_weights(arch, w);
  const SegreVeroneseBasis basis(arch);
  std::vector<T> out(1, T(1));
  for (int i = 0; i < basis.factors(); ++i) {
    const auto v = veronese<T>(w[static_cast<std::size_t>(i)], basis.factor(i));
    std::vector<T> next;
    next.reserve(out.size() * v.size());
    for (const auto& a : out) {
      for (const auto& b : v) next.push_back(a * b);
    }
    out = std::move(next);
  }
  return out;
}

namespace {

std::vector<int> filter_offsets(const Architecture& arch) {
  std::vector<int> offsets(static_cast<std::size_t>(arch.layers()), 0);
  for (int i = 1; i < arch.layers(); ++i) {
    offsets[static_cast<std::size_t>(i)] = offsets[static_cast<std::size_t>(i) - 1] + arch.k[static_cast<std::size_t>(i) - 1];
  }
  return offsets;
}

// phi with filter entries and inputs both symbolic. Joint variables: all filter
// entries (layer-major) followed by the inputs.
template <class T>
std::vector<HomoPoly<T>> joint_expansion(const Architecture& arch) {
  const int nw = arch.total_filter_size();
  const int d0 = arch.input_width();
  const int nvars = nw + d0;
  const auto offsets = filter_offsets(arch);
  std::vector<HomoPoly<T>> h;
  for (int j = 0; j < d0; ++j) h.push_back(HomoPoly<T>::variable(nvars, nw + j));
  for (int layer = 0; layer < arch.layers(); ++layer) {
    const int s = arch.s[static_cast<std::size_t>(layer)];
    const int k = arch.k[static_cast<std::size_t>(layer)];
    const int d_out = arch.d[static_cast<std::size_t>(layer) + 1];
    std::vector<HomoPoly<T>> next;
    for (int o = 0; o < d_out; ++o) {
      HomoPoly<T> acc(nvars, h.front().degree() + 1);
      for (int j = 0; j < k; ++j) {
        acc += poly_mul(HomoPoly<T>::variable(nvars, offsets[static_cast<std::size_t>(layer)] + j),
                        h[static_cast<std::size_t>(s * o + j)]);
      }
      next.push_back(std::move(acc));
    }
    if (layer + 1 < arch.layers()) {
      for (auto& p : next) p = poly_pow(p, arch.r);
    }
    h = std::move(next);
  }
  return h;
}

}  // namespace

std::vector<std::vector<HomoPoly<Rational>>> symbolic_coefficients(const Architecture& arch) {
  const MonomialBasis xbasis = output_basis(arch);
  const int nw = arch.total_filter_size();
  int wdegree = 0;
  for (int m : arch.filter_degrees()) wdegree += m;
  std::vector<std::vector<HomoPoly<Rational>>> out(
      static_cast<std::size_t>(arch.output_width()),
      std::vector<HomoPoly<Rational>>(xbasis.size(), HomoPoly<Rational>(nw, wdegree)));
  const auto h = joint_expansion<Rational>(arch);
  for (std::size_t o = 0; o < h.size(); ++o) {
    for (const auto& [e, c] : h[o].terms()) {
      const Exponent wpart(e.begin(), e.begin() + nw);
      const Exponent xpart(e.begin() + nw, e.end());
      out[o][xbasis.index_of(xpart)].add_term(wpart, c);
    }
  }
  return out;
}

Eigen::MatrixXd factorization_matrix(const Architecture& arch) {
  // Sized in floating point before any basis is built; the bases alone can be huge.
  auto sym_dim = [](int nvars, int degree) {
    double out = 1.0;
    for (int i = 1; i <= degree; ++i) out = out * (nvars - 1 + i) / i;
    return out;
  };
  const auto filter_degrees = arch.filter_degrees();
  double entries = arch.output_width() * sym_dim(arch.input_width(), arch.output_degree());
  for (int i = 0; i < arch.layers(); ++i) {
    const auto u = static_cast<std::size_t>(i);
    entries *= sym_dim(arch.k[u], filter_degrees[u]);
  }
  if (!(entries <= static_cast<double>(max_factorization_entries))) {
    throw Error(ErrorCode::TooLarge, "factorization matrix would have about " +
                                         std::to_string(static_cast<long double>(entries)) + " entries");
  }
  const SegreVeroneseBasis sv(arch);
  const MonomialBasis xbasis = output_basis(arch);
  const std::size_t rows = xbasis.size() * static_cast<std::size_t>(arch.output_width());
  const int nw = arch.total_filter_size();
  const auto offsets = filter_offsets(arch);
  const auto h = joint_expansion<double>(arch);

  Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(sv.size()));
  const std::size_t n = xbasis.size();
  for (std::size_t o = 0; o < h.size(); ++o) {
    for (const auto& [e, c] : h[o].terms()) {
      std::size_t col = 0;
      for (int i = 0; i < arch.layers(); ++i) {
        const auto begin = e.begin() + offsets[static_cast<std::size_t>(i)];
        const Exponent part(begin, begin + arch.k[static_cast<std::size_t>(i)]);
        col += sv.factor(i).index_of(part) * sv.stride(i);
      }
      const Exponent xpart(e.begin() + nw, e.end());
      const std::size_t row = o * n + xbasis.index_of(xpart);
      lambda(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = c;
    }
  }
  return lambda;
}

template std::vector<double> forward(const Architecture&, const WeightTuple<double>&, std::span<const double>);
template std::vector<Rational> forward(const Architecture&, const WeightTuple<Rational>&, std::span<const Rational>);
template NetworkPolynomials<double> symbolic_network(const Architecture&, const WeightTuple<double>&);
template NetworkPolynomials<Rational> symbolic_network(const Architecture&, const WeightTuple<Rational>&);
template std::vector<double> network_coords(const Architecture&, const NetworkPolynomials<double>&);
template std::vector<Rational> network_coords(const Architecture&, const NetworkPolynomials<Rational>&);
template std::vector<double> segre_veronese_embed(const Architecture&, const WeightTuple<double>&);
template std::vector<Rational> segre_veronese_embed(const Architecture&, const WeightTuple<Rational>&);

}  // namespace neurocnn
