#include "neurocnn/jacobian.hpp"

#include <algorithm>
#include <cmath>

namespace neurocnn {

namespace {

using PolyVec = std::vector<HomoPoly<double>>;

PolyVec zero_polys(int nvars, int degree, std::size_t count) {
  return PolyVec(count, HomoPoly<double>(nvars, degree));
}

double monomial_value(const Exponent& e, std::span<const double> w) {
  double v = 1.0;
  for (std::size_t j = 0; j < e.size(); ++j) {
    for (int k = 0; k < e[j]; ++k) v *= w[j];
  }
  return v;
}

// d/dw[j] of w^e.
double monomial_derivative(const Exponent& e, std::span<const double> w, std::size_t j) {
  if (e[j] == 0) return 0.0;
  Exponent f = e;
  f[j] -= 1;
  return e[j] * monomial_value(f, w);
}

// d^2/dw[j]dw[l] of w^e.
double monomial_second_derivative(const Exponent& e, std::span<const double> w, std::size_t j,
                                  std::size_t l) {
  Exponent f = e;
  double c = f[j];
  if (f[j] == 0) return 0.0;
  f[j] -= 1;
  c *= f[l];
  if (f[l] == 0) return 0.0;
  f[l] -= 1;
  return c * monomial_value(f, w);
}

struct FactorTables {
  std::vector<double> value;                            // [mu]
  std::vector<std::vector<double>> first;               // [mu][j]
  std::vector<std::vector<std::vector<double>>> second; // [mu][j][l]
};

std::vector<FactorTables> factor_tables(const SegreVeroneseBasis& sv, const WeightTuple<double>& w,
                                        bool with_second) {
  std::vector<FactorTables> tables(static_cast<std::size_t>(sv.factors()));
  for (int i = 0; i < sv.factors(); ++i) {
    const auto& basis = sv.factor(i);
    const auto& f = w[static_cast<std::size_t>(i)];
    auto& t = tables[static_cast<std::size_t>(i)];
    const std::size_t k = f.size();
    for (const auto& e : basis.exponents()) {
      t.value.push_back(monomial_value(e, f));
      std::vector<double> d1(k);
      for (std::size_t j = 0; j < k; ++j) d1[j] = monomial_derivative(e, f, j);
      t.first.push_back(std::move(d1));
      if (with_second) {
        std::vector<std::vector<double>> d2(k, std::vector<double>(k));
        for (std::size_t j = 0; j < k; ++j) {
          for (std::size_t l = 0; l < k; ++l) d2[j][l] = monomial_second_derivative(e, f, j, l);
        }
        t.second.push_back(std::move(d2));
      }
    }
  }
  return tables;
}

std::vector<std::size_t> filter_offsets(const Architecture& arch) {
  std::vector<std::size_t> off(static_cast<std::size_t>(arch.layers()), 0);
  for (std::size_t i = 1; i < off.size(); ++i) off[i] = off[i - 1] + static_cast<std::size_t>(arch.k[i - 1]);
  return off;
}

}  // namespace

Eigen::MatrixXd jacobian(const Architecture& arch, const WeightTuple<double>& w) {
  check_weights(arch, w);
  const int d0 = arch.input_width();
  const std::size_t nparams = static_cast<std::size_t>(arch.total_filter_size());
  const auto offsets = filter_offsets(arch);

  PolyVec cur;
  for (int j = 0; j < d0; ++j) cur.push_back(HomoPoly<double>::variable(d0, j));
  std::vector<PolyVec> dcur(nparams, zero_polys(d0, 1, static_cast<std::size_t>(d0)));

  for (int layer = 0; layer < arch.layers(); ++layer) {
    const auto& f = w[static_cast<std::size_t>(layer)];
    const int s = arch.s[static_cast<std::size_t>(layer)];
    const std::size_t d_out = static_cast<std::size_t>(arch.d[static_cast<std::size_t>(layer) + 1]);
    const int deg = cur.front().degree();

    PolyVec out = zero_polys(d0, deg, d_out);
    std::vector<PolyVec> dout(nparams, zero_polys(d0, deg, d_out));
    for (std::size_t o = 0; o < d_out; ++o) {
      for (std::size_t j = 0; j < f.size(); ++j) {
        const std::size_t src = static_cast<std::size_t>(s) * o + j;
        if (f[j] != 0.0) {
          out[o] += cur[src] * f[j];
          // Parameters of earlier layers reach this output through cur.
          for (std::size_t p = 0; p < offsets[static_cast<std::size_t>(layer)]; ++p) {
            if (!dcur[p][src].is_zero()) dout[p][o] += dcur[p][src] * f[j];
          }
        }
        dout[offsets[static_cast<std::size_t>(layer)] + j][o] += cur[src];
      }
    }

    if (layer + 1 < arch.layers()) {
      const int r = arch.r;
      PolyVec activated;
      std::vector<PolyVec> dactivated(nparams, zero_polys(d0, deg * r, d_out));
      for (std::size_t o = 0; o < d_out; ++o) {
        const HomoPoly<double> lower = poly_pow(out[o], r - 1);
        activated.push_back(poly_mul(lower, out[o]));
        for (std::size_t p = 0; p < nparams; ++p) {
          if (dout[p][o].is_zero()) continue;
          dactivated[p][o] = poly_mul(lower, dout[p][o]) * static_cast<double>(r);
        }
      }
      cur = std::move(activated);
      dcur = std::move(dactivated);
    } else {
      cur = std::move(out);
      dcur = std::move(dout);
    }
  }

  const MonomialBasis basis = output_basis(arch);
  const std::size_t n = basis.size();
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n * cur.size()),
                                              static_cast<Eigen::Index>(nparams));
  for (std::size_t p = 0; p < nparams; ++p) {
    for (std::size_t o = 0; o < cur.size(); ++o) {
      for (const auto& [e, c] : dcur[p][o].terms()) {
        jac(static_cast<Eigen::Index>(o * n + basis.index_of(e)), static_cast<Eigen::Index>(p)) = c;
      }
    }
  }
  return jac;
}

Eigen::MatrixXd segre_veronese_differential(const Architecture& arch, const WeightTuple<double>& w) {
  check_weights(arch, w);
  const SegreVeroneseBasis sv(arch);
  const auto tables = factor_tables(sv, w, false);
  const auto offsets = filter_offsets(arch);
  const int layers = arch.layers();
  Eigen::MatrixXd dnu = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(sv.size()), arch.total_filter_size());
  for (std::size_t a = 0; a < sv.size(); ++a) {
    const auto mu = sv.unravel(a);
    for (int i = 0; i < layers; ++i) {
      double rest = 1.0;
      for (int l = 0; l < layers; ++l) {
        if (l != i) rest *= tables[static_cast<std::size_t>(l)].value[mu[static_cast<std::size_t>(l)]];
      }
      const auto& first = tables[static_cast<std::size_t>(i)].first[mu[static_cast<std::size_t>(i)]];
      for (std::size_t j = 0; j < first.size(); ++j) {
        dnu(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(offsets[static_cast<std::size_t>(i)] + j)) = first[j] * rest;
      }
    }
  }
  return dnu;
}

Eigen::MatrixXd jacobian_via_factorization(const Architecture& arch, const WeightTuple<double>& w,
                                           const Eigen::MatrixXd& lambda) {
  return lambda * segre_veronese_differential(arch, w);
}

Eigen::MatrixXd segre_veronese_hessian_contraction(const Architecture& arch, const WeightTuple<double>& w,
                                                   std::span<const double> weights) {
  check_weights(arch, w);
  const SegreVeroneseBasis sv(arch);
  if (weights.size() != sv.size()) {
    throw Error(ErrorCode::LengthMismatch, "hessian contraction: weight vector has the wrong length");
  }
  const auto tables = factor_tables(sv, w, true);
  const auto offsets = filter_offsets(arch);
  const int layers = arch.layers();
  const Eigen::Index np = arch.total_filter_size();
  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(np, np);

  for (std::size_t a = 0; a < sv.size(); ++a) {
    const double c = weights[a];
    if (c == 0.0) continue;
    const auto mu = sv.unravel(a);
    auto value = [&](int l) { return tables[static_cast<std::size_t>(l)].value[mu[static_cast<std::size_t>(l)]]; };
    for (int i = 0; i < layers; ++i) {
      const auto& ti = tables[static_cast<std::size_t>(i)];
      const std::size_t mi = mu[static_cast<std::size_t>(i)];
      const std::size_t ki = ti.first[mi].size();
      // Same factor.
      double rest = c;
      for (int l = 0; l < layers; ++l) {
        if (l != i) rest *= value(l);
      }
      for (std::size_t j = 0; j < ki; ++j) {
        for (std::size_t jj = 0; jj < ki; ++jj) {
          hess(static_cast<Eigen::Index>(offsets[static_cast<std::size_t>(i)] + j),
               static_cast<Eigen::Index>(offsets[static_cast<std::size_t>(i)] + jj)) += rest * ti.second[mi][j][jj];
        }
      }
      // Distinct factors i < l; filled symmetrically.
      for (int l = i + 1; l < layers; ++l) {
        const auto& tl = tables[static_cast<std::size_t>(l)];
        const std::size_t ml = mu[static_cast<std::size_t>(l)];
        double rest2 = c;
        for (int q = 0; q < layers; ++q) {
          if (q != i && q != l) rest2 *= value(q);
        }
        for (std::size_t j = 0; j < ki; ++j) {
          for (std::size_t jj = 0; jj < tl.first[ml].size(); ++jj) {
            const double v = rest2 * ti.first[mi][j] * tl.first[ml][jj];
            const auto p = static_cast<Eigen::Index>(offsets[static_cast<std::size_t>(i)] + j);
            const auto q = static_cast<Eigen::Index>(offsets[static_cast<std::size_t>(l)] + jj);
            hess(p, q) += v;
            hess(q, p) += v;
          }
        }
      }
    }
  }
  return hess;
}

std::vector<std::vector<double>> claimed_kernel_basis(const Architecture& arch, const WeightTuple<double>& w) {
  check_weights(arch, w);
  if (!w.all_nonzero()) throw Error(ErrorCode::ZeroFilter, "claimed_kernel_basis needs nonzero filters");
  const auto offsets = filter_offsets(arch);
  std::vector<std::vector<double>> basis;
  for (int t = arch.layers() - 2; t >= 0; --t) {
    std::vector<double> v(static_cast<std::size_t>(arch.total_filter_size()), 0.0);
    const auto& lo = w[static_cast<std::size_t>(t)];
    const auto& hi = w[static_cast<std::size_t>(t) + 1];
    for (std::size_t j = 0; j < lo.size(); ++j) v[offsets[static_cast<std::size_t>(t)] + j] = lo[j];
    for (std::size_t j = 0; j < hi.size(); ++j) {
      v[offsets[static_cast<std::size_t>(t) + 1] + j] = -static_cast<double>(arch.r) * hi[j];
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

double scaling_identity_check(const Architecture& arch, const WeightTuple<double>& w,
                              std::span<const double> lambda) {
  check_weights(arch, w);
  if (static_cast<int>(lambda.size()) != arch.layers()) {
    throw Error(ErrorCode::LengthMismatch, "scaling_identity_check: need one lambda per layer");
  }
  WeightTuple<double> tangent = w;
  double factor = 0.0;
  for (int i = 0; i < arch.layers(); ++i) {
    for (auto& v : tangent[static_cast<std::size_t>(i)]) v *= lambda[static_cast<std::size_t>(i)];
    factor += static_cast<double>(ipow(arch.r, arch.layers() - 1 - i)) * lambda[static_cast<std::size_t>(i)];
  }
  const Eigen::MatrixXd jac = jacobian(arch, w);
  const auto flat = tangent.flatten();
  const Eigen::VectorXd image = jac * Eigen::Map<const Eigen::VectorXd>(flat.data(), static_cast<Eigen::Index>(flat.size()));
  const auto phi = network_coords(arch, symbolic_network(arch, w));
  const Eigen::VectorXd target = factor * Eigen::Map<const Eigen::VectorXd>(phi.data(), static_cast<Eigen::Index>(phi.size()));
  return (image - target).norm();
}

KernelDimension kernel_dim(const Eigen::MatrixXd& jac, double tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
  KernelDimension out;
  out.singular_values = svd.singularValues();
  const double smax = out.singular_values.size() ? out.singular_values(0) : 0.0;
  int above = 0;
  for (Eigen::Index i = 0; i < out.singular_values.size(); ++i) {
    const double sv = out.singular_values(i);
    if (sv > tol * smax) ++above;
    if (sv >= 1e-9 * smax && sv <= 1e-5 * smax) out.degenerate_spectrum = true;
  }
  out.dim = static_cast<int>(jac.cols()) - above;
  return out;
}

KernelDimension kernel_dim(const Architecture& arch, const WeightTuple<double>& w, double tol) {
  return kernel_dim(jacobian(arch, w), tol);
}

Eigen::MatrixXd numeric_kernel(const Eigen::MatrixXd& jac, double tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  Eigen::Index above = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol * smax) ++above;
  }
  return svd.matrixV().rightCols(jac.cols() - above);
}

double max_principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.cols() != b.cols()) return M_PI / 2;
  if (a.cols() == 0) return 0.0;
  const Eigen::MatrixXd qa = Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ() *
                             Eigen::MatrixXd::Identity(a.rows(), a.cols());
  const Eigen::MatrixXd qb = Eigen::HouseholderQR<Eigen::MatrixXd>(b).householderQ() *
                             Eigen::MatrixXd::Identity(b.rows(), b.cols());
  // sin of the largest angle is the norm of the part of span(b) outside span(a).
  const Eigen::MatrixXd residual = qb - qa * (qa.transpose() * qb);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(residual);
  return std::asin(std::min(1.0, svd.singularValues()(0)));
}

}  // namespace neurocnn
