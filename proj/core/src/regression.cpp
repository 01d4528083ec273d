#include "neurocnn/regression.hpp"

#include <random>

namespace neurocnn {

void check_dataset(const Architecture& arch, const Dataset& data) {
  if (data.x.size() != data.y.size()) {
    throw Error(ErrorCode::ShapeMismatch, "dataset has different numbers of inputs and outputs");
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (static_cast<int>(data.x[i].size()) != arch.input_width() ||
        static_cast<int>(data.y[i].size()) != arch.output_width()) {
      throw Error(ErrorCode::ShapeMismatch, "dataset pair " + std::to_string(i) + " does not match the architecture");
    }
  }
}

namespace {

std::size_t resolved_size(const Architecture& arch, const DatasetSpec& spec) {
  if (spec.n > 0) return spec.n;
  return output_basis(arch).size() + 5;
}

Dataset draw_dataset(const Architecture& arch, const DatasetSpec& spec, const WeightTuple<double>* teacher,
                     std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t n = resolved_size(arch, spec);
  Dataset data;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(static_cast<std::size_t>(arch.input_width()));
    for (double& v : x) v = normal(rng);
    std::vector<double> y;
    if (teacher) {
      y = forward<double>(arch, *teacher, x);
      for (double& v : y) v += spec.noise * normal(rng);
    } else {
      y.resize(static_cast<std::size_t>(arch.output_width()));
      for (double& v : y) v = normal(rng);
    }
    data.x.push_back(std::move(x));
    data.y.push_back(std::move(y));
  }
  return data;
}

}  // namespace

Dataset generate_dataset(const Architecture& arch, const DatasetSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  if (spec.mode == DatasetMode::Generic) return draw_dataset(arch, spec, nullptr, rng);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto teacher = random_like<double>(arch, [&] { return normal(rng); });
  return draw_dataset(arch, spec, &teacher, rng);
}

Dataset generate_dataset(const Architecture& arch, const DatasetSpec& spec, const WeightTuple<double>& teacher) {
  check_weights(arch, teacher);
  std::mt19937_64 rng(spec.seed);
  return draw_dataset(arch, spec, &teacher, rng);
}

double loss(const Architecture& arch, const WeightTuple<double>& w, const Dataset& data) {
  check_weights(arch, w);
  check_dataset(arch, data);
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto out = forward<double>(arch, w, data.x[i]);
    for (std::size_t o = 0; o < out.size(); ++o) {
      const double e = out[o] - data.y[i][o];
      total += e * e;
    }
  }
  return total;
}

const Eigen::MatrixXd& DesignSystem::v_anchor() const {
  if (!anchor) throw Error(ErrorCode::SingularGram, "design matrix does not have full row rank");
  return *anchor;
}

DesignSystem design_system(const Dataset& data, const Architecture& arch) {
  check_dataset(arch, data);
  if (data.size() == 0) throw Error(ErrorCode::ShapeMismatch, "dataset is empty");
  const MonomialBasis basis = output_basis(arch);
  const auto n = static_cast<Eigen::Index>(basis.size());
  const auto m = static_cast<Eigen::Index>(data.size());
  DesignSystem ds;
  ds.X.resize(n, m);
  ds.Y.resize(arch.output_width(), m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto col = veronese<double>(data.x[static_cast<std::size_t>(j)], basis);
    for (Eigen::Index i = 0; i < n; ++i) ds.X(i, j) = col[static_cast<std::size_t>(i)];
    for (Eigen::Index o = 0; o < ds.Y.rows(); ++o) ds.Y(o, j) = data.y[static_cast<std::size_t>(j)][static_cast<std::size_t>(o)];
  }
  ds.G = ds.X * ds.X.transpose();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(ds.X);
  ds.rank = static_cast<int>(qr.rank());
  ds.full_rank = ds.rank == n;
  if (ds.full_rank) {
    Eigen::LLT<Eigen::MatrixXd> llt(ds.G);
    if (llt.info() == Eigen::Success) {
      ds.anchor = llt.solve(ds.X * ds.Y.transpose()).transpose();
    } else {
      ds.full_rank = false;
    }
  }
  return ds;
}

Eigen::MatrixXd coefficient_matrix(const Architecture& arch, const WeightTuple<double>& w) {
  const auto coords = network_coords(arch, symbolic_network(arch, w));
  const auto n = static_cast<Eigen::Index>(coords.size()) / arch.output_width();
  Eigen::MatrixXd M(arch.output_width(), n);
  for (Eigen::Index o = 0; o < M.rows(); ++o) {
    for (Eigen::Index i = 0; i < n; ++i) M(o, i) = coords[static_cast<std::size_t>(o * n + i)];
  }
  return M;
}

double weighted_distance_sq(const Eigen::MatrixXd& M, const Eigen::MatrixXd& A, const Eigen::MatrixXd& G) {
  const Eigen::MatrixXd diff = M - A;
  return (diff * G * diff.transpose()).trace();
}

LossDecomposition loss_as_distance(const Architecture& arch, const WeightTuple<double>& w, const DesignSystem& ds) {
  const Eigen::MatrixXd& anchor = ds.v_anchor();
  LossDecomposition out;
  out.dist_sq = weighted_distance_sq(coefficient_matrix(arch, w), anchor, ds.G);
  out.constant = (ds.Y * ds.Y.transpose()).trace() - (anchor * ds.G * anchor.transpose()).trace();
  return out;
}

double least_squares_residual(const DesignSystem& ds) {
  return (ds.v_anchor() * ds.X - ds.Y).squaredNorm();
}

ConvSubspace conv_subspace(const Architecture& arch) {
  ConvSubspace sub;
  sub.receptive_field = arch.receptive_field();
  sub.outputs = arch.output_width();
  const MonomialBasis out_basis = output_basis(arch);
  sub.coords = static_cast<int>(out_basis.size());
  const int shift = arch.total_stride();
  const int d0 = arch.input_width();
  for (const auto& e : enumerate_exponents(sub.receptive_field, out_basis.degree())) {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(sub.outputs, sub.coords);
    for (int o = 0; o < sub.outputs; ++o) {
      Exponent shifted(static_cast<std::size_t>(d0), 0);
      for (std::size_t j = 0; j < e.size(); ++j) shifted[j + static_cast<std::size_t>(o * shift)] = e[j];
      B(o, static_cast<Eigen::Index>(out_basis.index_of(shifted))) = 1.0;
    }
    sub.basis.push_back(std::move(B));
  }
  return sub;
}

double containment_residual(const ConvSubspace& sub, const Eigen::MatrixXd& M) {
  const auto dim = static_cast<Eigen::Index>(sub.dimension());
  Eigen::MatrixXd A(M.size(), dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    A.col(a) = sub.basis[static_cast<std::size_t>(a)].reshaped();
  }
  const Eigen::VectorXd target = M.reshaped();
  const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(target);
  const double norm = target.norm();
  return (A * coef - target).norm() / (norm > 0 ? norm : 1.0);
}

Eigen::MatrixXd project_anchor(const DesignSystem& ds, const ConvSubspace& sub) {
  const Eigen::MatrixXd& anchor = ds.v_anchor();
  const auto dim = static_cast<Eigen::Index>(sub.dimension());
  Eigen::MatrixXd H(dim, dim);
  Eigen::VectorXd rhs(dim);
  std::vector<Eigen::MatrixXd> weighted;
  for (const auto& B : sub.basis) weighted.push_back(B * ds.G);
  for (Eigen::Index a = 0; a < dim; ++a) {
    const auto& BaG = weighted[static_cast<std::size_t>(a)];
    rhs(a) = (BaG * anchor.transpose()).trace();
    for (Eigen::Index b = 0; b < dim; ++b) {
      H(a, b) = (BaG * sub.basis[static_cast<std::size_t>(b)].transpose()).trace();
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (lo <= 0 || hi / lo > max_projection_condition) {
    throw Error(ErrorCode::IllConditionedProjection, "metric Gram of the subspace basis is ill-conditioned");
  }
  const Eigen::VectorXd coef = H.llt().solve(rhs);
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(anchor.rows(), anchor.cols());
  for (Eigen::Index a = 0; a < dim; ++a) u += coef(a) * sub.basis[static_cast<std::size_t>(a)];
  return u;
}

}  // namespace neurocnn
