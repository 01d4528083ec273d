#include <gtest/gtest.h>

#include <random>

#include "neurocnn/jacobian.hpp"
#include "support.hpp"

using namespace neurocnn;

namespace {

// Central differences of network_coords, one column per flattened entry.
Eigen::MatrixXd fd_jacobian(const Architecture& arch, const WeightTuple<double>& w, double h = 1e-6) {
  const auto flat = w.flatten();
  auto phi = [&](const std::vector<double>& v) {
    return network_coords(arch, symbolic_network(arch, WeightTuple<double>::unflatten(arch, v)));
  };
  const auto base = phi(flat);
  Eigen::MatrixXd J(static_cast<Eigen::Index>(base.size()), static_cast<Eigen::Index>(flat.size()));
  for (std::size_t j = 0; j < flat.size(); ++j) {
    auto up = flat;
    auto down = flat;
    up[j] += h;
    down[j] -= h;
    const auto a = phi(up);
    const auto b = phi(down);
    for (std::size_t i = 0; i < a.size(); ++i) J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (a[i] - b[i]) / (2 * h);
  }
  return J;
}

double rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).norm() / std::max(1.0, a.norm()); }

}  // namespace

TEST(Jacobian, MatchesFiniteDifferences) {
  std::mt19937_64 rng(21);
  for (const auto& arch : support::sample_architectures()) {
    const auto w = support::normal_weights(arch, rng);
    EXPECT_LT(rel(jacobian(arch, w), fd_jacobian(arch, w)), 1e-7);
  }
}

TEST(Jacobian, TwoRoutesAgree) {
  std::mt19937_64 rng(22);
  for (const auto& arch : support::sample_architectures()) {
    const Eigen::MatrixXd lambda = factorization_matrix(arch);
    for (int trial = 0; trial < 4; ++trial) {
      const auto w = support::normal_weights(arch, rng);
      EXPECT_LT(rel(jacobian(arch, w), jacobian_via_factorization(arch, w, lambda)), 1e-12);
    }
  }
}

TEST(Jacobian, KernelDimensionIsLayersMinusOne) {
  std::mt19937_64 rng(23);
  for (const auto& arch : support::sample_architectures()) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto w = support::normal_weights(arch, rng);
      const auto kd = kernel_dim(arch, w);
      EXPECT_EQ(kd.dim, arch.layers() - 1);
    }
  }
}

TEST(Jacobian, ClaimedBasisSpansKernel) {
  std::mt19937_64 rng(24);
  for (const auto& arch : support::sample_architectures()) {
    const auto w = support::normal_weights(arch, rng);
    const Eigen::MatrixXd J = jacobian(arch, w);
    const auto basis = claimed_kernel_basis(arch, w);
    ASSERT_EQ(static_cast<int>(basis.size()), arch.layers() - 1);
    Eigen::MatrixXd B(J.cols(), static_cast<Eigen::Index>(basis.size()));
    for (std::size_t c = 0; c < basis.size(); ++c) {
      const Eigen::Map<const Eigen::VectorXd> v(basis[c].data(), static_cast<Eigen::Index>(basis[c].size()));
      B.col(static_cast<Eigen::Index>(c)) = v;
      EXPECT_LT((J * v).norm() / (J.norm() * v.norm()), 1e-12);
    }
    if (!basis.empty()) EXPECT_LT(max_principal_angle(B, numeric_kernel(J)), 1e-6);
  }
}

TEST(Jacobian, ScalingIdentity) {
  std::mt19937_64 rng(25);
  for (const auto& arch : support::sample_architectures()) {
    const auto w = support::normal_weights(arch, rng);
    const auto lambda = support::normals(rng, static_cast<std::size_t>(arch.layers()));
    const auto phi = network_coords(arch, symbolic_network(arch, w));
    double scale = 1.0;
    for (double v : phi) scale = std::max(scale, std::abs(v));
    EXPECT_LT(scaling_identity_check(arch, w, lambda) / scale, 1e-11);
  }
}

TEST(Jacobian, ZeroFilterHasNoClaimedBasis) {
  const auto arch = support::app_c();
  const WeightTuple<double> w{{{0, 0}, {1, 2}}};
  EXPECT_THROW(claimed_kernel_basis(arch, w), Error);
}

TEST(Jacobian, ShiftedPreimagesGiveTwoBranches) {
  // a = d = 0 and its shift by (1, -1) reach the same point along two
  // immersed sheets with different tangent spaces.
  const auto arch = support::app_c();
  const WeightTuple<double> w{{{0, 1.5}, {-0.7, 0}}};
  const WeightTuple<double> v{{{1.5, 0}, {0, -0.7}}};
  EXPECT_EQ(kernel_dim(arch, w).dim, arch.layers() - 1);
  EXPECT_EQ(kernel_dim(arch, v).dim, arch.layers() - 1);
  const Eigen::MatrixXd jw = jacobian(arch, w);
  const Eigen::MatrixXd jv = jacobian(arch, v);
  const Eigen::JacobiSVD<Eigen::MatrixXd> sw(jw, Eigen::ComputeThinU), sv(jv, Eigen::ComputeThinU);
  const Eigen::MatrixXd tw = sw.matrixU().leftCols(3), tv = sv.matrixU().leftCols(3);
  EXPECT_GT(max_principal_angle(tw, tv), 1e-3);
}

TEST(Jacobian, HessianContractionMatchesFiniteDifferences) {
  std::mt19937_64 rng(26);
  for (const auto& arch : support::sample_architectures()) {
    const SegreVeroneseBasis sv(arch);
    const auto weights = support::normals(rng, sv.size());
    const auto w = support::normal_weights(arch, rng);
    const Eigen::MatrixXd H = segre_veronese_hessian_contraction(arch, w, weights);
    const Eigen::Map<const Eigen::VectorXd> c(weights.data(), static_cast<Eigen::Index>(weights.size()));
    // Differentiate the gradient c^T d nu by central differences.
    const auto flat = w.flatten();
    const double h = 1e-6;
    Eigen::MatrixXd fd(H.rows(), H.cols());
    for (std::size_t j = 0; j < flat.size(); ++j) {
      auto up = flat;
      auto down = flat;
      up[j] += h;
      down[j] -= h;
      const Eigen::VectorXd gu = segre_veronese_differential(arch, WeightTuple<double>::unflatten(arch, up)).transpose() * c;
      const Eigen::VectorXd gd = segre_veronese_differential(arch, WeightTuple<double>::unflatten(arch, down)).transpose() * c;
      fd.col(static_cast<Eigen::Index>(j)) = (gu - gd) / (2 * h);
    }
    EXPECT_LT(rel(H, fd), 1e-6);
    EXPECT_LT((H - H.transpose()).norm(), 1e-12 * std::max(1.0, H.norm()));
  }
}

TEST(Jacobian, PrincipalAngleOfOrthogonalLines) {
  Eigen::MatrixXd a(2, 1), b(2, 1);
  a << 1, 0;
  b << 0, 3;
  EXPECT_NEAR(max_principal_angle(a, b), std::acos(0.0), 1e-12);
  EXPECT_NEAR(max_principal_angle(a, 2 * a), 0.0, 1e-12);
}
