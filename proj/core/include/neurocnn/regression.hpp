#pragma once

// Square loss on a finite dataset, rewritten as a weighted squared distance
// from a least-squares anchor plus a constant, and the linear subspace of
// convolution-structured polynomial maps that contains the neuromanifold.

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "neurocnn/parametrization.hpp"

namespace neurocnn {

struct Dataset {
  std::vector<std::vector<double>> x;
  std::vector<std::vector<double>> y;

  std::size_t size() const { return x.size(); }
};

// Throws ShapeMismatch unless every x has length d0 and every y length dL.
void check_dataset(const Architecture& arch, const Dataset& data);

enum class DatasetMode { Generic, Teacher };

struct DatasetSpec {
  std::size_t n = 0;  // 0 means dim Sym^{r^(L-1)}(d0) + 5
  DatasetMode mode = DatasetMode::Generic;
  double noise = 0.1;
  std::uint64_t seed = 0;
};

// Inputs i.i.d. standard normal. Generic: outputs i.i.d. standard normal.
// Teacher: outputs of a network with standard-normal filters, plus N(0, noise^2).
Dataset generate_dataset(const Architecture& arch, const DatasetSpec& spec);
// Teacher mode with a given teacher.
Dataset generate_dataset(const Architecture& arch, const DatasetSpec& spec, const WeightTuple<double>& teacher);

double loss(const Architecture& arch, const WeightTuple<double>& w, const Dataset& data);

// Columns of X are veronese(x) in the output basis, columns of Y are the
// targets. The anchor is only formed when X has full row rank.
struct DesignSystem {
  Eigen::MatrixXd X;  // N x |D|
  Eigen::MatrixXd Y;  // dL x |D|
  Eigen::MatrixXd G;  // X X^T
  int rank = 0;
  bool full_rank = false;
  std::optional<Eigen::MatrixXd> anchor;  // Y X^T G^{-1}, dL x N

  // Throws SingularGram when the anchor was not formed.
  const Eigen::MatrixXd& v_anchor() const;
};

DesignSystem design_system(const Dataset& data, const Architecture& arch);

// Row o holds the sym_coords of output o of phi_w: dL x N.
Eigen::MatrixXd coefficient_matrix(const Architecture& arch, const WeightTuple<double>& w);

// trace((M - A) G (M - A)^T).
double weighted_distance_sq(const Eigen::MatrixXd& M, const Eigen::MatrixXd& A, const Eigen::MatrixXd& G);

struct LossDecomposition {
  double dist_sq = 0.0;
  double constant = 0.0;
};

// dist_sq to the anchor and trace(Y Y^T) - trace(A G A^T). Throws SingularGram.
LossDecomposition loss_as_distance(const Architecture& arch, const WeightTuple<double>& w, const DesignSystem& ds);

// ||A X - Y||_F^2, the unconstrained least-squares residual.
double least_squares_residual(const DesignSystem& ds);

// Linear maps Sym^{r^(L-1)}(d0) -> R^dL whose row o is row 0 with every
// variable index shifted by o * S, S the total stride, and whose row 0 only
// involves x[0..W-1], W the receptive field. One basis element per monomial
// of degree r^(L-1) in W variables.
struct ConvSubspace {
  int receptive_field = 0;
  int outputs = 0;
  int coords = 0;  // N
  std::vector<Eigen::MatrixXd> basis;

  std::size_t dimension() const { return basis.size(); }
};

ConvSubspace conv_subspace(const Architecture& arch);

// Euclidean distance from M to span(basis), relative to ||M||.
double containment_residual(const ConvSubspace& sub, const Eigen::MatrixXd& M);

// Orthogonal projection of the anchor onto the subspace under
// <M, M'> = trace(M G M'^T). Throws SingularGram, IllConditionedProjection.
inline constexpr double max_projection_condition = 1e12;
Eigen::MatrixXd project_anchor(const DesignSystem& ds, const ConvSubspace& sub);

}  // namespace neurocnn
