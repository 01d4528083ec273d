#pragma once

// Differential of w -> network_coords(phi_w).
//
// Rows are indexed like network_coords (output-major, d_L * N), columns by
// flattened filter entries (|k|).

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "neurocnn/parametrization.hpp"

namespace neurocnn {

// Forward-mode Leibniz recursion through the layers:
//   d(w_l *_s sigma_r(h)) = dw_l *_s sigma_r(h) + w_l *_s (r h^{r-1} . dh).
Eigen::MatrixXd jacobian(const Architecture& arch, const WeightTuple<double>& w);

// Exact product-rule differential of the Segre-Veronese embedding:
// (dim SV) x |k|.
Eigen::MatrixXd segre_veronese_differential(const Architecture& arch, const WeightTuple<double>& w);

// Lambda * d(nu) at w.
Eigen::MatrixXd jacobian_via_factorization(const Architecture& arch, const WeightTuple<double>& w,
                                           const Eigen::MatrixXd& lambda);

// sum_a weights[a] * Hessian(nu_a)(w), a |k| x |k| matrix.
Eigen::MatrixXd segre_veronese_hessian_contraction(const Architecture& arch, const WeightTuple<double>& w,
                                                   std::span<const double> weights);

// The L-1 vectors (w_0, -r w_1, 0, ...), ..., (0, ..., w_{L-2}, -r w_{L-1}),
// flattened, listed from the last layer pair to the first. Throws ZeroFilter.
std::vector<std::vector<double>> claimed_kernel_basis(const Architecture& arch, const WeightTuple<double>& w);

// || J (lambda_0 w_0, ..., lambda_{L-1} w_{L-1}) - (sum_i r^{L-1-i} lambda_i) phi_w ||.
double scaling_identity_check(const Architecture& arch, const WeightTuple<double>& w,
                              std::span<const double> lambda);

struct KernelDimension {
  int dim = 0;
  // Some singular value lies in [1e-9, 1e-5] * sigma_max.
  bool degenerate_spectrum = false;
  Eigen::VectorXd singular_values;
};

// Number of singular values (of the |k| columns) at or below tol * sigma_max.
KernelDimension kernel_dim(const Eigen::MatrixXd& jac, double tol = 1e-7);
KernelDimension kernel_dim(const Architecture& arch, const WeightTuple<double>& w, double tol = 1e-7);

// Orthonormal basis of the numeric null space (same threshold as kernel_dim).
Eigen::MatrixXd numeric_kernel(const Eigen::MatrixXd& jac, double tol = 1e-7);

// Largest principal angle (radians) between the column spans of a and b.
double max_principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace neurocnn
