#pragma once

// Multi-start search for stationary points of the square loss in parameter
// space, deduplication modulo the fiber symmetries, and the comparison of the
// real count with the generic ED degree.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "neurocnn/fibers.hpp"
#include "neurocnn/regression.hpp"
#include "neurocnn/scalar.hpp"

namespace neurocnn {

struct CensusOptions {
  int n_starts = 2000;
  std::uint64_t seed = 0;
  double grad_tol = 1e-10;
  int max_iter = 500;
  double dedup_tol = 1e-6;
  double criticality_tol = 1e-7;
  // Relative size below which a filter entry counts as zero when classifying
  // a numerically found point.
  double zero_tol = 1e-8;
  double degeneracy_threshold = 1e-6;
  unsigned threads = 0;  // 0: hardware concurrency
};

// Runs fn(0), ..., fn(n-1) on up to `threads` workers.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

// The loss as a function of the weights, f(w) = (m - v)^T G_lift (m - v) + c
// with m = Lambda nu(w) in output-major coordinates and G_lift = I_dL (x) G.
class LossLandscape {
 public:
  // Throws SingularGram unless the design has full rank.
  LossLandscape(const Architecture& arch, const DesignSystem& ds);

  const Architecture& arch() const { return arch_; }
  const DesignSystem& design() const { return *ds_; }

  double value(const WeightTuple<double>& w) const;
  Eigen::VectorXd gradient(const WeightTuple<double>& w) const;
  Eigen::MatrixXd hessian(const WeightTuple<double>& w) const;

  // Jacobian of w -> m in output-major coordinates, Lambda * d nu.
  Eigen::MatrixXd tangent(const WeightTuple<double>& w) const;
  Eigen::VectorXd coords(const WeightTuple<double>& w) const;
  // G_lift (m - v).
  Eigen::VectorXd metric_residual(const WeightTuple<double>& w) const;

 private:
  Eigen::VectorXd lifted_metric(const Eigen::VectorXd& m) const;

  Architecture arch_;
  const DesignSystem* ds_;
  Eigen::MatrixXd lambda_;
  Eigen::VectorXd anchor_;  // vec of the anchor, output-major
  Eigen::VectorXd moment_;  // vec of Y X^T, output-major, equals G_lift anchor
  double constant_ = 0.0;
};

struct StationaryPoint {
  std::size_t start = 0;
  WeightTuple<double> w;
  double loss = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct StationarySearch {
  std::vector<StationaryPoint> converged;
  std::vector<StationaryPoint> failed;
};

// Damped Newton on grad = 0 from one start, with a gradient-descent
// fallback; re-canonicalizes after every accepted step.
StationaryPoint refine_stationary(const LossLandscape& f, WeightTuple<double> start, const CensusOptions& opts);

// Start i draws standard-normal filters from a stream seeded by (seed, i).
WeightTuple<double> census_start(const Architecture& arch, std::uint64_t seed, std::size_t index);

StationarySearch find_stationary(const LossLandscape& f, const CensusOptions& opts);

enum class CriticalKind { Minimum, Saddle, Maximum };

const char* to_string(CriticalKind kind);

struct CriticalPoint {
  WeightTuple<double> weights;  // canonical form
  std::vector<double> coords;   // phi_w, output-major
  double loss = 0.0;
  double grad_norm = 0.0;
  std::size_t multiplicity = 0;
  CriticalKind kind = CriticalKind::Minimum;
  int positive = 0;
  int negative = 0;
  int degenerate = 0;  // eigenvalues inside the threshold band
  SingularityKind smoothness = SingularityKind::Smooth;
  double criticality_residual = 0.0;
  bool accepted = false;
};

// Merges points whose phi coordinates differ by less than tol relative to
// their norm. Representatives keep the lowest start index; the result is
// sorted by loss, then coordinates.
std::vector<CriticalPoint> dedup(const std::vector<StationaryPoint>& points, const Architecture& arch, double tol);

struct Inertia {
  int positive = 0;
  int negative = 0;
  int degenerate = 0;
  CriticalKind kind = CriticalKind::Minimum;
};

// Hessian inertia on the orthogonal complement of the scaling directions.
Inertia classify(const LossLandscape& f, const WeightTuple<double>& w, double threshold);

// ||J^T G_lift (m - v)|| / max(1, ||J||_F ||G_lift (m - v)||). Throws
// SingularPointRejected unless w is a smooth parameter.
double verify_criticality_on_manifold(const LossLandscape& f, const WeightTuple<double>& w, double zero_tol = 0.0);

struct CensusReport {
  Architecture arch;
  CensusOptions options;
  BigInt ged;
  std::vector<CriticalPoint> points;
  std::size_t raw_converged = 0;
  std::size_t raw_failed = 0;
  // Failed starts whose phi shrank below 1e-6 of the anchor norm.
  std::size_t failed_near_cone_vertex = 0;
  double mean_iterations = 0.0;
  std::size_t smooth_count = 0;  // accepted points
  std::size_t minima = 0;
  std::size_t saddles = 0;
  std::size_t maxima = 0;
  std::size_t singular = 0;  // points excluded as not smooth
  std::size_t rejected = 0;  // smooth points failing the manifold criticality test
  std::size_t nodal = 0;
  bool bound_ok = false;
  std::vector<std::string> warnings;
};

// Throws RequiresRGreaterOne for r == 1 with L > 1, SingularGram for a
// rank-deficient design.
CensusReport census(const Architecture& arch, const Dataset& data, const CensusOptions& opts);

// True when both reports accept the same set of phi coordinates to tol.
bool same_critical_set(const CensusReport& a, const CensusReport& b, double tol);

}  // namespace neurocnn
