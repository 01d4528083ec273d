#include "neurocnn/census.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "neurocnn/invariants.hpp"
#include "neurocnn/jacobian.hpp"

namespace neurocnn {

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      while (!failed) {
        const std::size_t i = next++;
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

Eigen::VectorXd as_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::VectorXd vec_rows(const Eigen::MatrixXd& M) {
  Eigen::VectorXd out(M.size());
  for (Eigen::Index o = 0; o < M.rows(); ++o) out.segment(o * M.cols(), M.cols()) = M.row(o).transpose();
  return out;
}

WeightTuple<double> canonical_if_possible(const Architecture& arch, const WeightTuple<double>& w) {
  if (!w.all_nonzero()) return w;
  return canonical_form(arch, w).weights;
}

}  // namespace

LossLandscape::LossLandscape(const Architecture& arch, const DesignSystem& ds)
    : arch_(arch), ds_(&ds), lambda_(factorization_matrix(arch)) {
  const Eigen::MatrixXd& anchor = ds.v_anchor();
  anchor_ = vec_rows(anchor);
  moment_ = vec_rows(ds.Y * ds.X.transpose());
  constant_ = (ds.Y * ds.Y.transpose()).trace() - (anchor * ds.G * anchor.transpose()).trace();
}

Eigen::VectorXd LossLandscape::lifted_metric(const Eigen::VectorXd& m) const {
  const Eigen::Index n = ds_->G.rows();
  Eigen::VectorXd out(m.size());
  for (Eigen::Index o = 0; o * n < m.size(); ++o) out.segment(o * n, n) = ds_->G * m.segment(o * n, n);
  return out;
}

Eigen::VectorXd LossLandscape::coords(const WeightTuple<double>& w) const {
  return lambda_ * as_vector(segre_veronese_embed(arch_, w));
}

Eigen::MatrixXd LossLandscape::tangent(const WeightTuple<double>& w) const {
  return jacobian_via_factorization(arch_, w, lambda_);
}

Eigen::VectorXd LossLandscape::metric_residual(const WeightTuple<double>& w) const {
  return lifted_metric(coords(w) - anchor_);
}

double LossLandscape::value(const WeightTuple<double>& w) const {
  const Eigen::VectorXd diff = coords(w) - anchor_;
  return diff.dot(lifted_metric(diff)) + constant_;
}

// G_lift m - vec(Y X^T) equals G_lift (m - v) without the roundoff of G^{-1}.
Eigen::VectorXd LossLandscape::gradient(const WeightTuple<double>& w) const {
  const Eigen::VectorXd r = lifted_metric(coords(w)) - moment_;
  return 2.0 * tangent(w).transpose() * r;
}

Eigen::MatrixXd LossLandscape::hessian(const WeightTuple<double>& w) const {
  const Eigen::MatrixXd J = tangent(w);
  const Eigen::VectorXd r = lifted_metric(coords(w)) - moment_;
  Eigen::MatrixXd GJ(J.rows(), J.cols());
  for (Eigen::Index c = 0; c < J.cols(); ++c) GJ.col(c) = lifted_metric(J.col(c));
  const Eigen::VectorXd contraction = 2.0 * lambda_.transpose() * r;
  const std::vector<double> weights(contraction.data(), contraction.data() + contraction.size());
  Eigen::MatrixXd H = 2.0 * J.transpose() * GJ + segre_veronese_hessian_contraction(arch_, w, weights);
  return 0.5 * (H + H.transpose());
}

StationaryPoint refine_stationary(const LossLandscape& f, WeightTuple<double> start, const CensusOptions& opts) {
  const Architecture& arch = f.arch();
  StationaryPoint pt;
  WeightTuple<double> w = canonical_if_possible(arch, start);
  double mu = 1e-3;
  Eigen::VectorXd g = f.gradient(w);
  double gn = g.norm();
  int it = 0;
  for (; it < opts.max_iter && std::isfinite(gn); ++it) {
    if (gn < opts.grad_tol) break;
    const Eigen::MatrixXd H = f.hessian(w);
    const Eigen::MatrixXd A = H.transpose() * H;
    const double scale = std::max(A.trace(), 1e-300);
    const Eigen::VectorXd rhs = H.transpose() * g;
    bool moved = false;
    while (mu <= 1e10) {
      const Eigen::MatrixXd damped = A + mu * scale * Eigen::MatrixXd::Identity(A.rows(), A.cols());
      const Eigen::VectorXd step = -damped.ldlt().solve(rhs);
      const auto flat = w.flatten();
      const Eigen::VectorXd next = as_vector(flat) + step;
      const auto wn = WeightTuple<double>::unflatten(arch, std::span<const double>(next.data(), static_cast<std::size_t>(next.size())));
      const Eigen::VectorXd gnext = f.gradient(wn);
      if (std::isfinite(gnext.norm()) && gnext.norm() < gn) {
        w = canonical_if_possible(arch, wn);
        mu = std::max(mu / 10, 1e-14);
        moved = true;
        break;
      }
      mu *= 10;
    }
    if (!moved) {
      // Armijo backtracking on the loss along -grad.
      mu = 1e-3;
      const double f0 = f.value(w);
      const auto flat = w.flatten();
      double t = 1.0 / std::max(1.0, gn);
      bool descended = false;
      for (int back = 0; back < 60; ++back, t *= 0.5) {
        const Eigen::VectorXd next = as_vector(flat) - t * g;
        const auto wn = WeightTuple<double>::unflatten(arch, std::span<const double>(next.data(), static_cast<std::size_t>(next.size())));
        if (f.value(wn) <= f0 - 1e-4 * t * gn * gn) {
          w = canonical_if_possible(arch, wn);
          descended = true;
          break;
        }
      }
      if (!descended) break;
    }
    g = f.gradient(w);
    gn = g.norm();
  }
  // A few undamped Newton steps push a converged point well below grad_tol,
  // so independent re-evaluations of the gradient keep a margin.
  for (int polish = 0; polish < 3 && std::isfinite(gn) && gn < opts.grad_tol; ++polish) {
    const Eigen::VectorXd step = -f.hessian(w).completeOrthogonalDecomposition().solve(g);
    const Eigen::VectorXd next = as_vector(w.flatten()) + step;
    const auto wn = WeightTuple<double>::unflatten(arch, std::span<const double>(next.data(), static_cast<std::size_t>(next.size())));
    const Eigen::VectorXd gnext = f.gradient(wn);
    if (!(gnext.norm() < gn)) break;
    w = canonical_if_possible(arch, wn);
    g = f.gradient(w);
    gn = g.norm();
  }
  pt.w = w;
  pt.grad_norm = gn;
  pt.iterations = it;
  pt.converged = std::isfinite(gn) && gn < opts.grad_tol;
  pt.loss = f.value(w);
  return pt;
}

WeightTuple<double> census_start(const Architecture& arch, std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(std::uint64_t(index) >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  return random_like<double>(arch, [&] { return normal(rng); });
}

StationarySearch find_stationary(const LossLandscape& f, const CensusOptions& opts) {
  const auto n = static_cast<std::size_t>(std::max(opts.n_starts, 0));
  std::vector<StationaryPoint> results(n);
  parallel_for(n, opts.threads, [&](std::size_t i) {
    results[i] = refine_stationary(f, census_start(f.arch(), opts.seed, i), opts);
    results[i].start = i;
  });
  StationarySearch out;
  for (auto& p : results) (p.converged ? out.converged : out.failed).push_back(std::move(p));
  return out;
}

const char* to_string(CriticalKind kind) {
  switch (kind) {
    case CriticalKind::Minimum: return "min";
    case CriticalKind::Saddle: return "saddle";
    case CriticalKind::Maximum: return "max";
  }
  return "unknown";
}

namespace {

double relative_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double scale = std::max({std::sqrt(na), std::sqrt(nb), 1e-300});
  return std::sqrt(diff) / scale;
}

}  // namespace

std::vector<CriticalPoint> dedup(const std::vector<StationaryPoint>& points, const Architecture& arch, double tol) {
  std::vector<const StationaryPoint*> order;
  for (const auto& p : points) order.push_back(&p);
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->start < b->start; });

  std::vector<CriticalPoint> out;
  for (const auto* p : order) {
    auto coords = network_coords(arch, symbolic_network(arch, p->w));
    auto hit = std::find_if(out.begin(), out.end(),
                            [&](const CriticalPoint& c) { return relative_distance(c.coords, coords) < tol; });
    if (hit != out.end()) {
      ++hit->multiplicity;
      continue;
    }
    CriticalPoint c;
    c.weights = canonical_if_possible(arch, p->w);
    c.coords = std::move(coords);
    c.loss = p->loss;
    c.grad_norm = p->grad_norm;
    c.multiplicity = 1;
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    if (a.loss != b.loss) return a.loss < b.loss;
    return a.coords < b.coords;
  });
  return out;
}

Inertia classify(const LossLandscape& f, const WeightTuple<double>& w, double threshold) {
  const Architecture& arch = f.arch();
  const Eigen::MatrixXd H = f.hessian(w);
  const Eigen::Index n = H.rows();
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(n, n);
  if (arch.layers() > 1 && w.all_nonzero()) {
    const auto kernel = claimed_kernel_basis(arch, w);
    Eigen::MatrixXd K(n, static_cast<Eigen::Index>(kernel.size()));
    for (std::size_t c = 0; c < kernel.size(); ++c) K.col(static_cast<Eigen::Index>(c)) = as_vector(kernel[c]);
    const Eigen::MatrixXd full = Eigen::HouseholderQR<Eigen::MatrixXd>(K).householderQ();
    Q = full.rightCols(n - K.cols());
  }
  const Eigen::MatrixXd P = Q.transpose() * H * Q;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(P, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  const double cutoff = threshold * (ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0);
  Inertia out;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > cutoff) {
      ++out.positive;
    } else if (ev(i) < -cutoff) {
      ++out.negative;
    } else {
      ++out.degenerate;
    }
  }
  if (out.negative == 0) {
    out.kind = CriticalKind::Minimum;
  } else if (out.positive == 0) {
    out.kind = CriticalKind::Maximum;
  } else {
    out.kind = CriticalKind::Saddle;
  }
  return out;
}

double verify_criticality_on_manifold(const LossLandscape& f, const WeightTuple<double>& w, double zero_tol) {
  if (is_singular_parameter(f.arch(), w, zero_tol) != SingularityKind::Smooth) {
    throw Error(ErrorCode::SingularPointRejected, "criticality on the manifold needs a smooth parameter");
  }
  const Eigen::MatrixXd J = f.tangent(w);
  const Eigen::VectorXd r = f.metric_residual(w);
  return (J.transpose() * r).norm() / std::max(1.0, J.norm() * r.norm());
}

CensusReport census(const Architecture& arch, const Dataset& data, const CensusOptions& opts) {
  if (arch.r == 1 && arch.layers() > 1) {
    throw Error(ErrorCode::RequiresRGreaterOne, "census of a deep linear network is not covered; use r > 1 or L = 1");
  }
  const DesignSystem ds = design_system(data, arch);
  if (!ds.full_rank) throw Error(ErrorCode::SingularGram, "census needs a full-rank design; enlarge the dataset");
  const LossLandscape f(arch, ds);

  CensusReport report;
  report.arch = arch;
  report.options = opts;
  report.ged = ged_neuromanifold(arch.k, arch.r);

  const StationarySearch search = find_stationary(f, opts);
  report.raw_converged = search.converged.size();
  report.raw_failed = search.failed.size();
  const double anchor_norm = ds.v_anchor().norm();
  for (const auto& p : search.failed) {
    if (f.coords(p.w).norm() < 1e-6 * anchor_norm) ++report.failed_near_cone_vertex;
  }
  double iterations = 0.0;
  for (const auto& p : search.converged) iterations += p.iterations;
  for (const auto& p : search.failed) iterations += p.iterations;
  const std::size_t total = search.converged.size() + search.failed.size();
  report.mean_iterations = total ? iterations / static_cast<double>(total) : 0.0;

  report.points = dedup(search.converged, arch, opts.dedup_tol);
  for (auto& pt : report.points) {
    pt.smoothness = is_singular_parameter(arch, pt.weights, opts.zero_tol);
    const Inertia inertia = classify(f, pt.weights, opts.degeneracy_threshold);
    pt.kind = inertia.kind;
    pt.positive = inertia.positive;
    pt.negative = inertia.negative;
    pt.degenerate = inertia.degenerate;
    if (pt.smoothness != SingularityKind::Smooth) {
      ++report.singular;
      if (pt.smoothness == SingularityKind::NodalSingular) ++report.nodal;
      continue;
    }
    pt.criticality_residual = verify_criticality_on_manifold(f, pt.weights, opts.zero_tol);
    if (pt.criticality_residual >= opts.criticality_tol) {
      ++report.rejected;
      continue;
    }
    pt.accepted = true;
    ++report.smooth_count;
    if (pt.kind == CriticalKind::Minimum) ++report.minima;
    if (pt.kind == CriticalKind::Saddle) ++report.saddles;
    if (pt.kind == CriticalKind::Maximum) ++report.maxima;
  }
  const auto degenerate = std::count_if(report.points.begin(), report.points.end(),
                                        [](const CriticalPoint& p) { return p.accepted && p.degenerate > 0; });
  if (degenerate > 0) {
    report.warnings.push_back("degenerate Hessian spectrum at an accepted point; the dataset may be non-generic");
  }
  report.bound_ok = BigInt(report.smooth_count) <= report.ged;
  if (report.nodal > 0) report.warnings.push_back("converged to nodal singular parameters");
  if (report.rejected > 0) report.warnings.push_back("points failed the manifold criticality check");
  if (!report.bound_ok) report.warnings.push_back("real critical count exceeds the generic ED degree");
  return report;
}

bool same_critical_set(const CensusReport& a, const CensusReport& b, double tol) {
  auto accepted = [](const CensusReport& r) {
    std::vector<const CriticalPoint*> out;
    for (const auto& p : r.points) {
      if (p.accepted) out.push_back(&p);
    }
    return out;
  };
  const auto pa = accepted(a);
  const auto pb = accepted(b);
  if (pa.size() != pb.size()) return false;
  for (const auto* p : pa) {
    const bool found = std::any_of(pb.begin(), pb.end(),
                                   [&](const CriticalPoint* q) { return relative_distance(p->coords, q->coords) < tol; });
    if (!found) return false;
  }
  return true;
}

}  // namespace neurocnn
