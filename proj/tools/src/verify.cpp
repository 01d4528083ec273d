#include "neurocnn_tools/verify.hpp"

#include <cmath>
#include <functional>
#include <map>

#include <json.hpp>

#include "neurocnn/fibers.hpp"
#include "neurocnn/invariants.hpp"
#include "neurocnn/jacobian.hpp"
#include "neurocnn/regression.hpp"

namespace neurocnn::tools {

void PropertyResult::record(double error, double limit) {
  ++checks;
  if (!(error <= limit)) ++failures;
  if (std::isnan(error) || error > worst) worst = error;
}

void PropertyResult::record(bool ok) {
  ++checks;
  if (!ok) ++failures;
}

bool SuiteResult::passed() const {
  for (const auto& p : properties) {
    if (!p.passed()) return false;
  }
  return true;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"conv", "jacobian", "fibers", "regression", "invariants"};
  return names;
}

const std::array<std::array<std::uint64_t, 5>, 6>& reference_table1() {
  static const std::array<std::array<std::uint64_t, 5>, 6> table{{
      {6, 39, 284, 2205, 17730},
      {14, 219, 3772, 68405, 1277898},
      {22, 543, 14684, 417005, 12186066},
      {30, 1011, 37244, 1439205, 57202074},
      {38, 1623, 75676, 3699005, 185917794},
      {46, 2379, 134204, 7933205, 482134890},
  }};
  return table;
}

std::array<std::array<std::uint64_t, 5>, 6> computed_table1(bool canary) {
  std::array<std::array<std::uint64_t, 5>, 6> out{};
  if (!canary) {
    const Table1 t = table1();
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 5; ++j) out[i][j] = t[i][j].convert_to<std::uint64_t>();
    }
    return out;
  }
  for (int r = 1; r <= 6; ++r) {
    for (int k = 2; k <= 6; ++k) {
      const std::array<int, 2> m{r * r, r};
      const std::array<int, 2> p{k - 1, k - 1};
      out[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(k - 2)] =
          ged_segre_veronese(m, p).convert_to<std::uint64_t>();
    }
  }
  return out;
}

Architecture random_architecture(std::mt19937_64& rng, int max_layers, int max_k, int max_s, int min_r, int max_r,
                                 int max_out) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const int L = pick(1, max_layers);
  std::vector<int> k(static_cast<std::size_t>(L));
  std::vector<int> s(static_cast<std::size_t>(L));
  for (int i = 0; i < L; ++i) {
    k[static_cast<std::size_t>(i)] = pick(1, max_k);
    s[static_cast<std::size_t>(i)] = pick(1, max_s);
  }
  const int r = pick(min_r, max_r);
  int d = pick(1, max_out);
  for (int i = L - 1; i >= 0; --i) d = s[static_cast<std::size_t>(i)] * (d - 1) + k[static_cast<std::size_t>(i)];
  return validate_architecture(d, k, s, r);
}

std::vector<Architecture> default_architectures() {
  return {
      validate_architecture(3, {2, 2}, {1, 1}, 2),
      validate_architecture(7, {3, 2}, {2, 1}, 2),
      validate_architecture(4, {2, 2, 2}, {1, 1, 1}, 2),
      validate_architecture(5, {3, 3}, {1, 1}, 3),
      validate_architecture(8, {2, 3}, {2, 1}, 2),
      validate_architecture(6, {2, 2, 2}, {2, 1, 1}, 3),
  };
}

std::vector<Architecture> regression_architectures() {
  auto all = default_architectures();
  all.pop_back();
  return all;
}

namespace {

using Rng = std::mt19937_64;

double normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

std::vector<double> normal_vector(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = normal(rng);
  return v;
}

WeightTuple<double> normal_weights(const Architecture& arch, Rng& rng) {
  return random_like<double>(arch, [&] { return normal(rng); });
}

double rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
  }
  return diff / std::max(scale, 1.0);
}

std::vector<Architecture> architectures_for(const VerifyOptions& opts, std::vector<Architecture> fallback) {
  if (opts.arch) return {*opts.arch};
  return fallback;
}

SuiteResult conv_suite(const VerifyOptions& opts) {
  Rng rng(opts.seed);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  PropertyResult toeplitz_prop{"convolve_matches_direct_sum_and_toeplitz"};
  PropertyResult compose_prop{"composed_filter_equals_two_convolutions"};
  PropertyResult lift_prop{"veronese_lift_identity"};
  PropertyResult lift_size_prop{"veronese_lift_sizes"};
  PropertyResult rank_prop{"toeplitz_full_rank_for_nonzero_filter"};
  for (int trial = 0; trial < 100; ++trial) {
    const int k = pick(1, 5);
    const int s = pick(1, 3);
    const int d_out = pick(1, 6);
    const auto w = normal_vector(rng, static_cast<std::size_t>(k));
    const auto x = normal_vector(rng, static_cast<std::size_t>(s * (d_out - 1) + k));
    const auto y = convolve<double>(w, s, x);
    std::vector<double> direct(static_cast<std::size_t>(d_out), 0.0);
    for (int i = 0; i < d_out; ++i) {
      for (int j = 0; j < k; ++j) direct[static_cast<std::size_t>(i)] += w[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(s * i + j)];
    }
    const Eigen::VectorXd tx = toeplitz(w, s, d_out) * Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    toeplitz_prop.record(std::max(rel_diff(y, direct), rel_diff(y, std::vector<double>(tx.data(), tx.data() + tx.size()))), 1e-12);
    rank_prop.record(toeplitz_rank(w, s, d_out) == d_out);

    const int t = pick(1, 3);
    const int kv = pick(1, 4);
    const auto v = normal_vector(rng, static_cast<std::size_t>(kv));
    const int d2 = pick(1, 4);
    const int d1 = s * (d2 - 1) + kv;
    const auto x2 = normal_vector(rng, static_cast<std::size_t>(t * (d1 - 1) + k));
    const auto two_step = convolve<double>(v, s, convolve<double>(w, t, x2));
    const auto q = compose_filters<double>(v, t, w);
    compose_prop.record(rel_diff(two_step, convolve<double>(q, s * t, x2)), 1e-12);

    const int r = pick(1, 4);
    const LiftedLayer layer = veronese_lift(w, s, r);
    const auto lifted = convolve<double>(layer.lifted_filter, layer.lifted_stride, lift_input(layer, x));
    std::vector<double> activated = y;
    for (double& a : activated) a = std::pow(a, r);
    lift_prop.record(rel_diff(activated, lifted), 1e-10);
    const auto kt = binomial(r + k - 1, r);
    lift_size_prop.record(layer.lifted_size == kt && layer.lifted_stride == s * kt);
  }
  return {"conv", {toeplitz_prop, compose_prop, lift_prop, lift_size_prop, rank_prop}};
}

SuiteResult jacobian_suite(const VerifyOptions& opts) {
  PropertyResult dim_prop{"kernel_dimension_is_L_minus_1"};
  PropertyResult basis_prop{"claimed_kernel_basis_annihilated"};
  PropertyResult scaling_prop{"scaling_identity"};
  PropertyResult routes_prop{"leibniz_and_factorized_jacobians_agree"};
  if (opts.arch && opts.arch->r == 1) {
    for (auto* p : {&dim_prop, &basis_prop, &scaling_prop, &routes_prop}) {
      p->skipped = true;
      p->note = "regularity statements assume r > 1";
    }
    return {"jacobian", {dim_prop, basis_prop, scaling_prop, routes_prop}};
  }
  Rng rng(opts.seed);
  for (const auto& arch : architectures_for(opts, default_architectures())) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto w = normal_weights(arch, rng);
      const Eigen::MatrixXd J = jacobian(arch, w);
      dim_prop.record(kernel_dim(J).dim == arch.layers() - 1);
      for (const auto& v : claimed_kernel_basis(arch, w)) {
        const Eigen::VectorXd kv = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
        basis_prop.record((J * kv).norm() / (J.norm() * kv.norm()), 1e-10);
      }
      std::vector<double> lambda(static_cast<std::size_t>(arch.layers()));
      for (double& l : lambda) l = normal(rng);
      const auto phi = network_coords(arch, symbolic_network(arch, w));
      double phi_norm = 0.0;
      for (double c : phi) phi_norm += c * c;
      double lambda_scale = 0.0;
      for (double l : lambda) lambda_scale += std::abs(l);
      scaling_prop.record(scaling_identity_check(arch, w, lambda) /
                              (std::sqrt(phi_norm) * lambda_scale * static_cast<double>(ipow(arch.r, arch.layers() - 1))),
                          1e-9);
      try {
        const Eigen::MatrixXd J2 = jacobian_via_factorization(arch, w, factorization_matrix(arch));
        routes_prop.record((J - J2).norm() / J.norm(), 1e-9);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::TooLarge) throw;
      }
    }
  }
  return {"jacobian", {dim_prop, basis_prop, scaling_prop, routes_prop}};
}

// Nonzero shifts that are admissible when every filter has k_i - 1 zeros on
// both sides.
std::vector<ShiftVector> candidate_shifts(const Architecture& arch) {
  ZeroProfile room;
  for (int k : arch.k) {
    room.leading.push_back(k - 1);
    room.trailing.push_back(k - 1);
  }
  std::vector<ShiftVector> out;
  for (auto& t : admissible_shifts(arch, room)) {
    if (!t.is_zero()) out.push_back(std::move(t));
  }
  return out;
}

// Small nonzero integers, then the entries a shift by t would slide over set
// to zero.
WeightTuple<Rational> padded_weights(const Architecture& arch, const ShiftVector& t, Rng& rng) {
  std::uniform_int_distribution<int> value(1, 4);
  std::bernoulli_distribution sign(0.5);
  WeightTuple<Rational> w;
  for (int i = 0; i < arch.layers(); ++i) {
    const int k = arch.k[static_cast<std::size_t>(i)];
    Filter<Rational> f(static_cast<std::size_t>(k));
    for (auto& c : f) c = Rational(sign(rng) ? value(rng) : -value(rng));
    const int ti = t.t[static_cast<std::size_t>(i)];
    for (int j = 0; j < std::abs(ti); ++j) f[static_cast<std::size_t>(ti > 0 ? j : k - 1 - j)] = 0;
    w.filters.push_back(std::move(f));
  }
  return w;
}

SuiteResult fibers_suite(const VerifyOptions& opts) {
  PropertyResult shift_prop{"admissible_shift_preserves_phi_exactly"};
  PropertyResult reject_prop{"inadmissible_shift_rejected"};
  PropertyResult canon_prop{"canonical_form_preserves_phi"};
  PropertyResult orbit_prop{"rescaling_orbit_is_one_function"};
  PropertyResult singular_prop{"padded_tuples_are_nodal_singular"};
  Rng rng(opts.seed);
  const std::vector<Architecture> archs = architectures_for(
      opts, {validate_architecture(3, {2, 2}, {1, 1}, 2), validate_architecture(7, {3, 2}, {2, 1}, 2),
             validate_architecture(4, {2, 2, 2}, {1, 1, 1}, 2), validate_architecture(10, {4, 3}, {3, 1}, 2),
             validate_architecture(8, {2, 3}, {2, 1}, 2)});
  for (const auto& arch : archs) {
    const auto candidates = candidate_shifts(arch);
    for (int trial = 0; trial < 20 && !candidates.empty(); ++trial) {
      const auto& t = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
      const auto w = padded_weights(arch, t, rng);
      const auto reference = symbolic_network(arch, w);
      for (const auto& shift : admissible_shifts(arch, zero_profile(w))) {
        shift_prop.record(symbolic_network(arch, apply_shift(arch, w, shift)) == reference);
      }
      singular_prop.record(is_singular_parameter(arch, w) == SingularityKind::NodalSingular);
    }
    // Shifts inside the available zeros that break the stride recursion.
    ZeroProfile room;
    for (int k : arch.k) {
      room.leading.push_back(k - 1);
      room.trailing.push_back(k - 1);
    }
    WeightTuple<Rational> sparse;
    for (int k : arch.k) {
      Filter<Rational> f(static_cast<std::size_t>(k), Rational(0));
      f[static_cast<std::size_t>(k / 2)] = 1;
      sparse.filters.push_back(std::move(f));
    }
    const ZeroProfile profile = zero_profile(sparse);
    ShiftVector t{std::vector<int>(arch.k.size(), 0)};
    std::function<void(std::size_t)> visit = [&](std::size_t i) {
      if (i == t.t.size()) {
        if (satisfies_stride_recursion(arch, t)) return;
        bool threw = false;
        try {
          apply_shift(arch, sparse, t);
        } catch (const Error& e) {
          threw = e.code() == ErrorCode::InadmissibleShift;
        }
        reject_prop.record(threw);
        return;
      }
      for (int v = -profile.trailing[i]; v <= profile.leading[i]; ++v) {
        t.t[i] = v;
        visit(i + 1);
      }
      t.t[i] = 0;
    };
    visit(0);

    for (int trial = 0; trial < 10; ++trial) {
      const auto w = normal_weights(arch, rng);
      const auto canon = canonical_form(arch, w);
      canon_prop.record(same_function(arch, w, canon.weights, ComparisonMode::Projective, 1e-10));
      std::vector<double> lambda(static_cast<std::size_t>(arch.layers()));
      double product = 1.0;
      const auto m = arch.filter_degrees();
      for (std::size_t i = 0; i + 1 < lambda.size(); ++i) {
        lambda[i] = std::exp(normal(rng));
        product *= std::pow(lambda[i], m[i]);
      }
      lambda.back() = 1.0 / product;
      auto scaled = w;
      for (std::size_t i = 0; i < lambda.size(); ++i) {
        for (double& v : scaled.filters[i]) v *= lambda[i];
      }
      const auto a = network_coords(arch, symbolic_network(arch, w));
      const auto b = network_coords(arch, symbolic_network(arch, scaled));
      orbit_prop.record(rel_diff(a, b), 1e-10);
    }
  }
  return {"fibers", {shift_prop, reject_prop, canon_prop, orbit_prop, singular_prop}};
}

SuiteResult regression_suite(const VerifyOptions& opts) {
  PropertyResult identity_prop{"loss_minus_distance_constant_in_w"};
  PropertyResult constant_prop{"constant_is_least_squares_residual"};
  PropertyResult rank_prop{"generic_design_full_rank"};
  PropertyResult contain_prop{"network_lies_in_conv_subspace"};
  PropertyResult project_prop{"projected_anchor_orthogonal_residual"};
  PropertyResult shift_prop{"projected_anchor_shifts_distance_by_constant"};
  Rng rng(opts.seed);
  for (const auto& arch : architectures_for(opts, regression_architectures())) {
    const ConvSubspace sub = conv_subspace(arch);
    for (int data_index = 0; data_index < 2; ++data_index) {
      DatasetSpec spec;
      spec.seed = rng();
      const Dataset data = generate_dataset(arch, spec);
      const DesignSystem ds = design_system(data, arch);
      rank_prop.record(ds.full_rank);
      if (!ds.full_rank) continue;
      const double residual = least_squares_residual(ds);
      const Eigen::MatrixXd u = project_anchor(ds, sub);
      std::optional<double> first_constant;
      std::optional<double> first_shift;
      for (int trial = 0; trial < 10; ++trial) {
        const auto w = normal_weights(arch, rng);
        const double l = loss(arch, w, data);
        const auto parts = loss_as_distance(arch, w, ds);
        const double constant = l - parts.dist_sq;
        if (!first_constant) first_constant = constant;
        identity_prop.record(std::abs(constant - *first_constant) / std::max(l, 1.0), 1e-8);
        constant_prop.record(std::abs(parts.constant - residual) / std::max(residual, 1.0), 1e-8);
        const Eigen::MatrixXd M = coefficient_matrix(arch, w);
        contain_prop.record(containment_residual(sub, M), 1e-9);
        const double gap = parts.dist_sq - weighted_distance_sq(M, u, ds.G);
        if (!first_shift) first_shift = gap;
        shift_prop.record(std::abs(gap - *first_shift) / std::max(parts.dist_sq, 1.0), 1e-8);
      }
      const Eigen::MatrixXd diff = ds.v_anchor() - u;
      double worst = 0.0;
      for (const auto& B : sub.basis) {
        worst = std::max(worst, std::abs((diff * ds.G * B.transpose()).trace()) /
                                    std::max(1.0, std::sqrt((diff * ds.G * diff.transpose()).trace() *
                                                            (B * ds.G * B.transpose()).trace())));
      }
      project_prop.record(worst, 1e-9);
    }
  }
  return {"regression", {identity_prop, constant_prop, rank_prop, contain_prop, project_prop, shift_prop}};
}

SuiteResult invariants_suite(const VerifyOptions& opts) {
  PropertyResult table_prop{"table1_matches_reference"};
  PropertyResult routes_prop{"ged_formula_routes_agree"};
  PropertyResult toy_prop{"toy_invariants"};
  if (opts.canary) table_prop.note = "canary: deliberately wrong degree vector";
  const auto computed = computed_table1(opts.canary);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 5; ++j) table_prop.record(computed[i][j] == reference_table1()[i][j]);
  }
  Rng rng(opts.seed);
  for (int trial = 0; trial < 50; ++trial) {
    const Architecture arch = random_architecture(rng, 4, 5, 3, 1, 5, 2);
    try {
      ged_neuromanifold(arch);
      if (arch.r > 1) neuromanifold_degree(arch);
      routes_prop.record(true);
    } catch (const Error&) {
      routes_prop.record(false);
    }
  }
  const InvariantReport toy = invariant_report(validate_architecture(3, {2, 2}, {1, 1}, 2));
  toy_prop.record(toy.dim == 3 && toy.degree == 4 && toy.ged == 14);
  return {"invariants", {table_prop, routes_prop, toy_prop}};
}

}  // namespace

SuiteResult run_suite(const std::string& name, const VerifyOptions& opts) {
  static const std::map<std::string, std::function<SuiteResult(const VerifyOptions&)>> suites{
      {"conv", conv_suite},
      {"jacobian", jacobian_suite},
      {"fibers", fibers_suite},
      {"regression", regression_suite},
      {"invariants", invariants_suite},
  };
  const auto it = suites.find(name);
  if (it == suites.end()) throw Error(ErrorCode::ParseError, "unknown suite '" + name + "'");
  return it->second(opts);
}

std::string to_json(const std::vector<SuiteResult>& results, const VerifyOptions& opts) {
  using nlohmann::json;
  json suites = json::array();
  bool all = true;
  for (const auto& s : results) {
    json props = json::array();
    for (const auto& p : s.properties) {
      json entry{{"name", p.name}, {"passed", p.passed()}, {"checks", p.checks}, {"failures", p.failures},
                 {"worst", p.worst}, {"skipped", p.skipped}};
      if (!p.note.empty()) entry["note"] = p.note;
      props.push_back(std::move(entry));
    }
    all = all && s.passed();
    suites.push_back(json{{"suite", s.suite}, {"passed", s.passed()}, {"properties", std::move(props)}});
  }
  json out{{"seed", opts.seed}, {"passed", all}, {"suites", std::move(suites)}};
  if (opts.arch) out["arch"] = format_architecture(*opts.arch);
  return out.dump(2);
}

}  // namespace neurocnn::tools
