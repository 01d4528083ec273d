#include "neurocnn/fibers.hpp"

#include <cmath>

namespace neurocnn {

namespace {

template <class T, class IsZero>
ZeroProfile profile_of(const WeightTuple<T>& w, IsZero&& zero) {
  ZeroProfile p;
  for (const auto& f : w.filters) {
    const int k = static_cast<int>(f.size());
    int lead = 0;
    while (lead < k && zero(f, lead)) ++lead;
    int trail = 0;
    while (trail < k && zero(f, k - 1 - trail)) ++trail;
    p.leading.push_back(lead);
    p.trailing.push_back(trail);
  }
  return p;
}

bool within_profile(const ShiftVector& t, const ZeroProfile& profile) {
  for (std::size_t i = 0; i < t.t.size(); ++i) {
    const int v = t.t[i];
    if (v > 0 && v > profile.leading[i]) return false;
    if (v < 0 && -v > profile.trailing[i]) return false;
  }
  return true;
}

}  // namespace

ZeroProfile zero_profile(const WeightTuple<double>& w, double zero_tol) {
  std::vector<double> norms;
  for (const auto& f : w.filters) {
    double n = 0.0;
    for (double v : f) n += v * v;
    norms.push_back(std::sqrt(n));
  }
  std::size_t layer = 0;
  ZeroProfile p;
  for (const auto& f : w.filters) {
    const double cutoff = zero_tol * norms[layer++];
    WeightTuple<double> single{{f}};
    auto one = profile_of(single, [&](const Filter<double>& g, int j) {
      return std::abs(g[static_cast<std::size_t>(j)]) <= cutoff;
    });
    p.leading.push_back(one.leading.front());
    p.trailing.push_back(one.trailing.front());
  }
  return p;
}

ZeroProfile zero_profile(const WeightTuple<Rational>& w) {
  return profile_of(w, [](const Filter<Rational>& g, int j) { return g[static_cast<std::size_t>(j)] == 0; });
}

bool satisfies_stride_recursion(const Architecture& arch, const ShiftVector& t) {
  if (static_cast<int>(t.t.size()) != arch.layers()) return false;
  // t~ stays integral, so the division by the previous stride is exact or fails.
  long long acc = 0;
  for (int i = 0; i < arch.layers(); ++i) {
    if (i > 0) {
      const int s_prev = arch.s[static_cast<std::size_t>(i) - 1];
      if (acc % s_prev != 0) return false;
      acc /= s_prev;
    }
    acc += t.t[static_cast<std::size_t>(i)];
  }
  return acc == 0;
}

std::vector<ShiftVector> admissible_shifts(const Architecture& arch, const ZeroProfile& profile) {
  const std::size_t L = static_cast<std::size_t>(arch.layers());
  if (profile.leading.size() != L || profile.trailing.size() != L) {
    throw Error(ErrorCode::ShapeMismatch, "zero profile does not match the architecture");
  }
  std::vector<ShiftVector> out;
  ShiftVector t{std::vector<int>(L)};
  for (std::size_t i = 0; i < L; ++i) t.t[i] = -profile.trailing[i];
  while (true) {
    if (satisfies_stride_recursion(arch, t)) out.push_back(t);
    std::size_t pos = L;
    while (pos > 0) {
      --pos;
      if (t.t[pos] < profile.leading[pos]) {
        ++t.t[pos];
        break;
      }
      t.t[pos] = -profile.trailing[pos];
      if (pos == 0) return out;
    }
    if (L == 0) return out;
  }
}

template <class T>
WeightTuple<T> apply_shift(const Architecture& arch, const WeightTuple<T>& w, const ShiftVector& t) {
  check_weights(arch, w);
  ZeroProfile profile;
  if constexpr (std::is_same_v<T, double>) {
    profile = zero_profile(w, 0.0);
  } else {
    profile = zero_profile(w);
  }
  if (static_cast<int>(t.t.size()) != arch.layers() || !within_profile(t, profile) ||
      !satisfies_stride_recursion(arch, t)) {
    throw Error(ErrorCode::InadmissibleShift, "shift is not admissible for these filters");
  }
  WeightTuple<T> out = w;
  for (std::size_t i = 0; i < w.filters.size(); ++i) {
    const int k = static_cast<int>(w.filters[i].size());
    for (int j = 0; j < k; ++j) {
      const int src = j + t.t[i];
      out.filters[i][static_cast<std::size_t>(j)] =
          (src >= 0 && src < k) ? w.filters[i][static_cast<std::size_t>(src)] : T(0);
    }
  }
  return out;
}

template WeightTuple<double> apply_shift(const Architecture&, const WeightTuple<double>&, const ShiftVector&);
template WeightTuple<Rational> apply_shift(const Architecture&, const WeightTuple<Rational>&, const ShiftVector&);

CanonicalWeights canonical_form(const Architecture& arch, const WeightTuple<double>& w) {
  check_weights(arch, w);
  if (!w.all_nonzero()) throw Error(ErrorCode::ZeroFilter, "canonical_form needs nonzero filters");
  const auto m = arch.filter_degrees();
  const std::size_t L = w.filters.size();
  CanonicalWeights out{w, std::vector<double>(L, 1.0)};
  double pushed = 1.0;
  for (std::size_t i = 0; i + 1 < L; ++i) {
    auto& f = out.weights.filters[i];
    double norm = 0.0;
    for (double v : f) norm += v * v;
    norm = std::sqrt(norm);
    double first = 0.0;
    for (double v : f) {
      if (v != 0.0) {
        first = v;
        break;
      }
    }
    const double scale = first > 0 ? norm : -norm;
    for (double& v : f) v /= scale;
    out.scales[i] = scale;
    pushed *= std::pow(scale, m[i]);
  }
  for (double& v : out.weights.filters[L - 1]) v *= pushed;
  out.scales[L - 1] = 1.0 / pushed;
  return out;
}

namespace {

std::vector<double> unit_coords(const Architecture& arch, const WeightTuple<double>& w) {
  auto c = network_coords(arch, symbolic_network(arch, w));
  double n = 0.0;
  for (double v : c) n += v * v;
  n = std::sqrt(n);
  if (n > 0) {
    for (double& v : c) v /= n;
  }
  return c;
}

}  // namespace

bool same_function(const Architecture& arch, const WeightTuple<double>& w, const WeightTuple<double>& v,
                   ComparisonMode mode, double tol) {
  if (mode == ComparisonMode::Exact) return symbolic_network(arch, w) == symbolic_network(arch, v);
  const auto a = unit_coords(arch, w);
  const auto b = unit_coords(arch, v);
  double plus = 0.0;
  double minus = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    plus += (a[i] - b[i]) * (a[i] - b[i]);
    minus += (a[i] + b[i]) * (a[i] + b[i]);
  }
  return std::sqrt(std::min(plus, minus)) < tol;
}

bool same_function(const Architecture& arch, const WeightTuple<Rational>& w, const WeightTuple<Rational>& v) {
  return symbolic_network(arch, w) == symbolic_network(arch, v);
}

const char* to_string(SingularityKind kind) {
  switch (kind) {
    case SingularityKind::Smooth: return "smooth";
    case SingularityKind::NodalSingular: return "nodal_singular";
    case SingularityKind::ConeVertex: return "cone_vertex";
  }
  return "unknown";
}

namespace {

template <class T>
bool network_vanishes(const Architecture& arch, const WeightTuple<T>& w) {
  for (const auto& p : symbolic_network(arch, w)) {
    if (!p.is_zero()) return false;
  }
  return true;
}

SingularityKind classify_profile(const Architecture& arch, const ZeroProfile& profile) {
  for (const auto& t : admissible_shifts(arch, profile)) {
    if (!t.is_zero()) return SingularityKind::NodalSingular;
  }
  return SingularityKind::Smooth;
}

}  // namespace

SingularityKind is_singular_parameter(const Architecture& arch, const WeightTuple<double>& w, double zero_tol) {
  check_weights(arch, w);
  if (network_vanishes(arch, w)) return SingularityKind::ConeVertex;
  return classify_profile(arch, zero_profile(w, zero_tol));
}

SingularityKind is_singular_parameter(const Architecture& arch, const WeightTuple<Rational>& w) {
  check_weights(arch, w);
  if (network_vanishes(arch, w)) return SingularityKind::ConeVertex;
  return classify_profile(arch, zero_profile(w));
}

}  // namespace neurocnn
