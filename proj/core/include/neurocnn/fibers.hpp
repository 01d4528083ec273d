#pragma once

// Fibers of the parametrization: per-filter rescaling, index shifts of
// zero-padded filters, and the resulting singular points.

#include <vector>

#include "neurocnn/parametrization.hpp"

namespace neurocnn {

// t_i > 0 slides filter i left past t_i leading zeros, t_i < 0 slides it right
// past |t_i| trailing zeros.
struct ShiftVector {
  std::vector<int> t;

  bool is_zero() const {
    for (int v : t) {
      if (v != 0) return false;
    }
    return true;
  }
  friend bool operator==(const ShiftVector&, const ShiftVector&) = default;
};

struct ZeroProfile {
  std::vector<int> leading;
  std::vector<int> trailing;
};

// Entries with |w_ij| <= zero_tol * ||w_i|| count as zero; zero_tol = 0 is the
// exact profile. An all-zero filter has leading = trailing = k_i.
ZeroProfile zero_profile(const WeightTuple<double>& w, double zero_tol = 0.0);
ZeroProfile zero_profile(const WeightTuple<Rational>& w);

// With t~_{-1} = 0 and t~_i = t_i + t~_{i-1} / s_{i-1}: every t~_i is an
// integer and t~_{L-1} = 0.
bool satisfies_stride_recursion(const Architecture& arch, const ShiftVector& t);

// All shifts within the available zeros that satisfy the stride recursion,
// in lexicographic order of t. Always contains the zero shift.
std::vector<ShiftVector> admissible_shifts(const Architecture& arch, const ZeroProfile& profile);

// new_i[j] = w_i[j + t_i], zero filled. Throws InadmissibleShift.
template <class T>
WeightTuple<T> apply_shift(const Architecture& arch, const WeightTuple<T>& w, const ShiftVector& t);

// Filters 0..L-2 scaled to unit norm with first nonzero entry positive; the
// compensating factor prod_i scales[i]^{m_i} goes into the last filter, so the
// canonical tuple computes exactly the same function. w_i = scales[i] * weights_i
// for every i (scales[L-1] is the inverse of that product).
struct CanonicalWeights {
  WeightTuple<double> weights;
  std::vector<double> scales;
};

// Throws ZeroFilter if any filter is zero.
CanonicalWeights canonical_form(const Architecture& arch, const WeightTuple<double>& w);

enum class ComparisonMode { Exact, Projective };

// Exact: identical coefficient expansions. Projective: unit-normalized
// coefficient vectors within tol, up to sign.
bool same_function(const Architecture& arch, const WeightTuple<double>& w, const WeightTuple<double>& v,
                   ComparisonMode mode, double tol = 1e-8);
bool same_function(const Architecture& arch, const WeightTuple<Rational>& w, const WeightTuple<Rational>& v);

enum class SingularityKind { Smooth, NodalSingular, ConeVertex };

const char* to_string(SingularityKind kind);

// ConeVertex iff phi_w = 0; NodalSingular iff a nonzero admissible shift
// exists for the zero profile of w; Smooth otherwise.
SingularityKind is_singular_parameter(const Architecture& arch, const WeightTuple<double>& w,
                                      double zero_tol = 0.0);
SingularityKind is_singular_parameter(const Architecture& arch, const WeightTuple<Rational>& w);

}  // namespace neurocnn
