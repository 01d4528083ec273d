#pragma once

// Closed-form invariants of the neuromanifold: dimension, degree and generic
// Euclidean distance degree. Everything here is exact rational arithmetic.

#include <array>
#include <span>
#include <vector>

#include "neurocnn/conv.hpp"
#include "neurocnn/scalar.hpp"

namespace neurocnn {

struct InvariantReport {
  int dim = 0;
  BigInt degree;
  BigInt ged;
  std::vector<int> m;
  std::vector<int> p;
};

// |k| - L + 1. Throws RequiresRGreaterOne for r == 1.
int neuromanifold_dim(const Architecture& arch);

// (|k| - L)! prod_j r^{(L-j-1)(k_j-1)} / (k_j-1)!. Throws RequiresRGreaterOne.
BigInt neuromanifold_degree(const Architecture& arch);

// gED of the Segre-Veronese variety V_{m,p}:
//   sum_{i=0}^{|p|} (-1)^i (2^{|p|+1-i} - 1) (|p|-i)!
//     sum_{|alpha|=i, alpha_j <= p_j} prod_j binom(p_j+1, alpha_j) / (p_j-alpha_j)! m_j^{p_j-alpha_j}
BigInt ged_segre_veronese(std::span<const int> m, std::span<const int> p);

// The same count written in filter sizes (k_bar = |k| - L):
//   sum_{i=0}^{k_bar} (-1)^i (2^{k_bar+1-i} - 1) (k_bar-i)!
//     sum_{|alpha|=i, alpha_j < k_j} prod_j binom(k_j, alpha_j) / (k_j-alpha_j-1)! r^{(L-j-1)(k_j-alpha_j-1)}
// Depends only on k and r.
BigInt ged_filter_formula(std::span<const int> k, int r);

// Evaluates both forms, with m = (r^{L-1}, ..., r, 1) and p = k - 1, and
// throws FormulaMismatch if they differ. Defined for every r >= 1; it is the
// neuromanifold's gED only when r > 1.
BigInt ged_neuromanifold(const Architecture& arch);
BigInt ged_neuromanifold(std::span<const int> k, int r);

// Dimension, degree and gED together. Throws RequiresRGreaterOne.
InvariantReport invariant_report(const Architecture& arch);

// Rows r = 1..6, columns k = 2..6: gED for L = 2 with k_0 = k_1 = k.
using Table1 = std::array<std::array<BigInt, 5>, 6>;
Table1 table1();

}  // namespace neurocnn
