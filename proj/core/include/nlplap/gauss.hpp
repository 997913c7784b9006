#pragma once

#include <vector>

namespace nlplap {

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order() const { return static_cast<int>(nodes.size()); }
};

// Nodes and weights computed by Newton iteration on the Legendre recurrence.
// Exact (to rounding) for polynomials of degree 2n-1. Throws for n < 1.
GaussRule gauss_legendre(int n);

}  // namespace nlplap
