#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vsheet::quad {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Newton iteration on the Legendre recurrence; accurate to ~1e-15.
GaussRule gauss_legendre(int n);

/// Cached 8-point rule used by the panel integrators.
const GaussRule &gauss8();

/// Weights of the fourth-order extended Simpson rule on n uniformly spaced
/// nodes with spacing h (exact for cubics). Requires n >= 8.
std::vector<double> extended_simpson_weights(std::size_t n, double h);

/// Pairwise (cascade) summation; the result does not depend on thread count.
double pairwise_sum(std::span<const double> values);

} // namespace vsheet::quad
