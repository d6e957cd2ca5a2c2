#pragma once

#include <span>
#include <vector>

namespace sdd {

/// Nodes and weights of the q-point Gauss-Legendre rule on [-1, 1].
/// Exact for polynomials of degree <= 2q - 1. Results are cached per q.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussLegendre& gauss_legendre(int points);

/// Composite rule: the q-point rule mapped onto every non-empty interval
/// [breaks[i], breaks[i+1]]. `breaks` must be non-decreasing.
struct CompositeRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

CompositeRule composite_gauss(std::span<const double> breaks, int points);

}  // namespace sdd
