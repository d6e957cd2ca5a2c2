#pragma once

#include <span>
#include <vector>

#include "core/knots.hpp"

namespace sdd {

/// Index of the mesh element containing x, as an offset into the flat knot
/// vector: knots[span] <= x < knots[span+1], with x = b assigned to the
/// last non-empty interval so the basis is defined on the closed [a, b].
int find_span(const KnotSequence& knots, double x);

/// B_{i,p}(x) by the Cox-de Boor recursion (0/0 treated as zero).
/// `i` is zero-based, 0 <= i < basis_count().
double eval_bspline(const KnotSequence& knots, int i, double x);

/// All n basis values at x; at most p+1 entries are nonzero. `out` must
/// have size basis_count().
void eval_all(const KnotSequence& knots, double x, std::span<double> out);
std::vector<double> eval_all(const KnotSequence& knots, double x);

}  // namespace sdd
