#pragma once

#include <functional>
#include <map>
#include <span>
#include <vector>

#include "core/decomposition.hpp"

namespace sdd {

enum class ReferenceKind { Pce, Pdd };

/// Per-coordinate bases over knot sequences with no interior knots, so each
/// coordinate spans the polynomials of degree <= p. Feeding these through
/// the usual fitting pipeline yields PDD (order S) and PCE (S = N).
std::vector<OrthonormalBasis1D> reference_bases(const std::vector<MeasureSpec>& measures,
                                                int degree, int points_per_element = 0);

/// Orthonormal Legendre value: unit second moment under the uniform law on
/// [a, b]. Evaluated by the three-term recurrence.
double legendre_orthonormal(int degree, double x, double a = -1.0, double b = 1.0);

/// Full tensor-product polynomial chaos baseline for uniform measures,
/// assembled directly from orthonormal Legendre polynomials. Kept
/// independent of the spline pipeline so equivalence checks are
/// non-circular.
class TensorPce {
public:
    TensorPce(std::vector<MeasureSpec> measures, int degree, std::vector<double> coeffs);

    int dimension() const noexcept { return static_cast<int>(measures_.size()); }
    int degree() const noexcept { return degree_; }
    /// Coefficient for a full multi-index (entries in [0, degree]).
    double coefficient(std::span<const int> index) const;

    double mean() const;
    double variance() const;
    std::map<std::vector<int>, double> variance_by_subset() const;
    double evaluate(std::span<const double> x) const;

private:
    std::vector<MeasureSpec> measures_;
    int degree_;
    std::vector<double> coeffs_;  // tensor layout, last index fastest
};

struct TensorPceOptions {
    int points_per_element = 64;
    std::vector<std::vector<double>> breakpoints;
    int threads = 0;
};

TensorPce fit_tensor_legendre(const std::function<double(std::span<const double>)>& output,
                              const std::vector<MeasureSpec>& measures, int degree,
                              const TensorPceOptions& options = {});

/// Comparison of variance decompositions. Basis elements inside a subspace
/// may differ by an orthogonal change of basis, so per-subset variances,
/// not raw coefficients, are the equivalence invariant.
struct EquivalenceReport {
    double max_subset_difference = 0.0;  // absolute, over all subsets
    double total_difference = 0.0;       // absolute difference of total variances
    double max_relative = 0.0;           // max_subset_difference / max total variance
};

EquivalenceReport equivalence_check(const SddExpansion& left, const SddExpansion& right);
EquivalenceReport equivalence_check(const SddExpansion& left, const TensorPce& right);

}  // namespace sdd
