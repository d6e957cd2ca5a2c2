#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "core/orthobasis.hpp"

namespace sdd {

/// One expansion term: a variable subset u (zero-based coordinate indices,
/// strictly increasing) and one reduced multi-index (zero-based basis
/// indices, each >= 1 so the constant element is excluded).
struct Term {
    std::vector<int> coords;
    std::vector<int> indices;
    double coeff = 0.0;
};

/// All (subset, reduced multi-index) pairs with 1 <= |u| <= order, in
/// lexicographic order by (|u|, u, indices). Coefficients are zero.
std::vector<Term> enumerate_terms(std::span<const int> basis_counts, int order);

/// Number of expansion coefficients including the constant.
std::int64_t term_count(std::span<const int> basis_counts, int order);

/// One input/output record for regression fitting.
struct SurrogateSample {
    std::vector<double> x;
    double y = 0.0;
};

/// Truncated dimensionwise expansion: constant plus coefficients over
/// products of non-constant orthonormal spline elements. Immutable once
/// fitted; evaluation and statistics are thread-safe.
class SddExpansion {
public:
    SddExpansion(std::vector<OrthonormalBasis1D> bases, int order, double constant,
                 std::vector<Term> terms);

    int dimension() const noexcept { return static_cast<int>(bases_.size()); }
    int order() const noexcept { return order_; }
    double constant() const noexcept { return constant_; }
    const std::vector<Term>& terms() const noexcept { return terms_; }
    const std::vector<OrthonormalBasis1D>& bases() const noexcept { return bases_; }
    const OrthonormalBasis1D& basis(int k) const { return bases_.at(k); }

    double evaluate(std::span<const double> x) const;
    /// Product of univariate orthonormal elements for one term at x.
    double basis_product(const Term& term, std::span<const double> x) const;

    /// The constant coefficient; exact mean of the fitted model.
    double mean() const noexcept { return constant_; }
    /// Sum of squared coefficients over all retained terms.
    double variance() const;
    /// Variance split by variable subset, keyed by zero-based coordinates.
    std::map<std::vector<int>, double> variance_by_subset() const;

private:
    std::vector<OrthonormalBasis1D> bases_;
    int order_;
    double constant_;
    std::vector<Term> terms_;
};

struct QuadratureFitOptions {
    /// Gauss points per mesh element; 0 selects a default from the degrees.
    int points_per_element = 0;
    /// Additional integrand breakpoints per coordinate (e.g. kink loci).
    std::vector<std::vector<double>> breakpoints;
    int threads = 0;
};

/// Projection coefficients by full tensor-product quadrature. Supported for
/// dimension <= 6; use regression beyond that.
SddExpansion fit_quadrature(const std::function<double(std::span<const double>)>& output,
                            std::vector<OrthonormalBasis1D> bases, int order,
                            const QuadratureFitOptions& options = {});

struct RegressionOptions {
    double ridge = 0.0;
    /// Required ratio of samples to coefficients; lower at your own risk.
    double min_oversampling = 2.0;
    int threads = 0;
};

struct RegressionInfo {
    double condition_estimate = 0.0;
    bool ill_conditioned = false;  // condition estimate above 1e10
};

/// Least-squares fit of the expansion to input/output samples via a
/// column-pivoted orthogonal factorization of the design matrix. With a
/// positive ridge, the normal equations are regularized instead.
SddExpansion fit_regression(std::span<const SurrogateSample> samples,
                            std::vector<OrthonormalBasis1D> bases, int order,
                            const RegressionOptions& options = {},
                            RegressionInfo* info = nullptr);

/// Seeded Monte Carlo of the surrogate by inverse-CDF sampling of the input
/// measures. Returns sorted outputs; the empirical CDF is rank/count.
/// Identical seeds give identical samples regardless of thread count.
std::vector<double> sample_surrogate(const SddExpansion& expansion, std::uint64_t count,
                                     std::uint64_t seed, int threads = 0);

/// Seeded input sample matrix (count x dimension, row-major), drawn the same
/// way as sample_surrogate draws inputs.
std::vector<double> sample_inputs(const ProductMeasure& measure, std::uint64_t count,
                                  std::uint64_t seed, int threads = 0);

}  // namespace sdd
