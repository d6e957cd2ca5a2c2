#pragma once

#include <span>
#include <string>
#include <vector>

namespace sdd {

enum class Family { Uniform, TruncatedGaussian, Beta };

std::string family_name(Family family);
Family family_from_name(const std::string& name);

/// A bounded univariate probability law on [a, b]. Parameters are validated
/// at construction; evaluation assumes a well-formed instance.
class MeasureSpec {
public:
    static MeasureSpec uniform(double a, double b);
    /// Gaussian with the given pre-truncation mean and standard deviation,
    /// renormalized to [a, b].
    static MeasureSpec truncated_gaussian(double a, double b, double mean, double stddev);
    /// Beta law with shape exponents alpha, beta > 0, shifted and scaled to [a, b].
    static MeasureSpec beta(double a, double b, double alpha, double beta);

    Family family() const noexcept { return family_; }
    double lower() const noexcept { return a_; }
    double upper() const noexcept { return b_; }
    double width() const noexcept { return b_ - a_; }

    // Family-specific parameters; meaningful only for the matching family.
    double gauss_mean() const noexcept { return p1_; }
    double gauss_stddev() const noexcept { return p2_; }
    double beta_alpha() const noexcept { return p1_; }
    double beta_beta() const noexcept { return p2_; }

    bool operator==(const MeasureSpec& other) const noexcept {
        return family_ == other.family_ && a_ == other.a_ && b_ == other.b_ &&
               p1_ == other.p1_ && p2_ == other.p2_;
    }

    double density(double x) const;
    double cdf(double x) const;
    /// E[X^l]; closed form for Uniform and Beta, quadrature otherwise.
    double raw_moment(int l) const;
    double mean() const { return raw_moment(1); }
    double variance() const;
    /// Inverse CDF. Closed form for Uniform, bracketed root find otherwise
    /// (absolute tolerance 1e-12 in x).
    double sample(double u) const;

private:
    MeasureSpec(Family family, double a, double b, double p1, double p2);

    Family family_;
    double a_, b_;
    double p1_, p2_;
    double norm_;  // truncation mass for the Gaussian family
};

/// Independent product of per-coordinate measures.
class ProductMeasure {
public:
    ProductMeasure() = default;
    explicit ProductMeasure(std::vector<MeasureSpec> components)
        : components_(std::move(components)) {}

    int dimension() const noexcept { return static_cast<int>(components_.size()); }
    const MeasureSpec& component(int k) const { return components_.at(k); }
    const std::vector<MeasureSpec>& components() const noexcept { return components_; }

    double density(std::span<const double> x) const;
    bool contains(std::span<const double> x) const;

private:
    std::vector<MeasureSpec> components_;
};

/// Composite quadrature rule with the probability density folded into the
/// weights: sum_i w_i g(x_i) ~ E[g(X)].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<double> breakpoints;  // element boundaries including a and b
};

/// Per-element Gauss-Legendre rule on [a, b] split at the given interior
/// breakpoints, with weights premultiplied by the density.
QuadratureRule measure_quadrature(const MeasureSpec& measure,
                                  std::span<const double> breakpoints,
                                  int points_per_element);

}  // namespace sdd
