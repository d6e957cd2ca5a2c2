#include "core/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>

#include "core/gauss.hpp"

namespace sdd {

namespace {

double std_normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double std_normal_cdf(double z) {
    return 0.5 * std::erfc(-z * std::numbers::sqrt2 / 2.0);
}

}  // namespace

std::string family_name(Family family) {
    switch (family) {
        case Family::Uniform: return "uniform";
        case Family::TruncatedGaussian: return "truncated_gaussian";
        case Family::Beta: return "beta";
    }
    throw std::logic_error("family_name: unreachable");
}

Family family_from_name(const std::string& name) {
    if (name == "uniform") return Family::Uniform;
    if (name == "truncated_gaussian") return Family::TruncatedGaussian;
    if (name == "beta") return Family::Beta;
    throw std::invalid_argument("unknown measure family: " + name);
}

MeasureSpec::MeasureSpec(Family family, double a, double b, double p1, double p2)
    : family_(family), a_(a), b_(b), p1_(p1), p2_(p2), norm_(1.0) {
    if (!(std::isfinite(a) && std::isfinite(b)))
        throw std::invalid_argument("measure: support bounds must be finite");
    if (!(b > a)) throw std::invalid_argument("measure: support requires b > a");
    if (family_ == Family::TruncatedGaussian) {
        if (!(p2 > 0.0)) throw std::invalid_argument("truncated_gaussian: stddev must be > 0");
        norm_ = std_normal_cdf((b_ - p1_) / p2_) - std_normal_cdf((a_ - p1_) / p2_);
        if (!(norm_ > 0.0))
            throw std::invalid_argument("truncated_gaussian: no probability mass on [a, b]");
    } else if (family_ == Family::Beta) {
        if (!(p1 > 0.0 && p2 > 0.0))
            throw std::invalid_argument("beta: shape parameters must be > 0");
    }
}

MeasureSpec MeasureSpec::uniform(double a, double b) {
    return MeasureSpec(Family::Uniform, a, b, 0.0, 0.0);
}

MeasureSpec MeasureSpec::truncated_gaussian(double a, double b, double mean, double stddev) {
    return MeasureSpec(Family::TruncatedGaussian, a, b, mean, stddev);
}

MeasureSpec MeasureSpec::beta(double a, double b, double alpha, double beta) {
    return MeasureSpec(Family::Beta, a, b, alpha, beta);
}

double MeasureSpec::density(double x) const {
    if (x < a_ || x > b_) throw std::domain_error("density: x outside the support");
    switch (family_) {
        case Family::Uniform:
            return 1.0 / width();
        case Family::TruncatedGaussian:
            return std_normal_pdf((x - p1_) / p2_) / (p2_ * norm_);
        case Family::Beta: {
            const double t = (x - a_) / width();
            const double lb = boost::math::beta(p1_, p2_);
            return std::pow(t, p1_ - 1.0) * std::pow(1.0 - t, p2_ - 1.0) / (lb * width());
        }
    }
    throw std::logic_error("density: unreachable");
}

double MeasureSpec::cdf(double x) const {
    if (x <= a_) return 0.0;
    if (x >= b_) return 1.0;
    switch (family_) {
        case Family::Uniform:
            return (x - a_) / width();
        case Family::TruncatedGaussian:
            return (std_normal_cdf((x - p1_) / p2_) - std_normal_cdf((a_ - p1_) / p2_)) / norm_;
        case Family::Beta:
            return boost::math::ibeta(p1_, p2_, (x - a_) / width());
    }
    throw std::logic_error("cdf: unreachable");
}

double MeasureSpec::raw_moment(int l) const {
    if (l < 0) throw std::invalid_argument("raw_moment: order must be >= 0");
    if (l == 0) return 1.0;
    switch (family_) {
        case Family::Uniform: {
            // (b^{l+1} - a^{l+1}) / ((l+1)(b-a)) via a cancellation-free sum
            double acc = 0.0;
            for (int j = 0; j <= l; ++j) acc += std::pow(a_, j) * std::pow(b_, l - j);
            return acc / (l + 1);
        }
        case Family::Beta: {
            // E[(a + w T)^l] with T ~ Beta(alpha, beta) on [0, 1]
            const double w = width();
            double acc = 0.0;
            for (int j = 0; j <= l; ++j) {
                double binom = 1.0, tmom = 1.0;
                for (int i = 0; i < j; ++i) {
                    binom *= static_cast<double>(l - i) / (i + 1);
                    tmom *= (p1_ + i) / (p1_ + p2_ + i);
                }
                acc += binom * std::pow(a_, l - j) * std::pow(w, j) * tmom;
            }
            return acc;
        }
        case Family::TruncatedGaussian: {
            const QuadratureRule rule = measure_quadrature(*this, {}, std::max(32, l + 8));
            double acc = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i)
                acc += rule.weights[i] * std::pow(rule.nodes[i], l);
            return acc;
        }
    }
    throw std::logic_error("raw_moment: unreachable");
}

double MeasureSpec::variance() const {
    const double m1 = raw_moment(1);
    return raw_moment(2) - m1 * m1;
}

double MeasureSpec::sample(double u) const {
    if (u < 0.0 || u > 1.0) throw std::domain_error("sample: u must lie in [0, 1]");
    if (u == 0.0) return a_;
    if (u == 1.0) return b_;
    if (family_ == Family::Uniform) return a_ + u * width();

    // Bisection on the monotone CDF, then safeguarded Newton refinement.
    double lo = a_, hi = b_;
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (cdf(mid) < u ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 3; ++it) {
        const double f = density(x);
        if (!(f > 0.0)) break;
        const double step = (cdf(x) - u) / f;
        const double next = x - step;
        if (next <= lo || next >= hi) break;
        x = next;
        if (std::abs(step) < 1e-14) break;
    }
    return x;
}

double ProductMeasure::density(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dimension())
        throw std::invalid_argument("joint density: dimension mismatch");
    double prod = 1.0;
    for (int k = 0; k < dimension(); ++k) prod *= components_[k].density(x[k]);
    return prod;
}

bool ProductMeasure::contains(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dimension()) return false;
    for (int k = 0; k < dimension(); ++k)
        if (x[k] < components_[k].lower() || x[k] > components_[k].upper()) return false;
    return true;
}

QuadratureRule measure_quadrature(const MeasureSpec& measure,
                                  std::span<const double> breakpoints,
                                  int points_per_element) {
    if (points_per_element < 1)
        throw std::invalid_argument("measure_quadrature: points_per_element must be >= 1");
    std::vector<double> breaks;
    breaks.reserve(breakpoints.size() + 2);
    breaks.push_back(measure.lower());
    double prev = measure.lower();
    for (double s : breakpoints) {
        if (s <= measure.lower() || s >= measure.upper())
            throw std::invalid_argument("measure_quadrature: breakpoints must lie strictly inside (a, b)");
        if (s < prev) throw std::invalid_argument("measure_quadrature: breakpoints must be sorted");
        if (s > prev) breaks.push_back(s);
        prev = s;
    }
    breaks.push_back(measure.upper());

    const CompositeRule base = composite_gauss(breaks, points_per_element);
    QuadratureRule rule;
    rule.nodes = base.nodes;
    rule.weights.resize(base.weights.size());
    for (std::size_t i = 0; i < base.nodes.size(); ++i)
        rule.weights[i] = base.weights[i] * measure.density(base.nodes[i]);
    rule.breakpoints = std::move(breaks);
    return rule;
}

}  // namespace sdd
