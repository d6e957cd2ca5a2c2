#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/measures.hpp"

namespace sdd {

/// A benchmark output function together with its reference input law,
/// declared nonsmooth loci, and analytic statistics where available.
struct BenchmarkFunction {
    std::string name;
    int dimension = 0;
    std::function<double(std::span<const double>)> evaluate;
    std::vector<std::vector<double>> breakpoints;  // per coordinate, strictly interior
    std::vector<MeasureSpec> measures;
    std::optional<double> exact_mean;
    std::optional<double> exact_variance;
};

/// Registry lookup by name ("example1", "example1_param", "synthetic5d");
/// nullptr when unknown.
const BenchmarkFunction* find_benchmark(const std::string& name);
std::vector<std::string> benchmark_names();

/// Plateau-then-exponential-decay piece: 1 for t <= 0, exp(-rate * t) for
/// t > 0. Continuous with a kink at the origin.
double plateau_exp(double t, double rate);

/// Two-variable combination of plateau_exp pieces on [-1, 1]^2 with a
/// weighted product interaction.
double example1(double x1, double x2);

/// Family generalizing example1: y = g(x1) + g(x2) + w g(x1) g(x2) with
/// g = plateau_exp(., rate), uniform inputs on [-1, 1].
BenchmarkFunction make_example1(double rate = 10.0, double interaction = 0.2);

double example1_exact_mean(double rate = 10.0, double interaction = 0.2);
double example1_exact_variance(double rate = 10.0, double interaction = 0.2);

/// Five-dimensional mix of shifted absolute values and exponentials with a
/// pairwise interaction; closed-form mean and variance.
BenchmarkFunction make_synthetic5d();

/// |exact - approx| / exact. Requires exact > 0.
double relative_variance_error(double approx_var, double exact_var);

}  // namespace sdd
