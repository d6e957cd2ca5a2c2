#include "core/bench.hpp"

#include <cmath>
#include <stdexcept>

namespace sdd {

namespace {

// E[g(X)] and E[g(X)^2] for g = plateau_exp(., rate), X ~ Uniform[-1, 1]
double plateau_exp_mean(double rate) {
    if (rate == 0.0) return 1.0;
    return 0.5 + (1.0 - std::exp(-rate)) / (2.0 * rate);
}

double plateau_exp_second_moment(double rate) {
    if (rate == 0.0) return 1.0;
    return 0.5 + (1.0 - std::exp(-2.0 * rate)) / (4.0 * rate);
}

// moments of |X - t| and exp(s X) for X ~ Uniform[-1, 1]
double abs_shift_mean(double t) { return 0.5 * (1.0 + t * t); }
double abs_shift_var(double t) {
    const double m = abs_shift_mean(t);
    return (1.0 / 3.0 + t * t) - m * m;
}
double exp_mean(double s) { return s == 0.0 ? 1.0 : std::sinh(s) / s; }
double exp_var(double s) {
    const double m = exp_mean(s);
    return exp_mean(2.0 * s) - m * m;
}

BenchmarkFunction make_synthetic5d_impl() {
    BenchmarkFunction bench;
    bench.name = "synthetic5d";
    bench.dimension = 5;
    bench.evaluate = [](std::span<const double> x) {
        const double a = std::abs(x[0] + 0.3);
        const double b = std::abs(x[1]);
        const double c = std::abs(x[2] - 0.4);
        const double d = std::exp(-0.5 * x[3]);
        const double e = std::exp(0.7 * x[4]);
        return a + 0.8 * b + 0.6 * c + d + 0.4 * e + 0.25 * a * b;
    };
    bench.breakpoints = {{-0.3}, {0.0}, {0.4}, {}, {}};
    for (int k = 0; k < 5; ++k) bench.measures.push_back(MeasureSpec::uniform(-1.0, 1.0));

    const double ma = abs_shift_mean(-0.3), va = abs_shift_var(-0.3);
    const double mb = abs_shift_mean(0.0), vb = abs_shift_var(0.0);
    const double mc = abs_shift_mean(0.4), vc = abs_shift_var(0.4);
    const double md = exp_mean(-0.5), vd = exp_var(-0.5);
    const double me = exp_mean(0.7), ve = exp_var(0.7);
    bench.exact_mean = ma + 0.8 * mb + 0.6 * mc + md + 0.4 * me + 0.25 * ma * mb;
    // center each independent piece; the centered product is orthogonal to
    // the centered singles, so variances add with the interaction weights
    const double alpha1 = 1.0 + 0.25 * mb;
    const double alpha2 = 0.8 + 0.25 * ma;
    bench.exact_variance = alpha1 * alpha1 * va + alpha2 * alpha2 * vb + 0.36 * vc + vd +
                           0.16 * ve + 0.0625 * va * vb;
    return bench;
}

}  // namespace

double plateau_exp(double t, double rate) {
    return t <= 0.0 ? 1.0 : std::exp(-rate * t);
}

double example1(double x1, double x2) {
    if (x1 < -1.0 || x1 > 1.0 || x2 < -1.0 || x2 > 1.0)
        throw std::domain_error("example1: point outside [-1, 1]^2");
    const double g1 = plateau_exp(x1, 10.0);
    const double g2 = plateau_exp(x2, 10.0);
    return g1 + g2 + 0.2 * g1 * g2;
}

double example1_exact_mean(double rate, double interaction) {
    const double m1 = plateau_exp_mean(rate);
    return 2.0 * m1 + interaction * m1 * m1;
}

double example1_exact_variance(double rate, double interaction) {
    const double m1 = plateau_exp_mean(rate);
    const double v = plateau_exp_second_moment(rate) - m1 * m1;
    const double a = 1.0 + interaction * m1;
    return 2.0 * a * a * v + interaction * interaction * v * v;
}

BenchmarkFunction make_example1(double rate, double interaction) {
    BenchmarkFunction bench;
    bench.name = "example1";
    bench.dimension = 2;
    bench.evaluate = [rate, interaction](std::span<const double> x) {
        const double g1 = plateau_exp(x[0], rate);
        const double g2 = plateau_exp(x[1], rate);
        return g1 + g2 + interaction * g1 * g2;
    };
    bench.breakpoints = {{0.0}, {0.0}};
    bench.measures = {MeasureSpec::uniform(-1.0, 1.0), MeasureSpec::uniform(-1.0, 1.0)};
    bench.exact_mean = example1_exact_mean(rate, interaction);
    bench.exact_variance = example1_exact_variance(rate, interaction);
    return bench;
}

double relative_variance_error(double approx_var, double exact_var) {
    if (!(exact_var > 0.0))
        throw std::invalid_argument("relative_variance_error: exact variance must be > 0");
    return std::abs(exact_var - approx_var) / exact_var;
}

const BenchmarkFunction* find_benchmark(const std::string& name) {
    static const std::vector<BenchmarkFunction> registry = [] {
        std::vector<BenchmarkFunction> list;
        list.push_back(make_example1());
        BenchmarkFunction param = make_example1();
        param.name = "example1_param";
        list.push_back(std::move(param));
        list.push_back(make_synthetic5d_impl());
        return list;
    }();
    for (const BenchmarkFunction& b : registry)
        if (b.name == name) return &b;
    return nullptr;
}

std::vector<std::string> benchmark_names() {
    return {"example1", "example1_param", "synthetic5d"};
}

BenchmarkFunction make_synthetic5d() { return make_synthetic5d_impl(); }

}  // namespace sdd
