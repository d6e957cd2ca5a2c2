#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>

#include "core/measures.hpp"
#include "core/rng.hpp"
#include "support/oracles.hpp"

using sdd::Family;
using sdd::MeasureSpec;
using sdd::measure_quadrature;

namespace {

double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// the truncated Gaussian used throughout: pre-truncation mean -1/2, sd 1/2
MeasureSpec reference_tg() { return MeasureSpec::truncated_gaussian(-1.0, 1.0, -0.5, 0.5); }

}  // namespace

TEST_CASE("uniform density and moments") {
    const MeasureSpec m = MeasureSpec::uniform(-1.0, 1.0);
    CHECK(m.density(0.0) == 0.5);
    CHECK(m.raw_moment(0) == 1.0);
    CHECK(m.raw_moment(1) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(m.raw_moment(2) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(m.cdf(-1.0) == 0.0);
    CHECK(m.cdf(1.0) == 1.0);
    CHECK(m.cdf(0.5) == doctest::Approx(0.75));
    CHECK_THROWS_AS((void)m.density(1.5), std::domain_error);
}

TEST_CASE("beta density endpoints and moments") {
    const MeasureSpec m = MeasureSpec::beta(-1.0, 1.0, 3.0, 2.0);
    CHECK(m.density(1.0) == doctest::Approx(0.0).epsilon(1e-14));
    // closed-form mean on [-1, 1]: a + (b - a) alpha / (alpha + beta)
    CHECK(m.mean() == doctest::Approx(0.2).epsilon(1e-13));
    // density matches the normalized shifted-scaled form
    const double x = 0.3;
    const double expected = 12.0 * std::pow((x + 1) / 2, 2.0) * ((1 - x) / 2) / 2.0;
    CHECK(m.density(x) == doctest::Approx(expected).epsilon(1e-13));
    // moments against the Simpson oracle
    const double m3 = oracle::integrate([&](double t) { return t * t * t * m.density(t); }, -1, 1);
    CHECK(m.raw_moment(3) == doctest::Approx(m3).epsilon(1e-12));
}

TEST_CASE("truncated gaussian matches its closed form and normalizes") {
    const MeasureSpec m = reference_tg();
    // 2 phi(2x+1) / (Phi(3) - Phi(-1))
    const double denom = std_normal_cdf(3.0) - std_normal_cdf(-1.0);
    for (double x : {-0.9, -0.5, 0.0, 0.4, 1.0})
        CHECK(m.density(x) == doctest::Approx(2.0 * std_normal_pdf(2.0 * x + 1.0) / denom).epsilon(1e-14));
    const double mass = oracle::integrate([&](double t) { return m.density(t); }, -1, 1);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    // quadrature-backed moment agrees with the oracle
    const double m2 = oracle::integrate([&](double t) { return t * t * m.density(t); }, -1, 1);
    CHECK(m.raw_moment(2) == doctest::Approx(m2).epsilon(1e-12));
}

TEST_CASE("parameter validation happens at construction") {
    CHECK_THROWS_AS(MeasureSpec::uniform(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(MeasureSpec::uniform(2.0, -2.0), std::invalid_argument);
    CHECK_THROWS_AS(MeasureSpec::truncated_gaussian(-1, 1, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(MeasureSpec::truncated_gaussian(-1, 1, 0.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(MeasureSpec::beta(-1, 1, 0.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(MeasureSpec::beta(-1, 1, 2.0, -3.0), std::invalid_argument);
}

TEST_CASE("inverse cdf round trip") {
    const MeasureSpec uniform = MeasureSpec::uniform(-1.0, 1.0);
    CHECK(uniform.sample(0.75) == doctest::Approx(0.5).epsilon(1e-15));

    for (const MeasureSpec& m :
         {uniform, reference_tg(), MeasureSpec::beta(-1.0, 1.0, 3.0, 2.0)}) {
        CHECK(m.sample(0.0) == m.lower());
        CHECK(m.sample(1.0) == m.upper());
        for (int i = 1; i < 40; ++i) {
            const double u = i / 40.0;
            CHECK(std::abs(m.cdf(m.sample(u)) - u) <= 1e-10);
        }
    }
}

TEST_CASE("inverse cdf round trip over randomized parameters") {
    for (int trial = 0; trial < 30; ++trial) {
        const double a = -5.0 + 4.0 * sdd::rng::uniform01(11, 0, trial);
        const double b = a + 0.5 + 4.0 * sdd::rng::uniform01(11, 1, trial);
        MeasureSpec m = [&] {
            switch (trial % 3) {
                case 0: return MeasureSpec::uniform(a, b);
                case 1:
                    return MeasureSpec::truncated_gaussian(
                        a, b, a + (b - a) * sdd::rng::uniform01(11, 2, trial),
                        0.1 + 2.0 * sdd::rng::uniform01(11, 3, trial));
                default:
                    return MeasureSpec::beta(a, b, 0.5 + 5.0 * sdd::rng::uniform01(11, 4, trial),
                                             0.5 + 5.0 * sdd::rng::uniform01(11, 5, trial));
            }
        }();
        for (int i = 0; i <= 20; ++i) {
            const double u = i / 20.0;
            CHECK(std::abs(m.cdf(m.sample(u)) - u) <= 1e-10);
        }
    }
}

TEST_CASE("beta sampling reproduces the analytic mean") {
    const MeasureSpec m = MeasureSpec::beta(-1.0, 1.0, 3.0, 2.0);
    const int n = 200000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += m.sample(sdd::rng::uniform01(5, 0, i));
    const double mean = acc / n;
    // sd on [-1,1] is 0.4; allow 4 standard errors
    const double se = 0.4 / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(mean - 0.2) <= 4.0 * se);
}

TEST_CASE("measure quadrature integrates exactly where it should") {
    const MeasureSpec uniform = MeasureSpec::uniform(-1.0, 1.0);

    // 2-point Gauss is exact through cubic integrands
    const sdd::QuadratureRule rule2 = measure_quadrature(uniform, {}, 2);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule2.nodes.size(); ++i)
        acc += rule2.weights[i] * rule2.nodes[i] * rule2.nodes[i];
    CHECK(acc == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    // unit mass for every family
    for (const MeasureSpec& m :
         {uniform, reference_tg(), MeasureSpec::beta(-1.0, 1.0, 3.0, 2.0)}) {
        const sdd::QuadratureRule rule = measure_quadrature(m, {}, 50);
        double mass = 0.0;
        for (double w : rule.weights) mass += w;
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
        for (double x : rule.nodes) {
            CHECK(x > m.lower());
            CHECK(x < m.upper());
        }
    }

    // kinked integrand handled exactly once the breakpoint is declared
    const double breakpoint = 0.0;
    const sdd::QuadratureRule split = measure_quadrature(uniform, {&breakpoint, 1}, 20);
    double val = 0.0;
    for (std::size_t i = 0; i < split.nodes.size(); ++i)
        if (split.nodes[i] > 0.0) val += split.weights[i] * std::exp(-10.0 * split.nodes[i]);
    CHECK(val == doctest::Approx((1.0 - std::exp(-10.0)) / 20.0).epsilon(1e-12));
}

TEST_CASE("measure quadrature argument errors") {
    const MeasureSpec m = MeasureSpec::uniform(-1.0, 1.0);
    const double outside[] = {-2.0};
    CHECK_THROWS_AS((void)measure_quadrature(m, outside, 4), std::invalid_argument);
    const double unsorted[] = {0.5, -0.5};
    CHECK_THROWS_AS((void)measure_quadrature(m, unsorted, 4), std::invalid_argument);
    CHECK_THROWS_AS((void)measure_quadrature(m, {}, 0), std::invalid_argument);
}

TEST_CASE("quadrature reproduces polynomial raw moments") {
    for (const MeasureSpec& m :
         {MeasureSpec::uniform(-1.0, 1.0), MeasureSpec::beta(-1.0, 1.0, 3.0, 2.0)}) {
        const int points = 8;
        const sdd::QuadratureRule rule = measure_quadrature(m, {}, points);
        for (int l = 0; l <= 2 * points - 1 - 3; ++l) {
            double acc = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i)
                acc += rule.weights[i] * std::pow(rule.nodes[i], l);
            CHECK(std::abs(acc - m.raw_moment(l)) <= 1e-10);
        }
    }
}

TEST_CASE("product measure") {
    const sdd::ProductMeasure joint({MeasureSpec::uniform(-1, 1), MeasureSpec::uniform(0, 2)});
    CHECK(joint.dimension() == 2);
    const double x[] = {0.0, 1.0};
    CHECK(joint.density(x) == doctest::Approx(0.25));
    CHECK(joint.contains(x));
    const double outside[] = {0.0, 3.0};
    CHECK_FALSE(joint.contains(outside));
}
