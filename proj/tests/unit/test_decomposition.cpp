#include <doctest.h>

#include <cmath>
#include <numbers>

#include "core/bench.hpp"
#include "core/decomposition.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"
#include "support/oracles.hpp"

using namespace sdd;

namespace {

std::vector<OrthonormalBasis1D> uniform_bases(int dim, int degree, int elements,
                                              bool repeat_center = false) {
    std::map<int, int> mult;
    if (repeat_center) mult[elements / 2] = 2;
    std::vector<OrthonormalBasis1D> bases;
    for (int k = 0; k < dim; ++k)
        bases.emplace_back(KnotSequence::open_uniform(-1.0, 1.0, degree, elements, mult),
                           MeasureSpec::uniform(-1.0, 1.0));
    return bases;
}

double example1_fn(std::span<const double> x) { return example1(x[0], x[1]); }

QuadratureFitOptions example1_options(int points = 20) {
    QuadratureFitOptions opts;
    opts.breakpoints = {{0.0}, {0.0}};
    opts.points_per_element = points;
    return opts;
}

}  // namespace

TEST_CASE("term enumeration counts") {
    const std::vector<int> n15(15, 5);
    CHECK(term_count(n15, 1) == 61);
    CHECK(term_count(n15, 2) == 1741);
    CHECK(enumerate_terms(n15, 1).size() == 60);
    CHECK(enumerate_terms(n15, 2).size() == 1740);

    const std::vector<int> n2{3, 3};
    const std::vector<Term> terms = enumerate_terms(n2, 2);
    CHECK(terms.size() == 8);
    CHECK(term_count(n2, 2) == 9);  // completes the 3*3 tensor dimension
}

TEST_CASE("term ordering is lexicographic by size, subset, then index") {
    const std::vector<int> counts{3, 4};
    const std::vector<Term> terms = enumerate_terms(counts, 2);
    REQUIRE(terms.size() == 2 + 3 + 6);
    CHECK(terms[0].coords == std::vector<int>{0});
    CHECK(terms[0].indices == std::vector<int>{1});
    CHECK(terms[1].indices == std::vector<int>{2});
    CHECK(terms[2].coords == std::vector<int>{1});
    CHECK(terms[5].coords == std::vector<int>{0, 1});
    CHECK(terms[5].indices == std::vector<int>{1, 1});
    CHECK(terms[6].indices == std::vector<int>{1, 2});
    CHECK(terms.back().indices == std::vector<int>{2, 3});
}

TEST_CASE("completeness identity for full interaction order") {
    for (int trial = 0; trial < 60; ++trial) {
        const int dim = 1 + static_cast<int>(sdd::rng::uniform01(17, 0, trial) * 4) % 4;
        std::vector<int> counts(dim);
        std::int64_t prod = 1;
        for (int k = 0; k < dim; ++k) {
            counts[k] = 2 + static_cast<int>(sdd::rng::uniform01(17, k + 1, trial) * 5) % 5;
            prod *= counts[k];
        }
        CHECK(term_count(counts, dim) == prod);
    }
}

TEST_CASE("term enumeration argument errors") {
    const std::vector<int> counts{3, 3};
    CHECK_THROWS_AS((void)enumerate_terms(counts, 3), std::invalid_argument);
    CHECK_THROWS_AS((void)enumerate_terms(counts, 0), std::invalid_argument);
    const std::vector<int> degenerate{3, 1};
    CHECK_THROWS_AS((void)enumerate_terms(degenerate, 1), std::invalid_argument);
}

TEST_CASE("multivariate basis moments") {
    std::vector<OrthonormalBasis1D> bases = uniform_bases(2, 1, 2);
    std::vector<int> counts{bases[0].size(), bases[1].size()};
    std::vector<Term> terms = enumerate_terms(counts, 2);
    SddExpansion e(bases, 2, 0.0, terms);

    // tensor verification rule
    const std::vector<double>& dk = bases[0].knots().distinct_knots();
    const QuadratureRule rule =
        measure_quadrature(bases[0].measure(), std::span(dk).subspan(1, dk.size() - 2), 30);

    for (std::size_t a = 0; a < terms.size(); ++a) {
        double mean = 0.0;
        std::vector<double> cross(terms.size(), 0.0);
        for (std::size_t s0 = 0; s0 < rule.nodes.size(); ++s0) {
            for (std::size_t s1 = 0; s1 < rule.nodes.size(); ++s1) {
                const double w = rule.weights[s0] * rule.weights[s1];
                const std::array<double, 2> x{rule.nodes[s0], rule.nodes[s1]};
                const double va = e.basis_product(terms[a], x);
                mean += w * va;
                for (std::size_t b = 0; b < terms.size(); ++b)
                    cross[b] += w * va * e.basis_product(terms[b], x);
            }
        }
        CHECK(std::abs(mean) <= 1e-8);
        for (std::size_t b = 0; b < terms.size(); ++b)
            CHECK(std::abs(cross[b] - (a == b ? 1.0 : 0.0)) <= 1e-8);
    }

    // single-coordinate products equal the univariate element
    const std::array<double, 2> x{0.3, -0.7};
    CHECK(e.basis_product(terms[0], x) ==
          doctest::Approx(bases[0].eval(0.3)[1]).epsilon(1e-14));
}

TEST_CASE("fitting a constant recovers only the constant") {
    std::vector<OrthonormalBasis1D> bases = uniform_bases(2, 1, 4);
    const SddExpansion e = fit_quadrature([](std::span<const double>) { return 3.25; },
                                          std::move(bases), 2, example1_options());
    CHECK(e.constant() == doctest::Approx(3.25).epsilon(1e-14));
    for (const Term& t : e.terms()) CHECK(std::abs(t.coeff) <= 1e-12);
    CHECK(e.variance() <= 1e-20);
}

TEST_CASE("fitting a basis product recovers a unit coefficient") {
    std::vector<OrthonormalBasis1D> bases = uniform_bases(2, 2, 3);
    std::vector<int> counts{bases[0].size(), bases[1].size()};
    std::vector<Term> terms = enumerate_terms(counts, 2);
    const std::size_t target = 7;
    SddExpansion probe(bases, 2, 0.0, terms);

    const SddExpansion fitted = fit_quadrature(
        [&](std::span<const double> x) { return probe.basis_product(terms[target], x); }, bases, 2,
        example1_options());
    CHECK(std::abs(fitted.constant()) <= 1e-10);
    for (std::size_t t = 0; t < fitted.terms().size(); ++t)
        CHECK(std::abs(fitted.terms()[t].coeff - (t == target ? 1.0 : 0.0)) <= 1e-10);
}

TEST_CASE("example1 constant term matches the analytic mean") {
    // closed form, cross-checked against an independent Simpson oracle
    const double m1 = 0.5 + (1.0 - std::exp(-10.0)) / 20.0;
    const double m1_oracle = 0.5 * oracle::integrate_piecewise(
                                       [](double t) { return plateau_exp(t, 10.0); }, -1.0, 1.0,
                                       std::vector<double>{0.0}, 5000);
    REQUIRE(m1 == doctest::Approx(m1_oracle).epsilon(1e-13));
    const double y0_expected = 2.0 * m1 + m1 * m1 / 5.0;

    const SddExpansion e =
        fit_quadrature(example1_fn, uniform_bases(2, 1, 20), 2, example1_options());
    CHECK(e.constant() == doctest::Approx(y0_expected).epsilon(1e-12));
    CHECK(e.mean() == e.constant());
}

TEST_CASE("example1 variance error for the linear mesh") {
    const SddExpansion e =
        fit_quadrature(example1_fn, uniform_bases(2, 1, 20), 2, example1_options());
    const double err = relative_variance_error(e.variance(), example1_exact_variance());
    CHECK(err == doctest::Approx(2.88408e-4).epsilon(0.01));
}

TEST_CASE("evaluation consistency") {
    std::vector<OrthonormalBasis1D> bases = uniform_bases(2, 1, 2);
    std::vector<int> counts{bases[0].size(), bases[1].size()};

    // constant-only model
    const SddExpansion constant(bases, 1, 4.5, {});
    const std::array<double, 2> x{0.2, -0.3};
    CHECK(constant.evaluate(x) == 4.5);

    // single-term model agrees with the basis product
    std::vector<Term> one{Term{{1}, {2}, 0.0}};
    one[0].coeff = 0.7;
    const SddExpansion single(bases, 1, 1.0, one);
    CHECK(single.evaluate(x) ==
          doctest::Approx(1.0 + 0.7 * single.basis_product(one[0], x)).epsilon(1e-14));

    const std::array<double, 2> outside{0.2, 1.5};
    CHECK_THROWS_AS((void)single.evaluate(outside), std::domain_error);
}

TEST_CASE("surrogate tracks the exact function pointwise") {
    const SddExpansion e =
        fit_quadrature(example1_fn, uniform_bases(2, 2, 20, true), 2, example1_options());
    const std::array<double, 2> x{0.5, -0.5};
    const double exact = example1(0.5, -0.5);
    CHECK(std::abs(e.evaluate(x) - exact) <= 1e-2);
}

TEST_CASE("variance identities") {
    std::vector<OrthonormalBasis1D> bases = uniform_bases(2, 1, 2);
    std::vector<Term> one{Term{{0}, {1}, 0.3}};
    const SddExpansion single(bases, 2, 9.0, one);
    CHECK(single.variance() == doctest::Approx(0.09).epsilon(1e-15));
    const auto parts = single.variance_by_subset();
    CHECK(parts.at({0}) == doctest::Approx(0.09));

    const SddExpansion e =
        fit_quadrature(example1_fn, uniform_bases(2, 1, 8), 2, example1_options());
    double sum = 0.0;
    for (const auto& [subset, v] : e.variance_by_subset()) sum += v;
    CHECK(sum == doctest::Approx(e.variance()).epsilon(1e-14));
}

TEST_CASE("mixed measures match independent one-dimensional integration") {
    std::vector<OrthonormalBasis1D> bases;
    bases.emplace_back(KnotSequence::open_uniform(-1, 1, 2, 10),
                       MeasureSpec::beta(-1, 1, 3.0, 2.0));
    bases.emplace_back(KnotSequence::open_uniform(-1, 1, 2, 10),
                       MeasureSpec::truncated_gaussian(-1, 1, -0.5, 0.5));
    const SddExpansion e = fit_quadrature(example1_fn, bases, 2, example1_options(24));

    // densities written out directly so the oracle shares nothing with the
    // library path
    auto beta_pdf = [](double x) { return 12.0 * std::pow((x + 1) / 2, 2.0) * ((1 - x) / 2) / 2.0; };
    const double tg_norm = 0.5 * (std::erfc(-3.0 / std::numbers::sqrt2) -
                                  std::erfc(1.0 / std::numbers::sqrt2));
    auto tg_pdf = [&](double x) {
        return 2.0 * std::exp(-0.5 * (2 * x + 1) * (2 * x + 1)) /
               std::sqrt(2.0 * std::numbers::pi) / tg_norm;
    };
    const std::vector<double> kink{0.0};
    auto moment = [&](auto pdf, int power) {
        return oracle::integrate_piecewise(
            [&](double t) { return std::pow(plateau_exp(t, 10.0), power) * pdf(t); }, -1.0, 1.0,
            kink, 4000);
    };
    const double mb = moment(beta_pdf, 1), mt = moment(tg_pdf, 1);
    const double vb = moment(beta_pdf, 2) - mb * mb, vt = moment(tg_pdf, 2) - mt * mt;
    const double mean = mb + mt + 0.2 * mb * mt;
    const double var = (1 + 0.2 * mt) * (1 + 0.2 * mt) * vb +
                       (1 + 0.2 * mb) * (1 + 0.2 * mb) * vt + 0.04 * vb * vt;

    CHECK(e.mean() == doctest::Approx(mean).epsilon(1e-12));
    CHECK(e.variance() <= var + 1e-12);
    CHECK(e.variance() == doctest::Approx(var).epsilon(0.03));
}

TEST_CASE("variance grows with interaction order and stays below the true variance") {
    const SddExpansion univariate =
        fit_quadrature(example1_fn, uniform_bases(2, 1, 12), 1, example1_options());
    const SddExpansion bivariate =
        fit_quadrature(example1_fn, uniform_bases(2, 1, 12), 2, example1_options());
    CHECK(univariate.variance() <= bivariate.variance() + 1e-15);
    CHECK(bivariate.variance() <= example1_exact_variance() + 1e-12);

    // Monte Carlo variance of the exact function bounds the surrogate too
    const int n = 100000;
    std::vector<double> ys(n);
    for (int i = 0; i < n; ++i) {
        const double x1 = -1.0 + 2.0 * rng::uniform01(23, 0, i);
        const double x2 = -1.0 + 2.0 * rng::uniform01(23, 1, i);
        ys[i] = example1(x1, x2);
    }
    const double mc_var = oracle::sample_variance(ys);
    const double se = oracle::variance_standard_error(ys);
    CHECK(bivariate.variance() <= mc_var + 3.0 * se);
}

TEST_CASE("residual is orthogonal to every retained term") {
    std::vector<OrthonormalBasis1D> bases = uniform_bases(2, 1, 6);
    const SddExpansion e = fit_quadrature(example1_fn, bases, 2, example1_options());

    const std::vector<double>& dk = bases[0].knots().distinct_knots();
    const QuadratureRule rule =
        measure_quadrature(bases[0].measure(), std::span(dk).subspan(1, dk.size() - 2), 30);
    for (const Term& t : e.terms()) {
        double acc = 0.0;
        for (std::size_t s0 = 0; s0 < rule.nodes.size(); ++s0)
            for (std::size_t s1 = 0; s1 < rule.nodes.size(); ++s1) {
                const std::array<double, 2> x{rule.nodes[s0], rule.nodes[s1]};
                const double w = rule.weights[s0] * rule.weights[s1];
                acc += w * (example1_fn(x) - e.evaluate(x)) * e.basis_product(t, x);
            }
        CHECK(std::abs(acc) <= 1e-7);
    }
}

TEST_CASE("declared breakpoints recover accuracy when kinks miss the knots") {
    // five elements put no knot at the kink locus; the declared breakpoint
    // splits the quadrature there, the undeclared variant only degrades
    QuadratureFitOptions declared;
    declared.breakpoints = {{0.0}, {0.0}};
    declared.points_per_element = 20;
    QuadratureFitOptions undeclared;
    undeclared.points_per_element = 20;

    const SddExpansion with_decl =
        fit_quadrature(example1_fn, uniform_bases(2, 1, 5), 2, declared);
    const SddExpansion without_decl =
        fit_quadrature(example1_fn, uniform_bases(2, 1, 5), 2, undeclared);

    // identical spline space, so the true projection is the same; the
    // declared version integrates it essentially exactly
    const double exact = example1_exact_variance();
    CHECK(with_decl.variance() < exact);
    CHECK(std::abs(with_decl.constant() - example1_exact_mean()) <= 1e-10);
    // the undeclared fit still runs and lands in the neighborhood
    CHECK(std::abs(without_decl.constant() - example1_exact_mean()) <= 1e-3);
    CHECK(std::abs(without_decl.constant() - example1_exact_mean()) >
          std::abs(with_decl.constant() - example1_exact_mean()));
}

TEST_CASE("tensor quadrature is rejected beyond six dimensions") {
    std::vector<OrthonormalBasis1D> bases = uniform_bases(7, 1, 1);
    CHECK_THROWS_AS((void)fit_quadrature([](std::span<const double>) { return 0.0; },
                                         std::move(bases), 1, QuadratureFitOptions{}),
                    UnsupportedError);
}

TEST_CASE("regression recovers in-span targets") {
    std::vector<OrthonormalBasis1D> bases = uniform_bases(2, 1, 4);
    const OrthonormalBasis1D& b1 = bases[1];
    auto target = [&](std::span<const double> x) { return 3.0 + 2.0 * b1.eval(x[1])[2]; };

    const int count = 200;
    std::vector<SurrogateSample> samples(count);
    for (int r = 0; r < count; ++r) {
        samples[r].x = {-1.0 + 2.0 * rng::uniform01(31, 0, r), -1.0 + 2.0 * rng::uniform01(31, 1, r)};
        samples[r].y = target(samples[r].x);
    }
    RegressionInfo info;
    const SddExpansion e = fit_regression(samples, bases, 2, RegressionOptions{}, &info);
    CHECK(info.condition_estimate < 1e10);
    CHECK(e.constant() == doctest::Approx(3.0).epsilon(1e-8));
    for (const Term& t : e.terms()) {
        const double expected = (t.coords == std::vector<int>{1} && t.indices == std::vector<int>{2})
                                    ? 2.0
                                    : 0.0;
        CHECK(std::abs(t.coeff - expected) <= 1e-8);
    }
}

TEST_CASE("regression is invariant under sample duplication") {
    std::vector<OrthonormalBasis1D> bases = uniform_bases(2, 1, 2);
    const int count = 60;
    std::vector<SurrogateSample> samples(count);
    for (int r = 0; r < count; ++r) {
        samples[r].x = {-1.0 + 2.0 * rng::uniform01(37, 0, r), -1.0 + 2.0 * rng::uniform01(37, 1, r)};
        samples[r].y = example1(samples[r].x[0], samples[r].x[1]);
    }
    std::vector<SurrogateSample> doubled = samples;
    doubled.insert(doubled.end(), samples.begin(), samples.end());

    const SddExpansion a = fit_regression(samples, bases, 2);
    const SddExpansion b = fit_regression(doubled, bases, 2);
    CHECK(a.constant() == doctest::Approx(b.constant()).epsilon(1e-12));
    for (std::size_t t = 0; t < a.terms().size(); ++t)
        CHECK(a.terms()[t].coeff == doctest::Approx(b.terms()[t].coeff).epsilon(1e-11));
}

TEST_CASE("regression matches quadrature on example1") {
    std::vector<OrthonormalBasis1D> bases = uniform_bases(2, 1, 20);
    const SddExpansion quad = fit_quadrature(example1_fn, bases, 2, example1_options());

    const int count = 3000;
    ProductMeasure joint({MeasureSpec::uniform(-1, 1), MeasureSpec::uniform(-1, 1)});
    const std::vector<double> inputs = sample_inputs(joint, count, 2024);
    std::vector<SurrogateSample> samples(count);
    for (int r = 0; r < count; ++r) {
        samples[r].x = {inputs[2 * r], inputs[2 * r + 1]};
        samples[r].y = example1(samples[r].x[0], samples[r].x[1]);
    }
    const SddExpansion reg = fit_regression(samples, bases, 2);
    CHECK(std::abs(reg.variance() - quad.variance()) / quad.variance() <= 0.05);
}

TEST_CASE("ridge regularization shrinks the coefficients") {
    std::vector<OrthonormalBasis1D> bases = uniform_bases(2, 1, 2);
    const int count = 120;
    std::vector<SurrogateSample> samples(count);
    for (int r = 0; r < count; ++r) {
        samples[r].x = {-1.0 + 2.0 * rng::uniform01(43, 0, r), -1.0 + 2.0 * rng::uniform01(43, 1, r)};
        samples[r].y = example1(samples[r].x[0], samples[r].x[1]);
    }
    const SddExpansion plain = fit_regression(samples, bases, 2);
    RegressionOptions tiny;
    tiny.ridge = 1e-10;
    const SddExpansion near_plain = fit_regression(samples, bases, 2, tiny);
    RegressionOptions heavy;
    heavy.ridge = 200.0;
    const SddExpansion shrunk = fit_regression(samples, bases, 2, heavy);

    double plain_norm = 0.0, near_norm = 0.0, shrunk_norm = 0.0, diff = 0.0;
    for (std::size_t t = 0; t < plain.terms().size(); ++t) {
        plain_norm += plain.terms()[t].coeff * plain.terms()[t].coeff;
        near_norm += near_plain.terms()[t].coeff * near_plain.terms()[t].coeff;
        shrunk_norm += shrunk.terms()[t].coeff * shrunk.terms()[t].coeff;
        diff = std::max(diff, std::abs(plain.terms()[t].coeff - near_plain.terms()[t].coeff));
    }
    CHECK(diff <= 1e-8);
    CHECK(near_norm == doctest::Approx(plain_norm).epsilon(1e-8));
    CHECK(shrunk_norm < 0.5 * plain_norm);
}

TEST_CASE("regression sample-count policy") {
    std::vector<OrthonormalBasis1D> bases = uniform_bases(2, 1, 2);  // 9 coefficients
    std::vector<SurrogateSample> samples(10);
    for (int r = 0; r < 10; ++r) {
        samples[r].x = {-1.0 + 2.0 * rng::uniform01(41, 0, r), -1.0 + 2.0 * rng::uniform01(41, 1, r)};
        samples[r].y = 1.0;
    }
    // 10 >= 9 coefficients but below the 2x default policy
    CHECK_THROWS_AS((void)fit_regression(samples, bases, 2), std::invalid_argument);
    RegressionOptions relaxed;
    relaxed.min_oversampling = 1.0;
    CHECK_NOTHROW((void)fit_regression(samples, bases, 2, relaxed));

    samples.resize(5);  // strictly underdetermined
    CHECK_THROWS_AS((void)fit_regression(samples, bases, 2, relaxed), std::invalid_argument);
}

TEST_CASE("surrogate sampling is deterministic and sorted") {
    std::vector<OrthonormalBasis1D> bases = uniform_bases(2, 1, 4);
    const SddExpansion e = fit_quadrature(example1_fn, bases, 2, example1_options());
    const std::vector<double> a = sample_surrogate(e, 5000, 99);
    const std::vector<double> b = sample_surrogate(e, 5000, 99, 3);
    CHECK(a == b);
    CHECK(std::is_sorted(a.begin(), a.end()));

    const SddExpansion constant(bases, 1, 2.5, {});
    const std::vector<double> c = sample_surrogate(constant, 100, 7);
    for (double v : c) CHECK(v == 2.5);
}

TEST_CASE("surrogate sample statistics agree with the coefficient formulas") {
    const SddExpansion e =
        fit_quadrature(example1_fn, uniform_bases(2, 1, 12), 2, example1_options());
    const std::vector<double> samples = sample_surrogate(e, 200000, 31);
    const double mean = oracle::sample_mean(samples);
    const double var = oracle::sample_variance(samples);
    const double mean_se = std::sqrt(var / samples.size());
    const double var_se = oracle::variance_standard_error(samples);
    CHECK(std::abs(mean - e.mean()) <= 4.0 * mean_se);
    CHECK(std::abs(var - e.variance()) <= 4.0 * var_se);
}

TEST_CASE("quadrature fit is independent of the thread count") {
    QuadratureFitOptions serial = example1_options();
    serial.threads = 1;
    QuadratureFitOptions parallel = example1_options();
    parallel.threads = 4;
    const SddExpansion a = fit_quadrature(example1_fn, uniform_bases(2, 2, 6), 2, serial);
    const SddExpansion b = fit_quadrature(example1_fn, uniform_bases(2, 2, 6), 2, parallel);
    CHECK(a.constant() == b.constant());
    for (std::size_t t = 0; t < a.terms().size(); ++t)
        CHECK(a.terms()[t].coeff == b.terms()[t].coeff);
}
