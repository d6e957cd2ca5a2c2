#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "core/bspline.hpp"
#include "core/errors.hpp"
#include "core/orthobasis.hpp"
#include "core/rng.hpp"

using sdd::KnotSequence;
using sdd::MeasureSpec;
using sdd::OrthonormalBasis1D;
using sdd::auxiliary_vector;
using sdd::moment_matrix;

namespace {

KnotSequence quadratic_reference() { return KnotSequence::open_uniform(-1.0, 1.0, 2, 4); }

std::vector<MeasureSpec> reference_measures() {
    return {MeasureSpec::uniform(-1.0, 1.0),
            MeasureSpec::truncated_gaussian(-1.0, 1.0, -0.5, 0.5),
            MeasureSpec::beta(-1.0, 1.0, 3.0, 2.0)};
}

// verification quadrature, split at knots, much finer than assembly
sdd::QuadratureRule verification_rule(const KnotSequence& ks, const MeasureSpec& m) {
    const std::vector<double>& dk = ks.distinct_knots();
    return sdd::measure_quadrature(m, std::span(dk).subspan(1, dk.size() - 2), 50);
}

}  // namespace

TEST_CASE("auxiliary vector replaces the first element with one") {
    const KnotSequence ks = quadratic_reference();
    const std::vector<double> at_a = auxiliary_vector(ks, -1.0);
    CHECK(at_a[0] == 1.0);
    for (int i = 1; i < 6; ++i) CHECK(at_a[i] == 0.0);

    const std::vector<double> aux = auxiliary_vector(ks, 0.25);
    const std::vector<double> raw = sdd::eval_all(ks, 0.25);
    double sum = 0.0;
    for (double v : aux) sum += v;
    // B_1 vanishes at 0.25, so the sum is 1 + (1 - 0) = 2
    CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
    for (int i = 1; i < 6; ++i) CHECK(aux[i] == raw[i]);
}

TEST_CASE("moment matrix of the two-element indicator basis") {
    const KnotSequence ks = KnotSequence::open_uniform(-1.0, 1.0, 0, 2);
    const Eigen::MatrixXd g = moment_matrix(ks, MeasureSpec::uniform(-1.0, 1.0));
    REQUIRE(g.rows() == 2);
    CHECK(g(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g(0, 1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(g(1, 0) == g(0, 1));  // mirrored, exactly
    CHECK(g(1, 1) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("moment matrix corner element is one for any measure") {
    for (const MeasureSpec& m : reference_measures()) {
        const Eigen::MatrixXd g = moment_matrix(quadratic_reference(), m);
        CHECK(g(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((g - g.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("hand-whitened two-element basis") {
    const KnotSequence ks = KnotSequence::open_uniform(-1.0, 1.0, 0, 2);
    const OrthonormalBasis1D basis(ks, MeasureSpec::uniform(-1.0, 1.0));
    const std::vector<double> left = basis.eval(-0.5);
    CHECK(left[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(left[1] == doctest::Approx(-1.0).epsilon(1e-13));
    const std::vector<double> right = basis.eval(0.5);
    CHECK(right[1] == doctest::Approx(1.0).epsilon(1e-13));

    const sdd::QuadratureRule rule = verification_rule(ks, basis.measure());
    double second = 0.0;
    std::vector<double> psi(2);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        basis.eval(rule.nodes[i], psi);
        second += rule.weights[i] * psi[1] * psi[1];
    }
    CHECK(second == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("orthonormality for the three reference measures") {
    for (const MeasureSpec& m : reference_measures()) {
        const OrthonormalBasis1D basis(quadratic_reference(), m);
        const int n = basis.size();
        const sdd::QuadratureRule rule = verification_rule(basis.knots(), m);
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
        std::vector<double> psi(n);
        for (std::size_t s = 0; s < rule.nodes.size(); ++s) {
            basis.eval(rule.nodes[s], psi);
            for (int i = 0; i < n; ++i) {
                mean(i) += rule.weights[s] * psi[i];
                for (int j = 0; j < n; ++j) gram(i, j) += rule.weights[s] * psi[i] * psi[j];
            }
        }
        CHECK((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK(std::abs(mean(0) - 1.0) <= 1e-10);
        for (int i = 1; i < n; ++i) CHECK(std::abs(mean(i)) <= 1e-10);
    }
}

TEST_CASE("first orthonormal element is identically one") {
    for (const MeasureSpec& m : reference_measures()) {
        const OrthonormalBasis1D basis(quadratic_reference(), m);
        for (int g = 0; g <= 50; ++g) {
            const double x = -1.0 + 2.0 * g / 50.0;
            CHECK(basis.eval(x)[0] == doctest::Approx(1.0).epsilon(1e-13));
        }
    }
}

TEST_CASE("whitened basis spans the original spline space") {
    const OrthonormalBasis1D basis(quadratic_reference(), MeasureSpec::beta(-1, 1, 3.0, 2.0));
    const int n = basis.size();
    const int npts = 50;
    Eigen::MatrixXd psi_mat(npts, n), b_mat(npts, n);
    for (int s = 0; s < npts; ++s) {
        const double x = -1.0 + 2.0 * (sdd::rng::uniform01(13, 0, s));
        const std::vector<double> psi = basis.eval(x);
        const std::vector<double> b = sdd::eval_all(basis.knots(), x);
        for (int i = 0; i < n; ++i) {
            psi_mat(s, i) = psi[i];
            b_mat(s, i) = b[i];
        }
    }
    // every standard B-spline solves a least-squares system against the
    // whitened family with negligible residual
    const Eigen::MatrixXd sol = psi_mat.colPivHouseholderQr().solve(b_mat);
    CHECK((psi_mat * sol - b_mat).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("whitening factors are deterministic") {
    const OrthonormalBasis1D a(quadratic_reference(), MeasureSpec::beta(-1, 1, 3.0, 2.0));
    const OrthonormalBasis1D b(quadratic_reference(), MeasureSpec::beta(-1, 1, 3.0, 2.0));
    CHECK((a.cholesky_factor() - b.cholesky_factor()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("conditioning guard names the failing pivot") {
    // an element with essentially no probability mass drives a pivot to zero
    const KnotSequence ks({-1.0, -1.0 + 1e-13, 1.0}, 0);
    try {
        const OrthonormalBasis1D basis(ks, MeasureSpec::uniform(-1.0, 1.0));
        FAIL("expected a conditioning error");
    } catch (const sdd::ConditioningError& ex) {
        CHECK(ex.pivot_index() == 1);
        CHECK(std::string(ex.what()).find("pivot") != std::string::npos);
    }
}

TEST_CASE("factor round trip through from_factor") {
    const OrthonormalBasis1D built(quadratic_reference(), MeasureSpec::uniform(-1, 1));
    const OrthonormalBasis1D rebuilt = OrthonormalBasis1D::from_factor(
        built.knots(), built.measure(), built.cholesky_factor());
    for (int g = 0; g <= 20; ++g) {
        const double x = -1.0 + 2.0 * g / 20.0;
        const std::vector<double> a = built.eval(x);
        const std::vector<double> b = rebuilt.eval(x);
        for (int i = 0; i < built.size(); ++i) CHECK(a[i] == b[i]);
    }
}
