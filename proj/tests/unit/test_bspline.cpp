#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "core/bspline.hpp"
#include "core/rng.hpp"

using sdd::KnotSequence;
using sdd::eval_all;
using sdd::eval_bspline;

namespace {

KnotSequence quadratic_reference() { return KnotSequence::open_uniform(-1.0, 1.0, 2, 4); }

KnotSequence random_sequence(int trial) {
    const int p = static_cast<int>(sdd::rng::uniform01(21, 0, trial) * 4);
    const int elements = 1 + static_cast<int>(sdd::rng::uniform01(21, 1, trial) * 6);
    std::map<int, int> mult;
    if (elements > 1 && p > 0 && trial % 2) mult[1 + trial % (elements - 1)] = 1 + trial % p;
    return KnotSequence::open_uniform(-1.5, 2.0, p, elements, mult);
}

}  // namespace

TEST_CASE("zero degree box function") {
    const KnotSequence ks = KnotSequence::open_uniform(0.0, 1.0, 0, 1);
    CHECK(eval_bspline(ks, 0, 0.5) == 1.0);
    CHECK(eval_bspline(ks, 0, 0.0) == 1.0);
    CHECK(eval_bspline(ks, 0, 1.0) == 1.0);  // closed at the right end
    CHECK_THROWS_AS((void)eval_bspline(ks, 0, 1.5), std::invalid_argument);
    CHECK_THROWS_AS((void)eval_bspline(ks, 1, 0.5), std::invalid_argument);
}

TEST_CASE("hat function peak") {
    const KnotSequence ks({0, 0, 0.5, 1, 1}, 1);
    CHECK(eval_bspline(ks, 1, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(eval_bspline(ks, 0, 0.0) == 1.0);
    CHECK(eval_bspline(ks, 2, 1.0) == 1.0);
}

TEST_CASE("endpoint interpolation for open sequences") {
    const KnotSequence ks = quadratic_reference();
    const std::vector<double> at_a = eval_all(ks, -1.0);
    CHECK(at_a[0] == 1.0);
    for (int i = 1; i < 6; ++i) CHECK(at_a[i] == 0.0);
    const std::vector<double> at_b = eval_all(ks, 1.0);
    CHECK(at_b[5] == 1.0);
    for (int i = 0; i < 5; ++i) CHECK(at_b[i] == 0.0);
}

TEST_CASE("local support width") {
    const KnotSequence ks = quadratic_reference();
    const std::vector<double> vals = eval_all(ks, -0.75);
    int nonzero = 0;
    double sum = 0.0;
    for (double v : vals) {
        if (v != 0.0) ++nonzero;
        sum += v;
    }
    CHECK(nonzero == 3);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("partition of unity on a dense grid including knots") {
    for (int trial = 0; trial < 12; ++trial) {
        const KnotSequence ks = random_sequence(trial);
        for (int g = 0; g <= 200; ++g) {
            const double x = ks.lower() + (ks.upper() - ks.lower()) * g / 200.0;
            const std::vector<double> vals = eval_all(ks, x);
            double sum = 0.0;
            for (double v : vals) {
                CHECK(v >= 0.0);
                sum += v;
            }
            CHECK(std::abs(sum - 1.0) <= 1e-12);
        }
        for (double z : ks.distinct_knots()) {
            const std::vector<double> vals = eval_all(ks, z);
            double sum = 0.0;
            for (double v : vals) sum += v;
            CHECK(std::abs(sum - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("eval_all agrees with the single-function recursion") {
    for (int trial = 0; trial < 12; ++trial) {
        const KnotSequence ks = random_sequence(trial + 100);
        for (int g = 0; g <= 37; ++g) {
            const double x = ks.lower() + (ks.upper() - ks.lower()) * g / 37.0;
            const std::vector<double> vals = eval_all(ks, x);
            for (int i = 0; i < ks.basis_count(); ++i)
                CHECK(vals[i] == doctest::Approx(eval_bspline(ks, i, x)).epsilon(1e-13));
        }
    }
}

TEST_CASE("zero outside the local support interval") {
    for (int trial = 0; trial < 8; ++trial) {
        const KnotSequence ks = random_sequence(trial + 200);
        const auto knots = ks.knots();
        const int p = ks.degree();
        for (int i = 0; i < ks.basis_count(); ++i) {
            for (int g = 0; g <= 60; ++g) {
                const double x = ks.lower() + (ks.upper() - ks.lower()) * g / 60.0;
                if (x < knots[i] || x > knots[i + p + 1])
                    CHECK(eval_bspline(ks, i, x) == 0.0);
            }
        }
    }
}

TEST_CASE("continuity across a simple interior knot") {
    const KnotSequence ks = quadratic_reference();
    for (double z : {-0.5, 0.0, 0.5}) {
        for (int i = 0; i < ks.basis_count(); ++i) {
            const double left = eval_bspline(ks, i, z - 1e-10);
            const double right = eval_bspline(ks, i, z + 1e-10);
            CHECK(std::abs(left - right) <= 1e-9);
        }
    }
}

TEST_CASE("full multiplicity interior knot gives a jump") {
    // multiplicity p+1 detaches the polynomial pieces
    const KnotSequence ks({0, 0, 0.5, 0.5, 1, 1}, 1);
    CHECK(eval_bspline(ks, 1, 0.5 - 1e-12) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(eval_bspline(ks, 1, 0.5) == 0.0);
    CHECK(eval_bspline(ks, 2, 0.5) == 1.0);
}
