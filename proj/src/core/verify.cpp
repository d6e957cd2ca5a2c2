#include "core/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "core/bench.hpp"
#include "core/bspline.hpp"
#include "core/decomposition.hpp"
#include "core/reference.hpp"
#include "core/rng.hpp"
#include "core/serialization.hpp"

namespace sdd {

namespace {

std::string bound_detail(double measured, double bound) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << "measured " << measured << ", bound " << bound;
    return os.str();
}

CheckResult bounded(const std::string& name, double measured, double bound) {
    return CheckResult{name, measured <= bound, bound_detail(measured, bound)};
}

std::vector<MeasureSpec> reference_measures() {
    return {MeasureSpec::uniform(-1.0, 1.0),
            MeasureSpec::truncated_gaussian(-1.0, 1.0, -0.5, 0.5),
            MeasureSpec::beta(-1.0, 1.0, 3.0, 2.0)};
}

KnotSequence reference_knots() { return KnotSequence::open_uniform(-1.0, 1.0, 2, 4); }

CheckResult check_density_normalization() {
    double worst = 0.0;
    for (const MeasureSpec& m : reference_measures()) {
        const QuadratureRule rule = measure_quadrature(m, {}, 50);
        double mass = 0.0;
        for (double w : rule.weights) mass += w;
        worst = std::max(worst, std::abs(mass - 1.0));
    }
    return bounded("density normalization", worst, 1e-10);
}

CheckResult check_inverse_cdf() {
    double worst = 0.0;
    for (const MeasureSpec& m : reference_measures()) {
        for (int i = 0; i <= 200; ++i) {
            const double u = i / 200.0;
            worst = std::max(worst, std::abs(m.cdf(m.sample(u)) - u));
        }
    }
    return bounded("inverse cdf round trip", worst, 1e-10);
}

CheckResult check_knot_identities() {
    const KnotSequence ks = reference_knots();
    bool ok = ks.basis_count() == 6 && ks.element_count() == 4 && ks.mesh_size() == 0.5;
    std::vector<double> rebuilt;
    for (std::size_t j = 0; j < ks.distinct_knots().size(); ++j)
        rebuilt.insert(rebuilt.end(), ks.multiplicities()[j], ks.distinct_knots()[j]);
    ok = ok && std::equal(rebuilt.begin(), rebuilt.end(), ks.knots().begin(), ks.knots().end());
    return CheckResult{"knot structure round trip", ok, ok ? "exact" : "mismatch"};
}

CheckResult check_partition_of_unity() {
    const KnotSequence ks = reference_knots();
    double worst = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double x = -1.0 + 2.0 * i / 400.0;
        const std::vector<double> vals = eval_all(ks, x);
        double sum = 0.0;
        for (double v : vals) {
            if (v < 0.0) worst = std::max(worst, -v);
            sum += v;
        }
        worst = std::max(worst, std::abs(sum - 1.0));
    }
    return bounded("partition of unity", worst, 1e-12);
}

CheckResult check_orthonormality() {
    double worst_gram = 0.0, worst_mean = 0.0;
    for (const MeasureSpec& m : reference_measures()) {
        const OrthonormalBasis1D basis(reference_knots(), m);
        const int n = basis.size();
        const std::vector<double>& dk = basis.knots().distinct_knots();
        const QuadratureRule rule =
            measure_quadrature(m, std::span(dk).subspan(1, dk.size() - 2), 50);
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
        worst_gram = std::max(worst_gram,
                              (gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff());
        for (int i = 1; i < n; ++i) worst_mean = std::max(worst_mean, std::abs(mean(i)));
    }
    CheckResult gram_check = bounded("orthonormality E[psi psi^T] = I", worst_gram, 1e-8);
    CheckResult mean_check = bounded("zero mean of non-constant elements", worst_mean, 1e-10);
    if (!mean_check.passed) {
        gram_check.passed = false;
        gram_check.detail += "; " + mean_check.detail;
    }
    return gram_check;
}

CheckResult check_counting_identity() {
    // 1 + sum over subsets of prod (n_k - 1) equals prod n_k when S = N
    for (int trial = 0; trial < 50; ++trial) {
        const int dim = 1 + static_cast<int>(rng::uniform01(7, 0, trial) * 4) % 4;
        std::vector<int> counts(dim);
        std::int64_t prod = 1;
        for (int k = 0; k < dim; ++k) {
            counts[k] = 2 + static_cast<int>(rng::uniform01(7, k + 1, trial) * 5) % 5;
            prod *= counts[k];
        }
        if (term_count(counts, dim) != prod)
            return CheckResult{"dimension counting identity", false,
                               "mismatch at trial " + std::to_string(trial)};
    }
    return CheckResult{"dimension counting identity", true, "exact for 50 randomized cases"};
}

CheckResult check_multivariate_gram() {
    std::vector<OrthonormalBasis1D> bases;
    bases.emplace_back(KnotSequence::open_uniform(-1, 1, 1, 2), MeasureSpec::uniform(-1, 1));
    bases.emplace_back(KnotSequence::open_uniform(-1, 1, 2, 2),
                       MeasureSpec::beta(-1, 1, 3.0, 2.0));
    std::vector<int> counts{bases[0].size(), bases[1].size()};
    const std::vector<Term> terms = enumerate_terms(counts, 2);

    std::vector<QuadratureRule> rules;
    for (const auto& b : bases) {
        const std::vector<double>& dk = b.knots().distinct_knots();
        rules.push_back(measure_quadrature(b.measure(), std::span(dk).subspan(1, dk.size() - 2), 30));
    }
    const int nt = static_cast<int>(terms.size());
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(nt, nt);
    std::vector<double> psi0(bases[0].size()), psi1(bases[1].size());
    for (std::size_t s0 = 0; s0 < rules[0].nodes.size(); ++s0) {
        bases[0].eval(rules[0].nodes[s0], psi0);
        for (std::size_t s1 = 0; s1 < rules[1].nodes.size(); ++s1) {
            bases[1].eval(rules[1].nodes[s1], psi1);
            const double w = rules[0].weights[s0] * rules[1].weights[s1];
            std::vector<double> vals(nt);
            for (int t = 0; t < nt; ++t) {
                double prod = 1.0;
                for (std::size_t l = 0; l < terms[t].coords.size(); ++l)
                    prod *= (terms[t].coords[l] == 0 ? psi0 : psi1)[terms[t].indices[l]];
                vals[t] = prod;
            }
            for (int a = 0; a < nt; ++a)
                for (int b = 0; b < nt; ++b) gram(a, b) += w * vals[a] * vals[b];
        }
    }
    const double worst = (gram - Eigen::MatrixXd::Identity(nt, nt)).cwiseAbs().maxCoeff();
    return bounded("multivariate basis Gram identity", worst, 1e-7);
}

CheckResult check_polynomial_baseline(int threads) {
    const BenchmarkFunction bench = make_example1();
    double worst = 0.0;
    for (int degree = 1; degree <= 3; ++degree) {
        std::vector<OrthonormalBasis1D> bases = reference_bases(bench.measures, degree);
        QuadratureFitOptions opts;
        opts.breakpoints = bench.breakpoints;
        opts.points_per_element = 40;
        opts.threads = threads;
        const SddExpansion spline_route = fit_quadrature(bench.evaluate, std::move(bases), 2, opts);
        TensorPceOptions popts;
        popts.breakpoints = bench.breakpoints;
        popts.threads = threads;
        const TensorPce poly_route = fit_tensor_legendre(bench.evaluate, bench.measures, degree, popts);
        const EquivalenceReport report = equivalence_check(spline_route, poly_route);
        worst = std::max(worst, std::max(report.max_subset_difference, report.total_difference));
    }
    return bounded("polynomial special-case equivalence", worst, 1e-8);
}

CheckResult check_serialization_round_trip(int threads) {
    const BenchmarkFunction bench = make_example1();
    std::vector<OrthonormalBasis1D> bases;
    bases.emplace_back(KnotSequence::open_uniform(-1, 1, 2, 4), bench.measures[0]);
    bases.emplace_back(KnotSequence::open_uniform(-1, 1, 1, 4), bench.measures[1]);
    QuadratureFitOptions opts;
    opts.breakpoints = bench.breakpoints;
    opts.threads = threads;
    const SddExpansion fitted = fit_quadrature(bench.evaluate, std::move(bases), 2, opts);
    const SddExpansion reloaded = expansion_from_string(expansion_to_string(fitted));
    double worst = std::abs(fitted.constant() - reloaded.constant());
    for (int i = 0; i <= 20; ++i) {
        const double x1 = -1.0 + 2.0 * i / 20.0;
        const std::array<double, 2> x{x1, -x1};
        worst = std::max(worst, std::abs(fitted.evaluate(x) - reloaded.evaluate(x)));
    }
    return bounded("expansion serialization round trip", worst, 1e-12);
}

}  // namespace

std::vector<CheckResult> run_verification(int threads) {
    std::vector<CheckResult> results;
    results.push_back(check_density_normalization());
    results.push_back(check_inverse_cdf());
    results.push_back(check_knot_identities());
    results.push_back(check_partition_of_unity());
    results.push_back(check_orthonormality());
    results.push_back(check_counting_identity());
    results.push_back(check_multivariate_gram());
    results.push_back(check_polynomial_baseline(threads));
    results.push_back(check_serialization_round_trip(threads));
    return results;
}

}  // namespace sdd
