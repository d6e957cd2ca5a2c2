#include "core/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "core/errors.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace sdd {

namespace {

constexpr int kFitChunks = 64;
constexpr int kMaxTensorDimension = 6;
constexpr double kConditionWarningThreshold = 1e10;

void validate_term_inputs(std::span<const int> basis_counts, int order) {
    const int n = static_cast<int>(basis_counts.size());
    if (n < 1) throw std::invalid_argument("terms: need at least one coordinate");
    if (order < 1) throw std::invalid_argument("terms: interaction order must be >= 1");
    if (order > n)
        throw std::invalid_argument("terms: interaction order " + std::to_string(order) +
                                    " exceeds dimension " + std::to_string(n));
    for (int count : basis_counts)
        if (count < 2)
            throw std::invalid_argument("terms: every coordinate needs at least 2 basis elements");
}

template <typename Visit>
void for_each_subset(int n, int max_size, Visit&& visit) {
    std::vector<int> subset;
    for (int s = 1; s <= max_size; ++s) {
        subset.resize(s);
        for (int i = 0; i < s; ++i) subset[i] = i;
        while (true) {
            visit(static_cast<const std::vector<int>&>(subset));
            int i = s - 1;
            while (i >= 0 && subset[i] == n - s + i) --i;
            if (i < 0) break;
            ++subset[i];
            for (int j = i + 1; j < s; ++j) subset[j] = subset[j - 1] + 1;
        }
    }
}

// Shared evaluation scratch: per-coordinate orthonormal values at one point.
struct EvalScratch {
    std::vector<std::vector<double>> psi;

    explicit EvalScratch(const std::vector<OrthonormalBasis1D>& bases) {
        psi.reserve(bases.size());
        for (const auto& b : bases) psi.emplace_back(b.size());
    }

    void load(const std::vector<OrthonormalBasis1D>& bases, std::span<const double> x) {
        for (std::size_t k = 0; k < bases.size(); ++k) bases[k].eval(x[k], psi[k]);
    }

    double combine(double constant, const std::vector<Term>& terms) const {
        double acc = constant;
        for (const Term& t : terms) {
            double prod = t.coeff;
            for (std::size_t l = 0; l < t.coords.size(); ++l)
                prod *= psi[t.coords[l]][t.indices[l]];
            acc += prod;
        }
        return acc;
    }
};

}  // namespace

std::vector<Term> enumerate_terms(std::span<const int> basis_counts, int order) {
    validate_term_inputs(basis_counts, order);
    std::vector<Term> terms;
    for_each_subset(static_cast<int>(basis_counts.size()), order, [&](const std::vector<int>& u) {
        std::vector<int> idx(u.size(), 1);
        while (true) {
            terms.push_back(Term{u, idx, 0.0});
            int l = static_cast<int>(u.size()) - 1;
            while (l >= 0 && idx[l] == basis_counts[u[l]] - 1) --l;
            if (l < 0) break;
            ++idx[l];
            for (std::size_t j = l + 1; j < idx.size(); ++j) idx[j] = 1;
        }
    });
    return terms;
}

std::int64_t term_count(std::span<const int> basis_counts, int order) {
    validate_term_inputs(basis_counts, order);
    std::int64_t total = 1;
    for_each_subset(static_cast<int>(basis_counts.size()), order, [&](const std::vector<int>& u) {
        std::int64_t prod = 1;
        for (int k : u) prod *= basis_counts[k] - 1;
        total += prod;
    });
    return total;
}

SddExpansion::SddExpansion(std::vector<OrthonormalBasis1D> bases, int order, double constant,
                           std::vector<Term> terms)
    : bases_(std::move(bases)), order_(order), constant_(constant), terms_(std::move(terms)) {
    if (bases_.empty()) throw std::invalid_argument("expansion: need at least one coordinate");
    if (order_ < 1 || order_ > dimension())
        throw std::invalid_argument("expansion: interaction order out of range");
    for (const Term& t : terms_) {
        if (t.coords.empty() || t.coords.size() != t.indices.size() ||
            static_cast<int>(t.coords.size()) > order_)
            throw std::invalid_argument("expansion: malformed term");
        int prev = -1;
        for (std::size_t l = 0; l < t.coords.size(); ++l) {
            const int k = t.coords[l];
            if (k <= prev || k >= dimension())
                throw std::invalid_argument("expansion: term coordinates must be strictly increasing");
            if (t.indices[l] < 1 || t.indices[l] >= bases_[k].size())
                throw std::invalid_argument("expansion: term index out of range");
            prev = k;
        }
    }
}

double SddExpansion::evaluate(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dimension())
        throw std::invalid_argument("expansion: point dimension mismatch");
    for (int k = 0; k < dimension(); ++k)
        if (x[k] < bases_[k].knots().lower() || x[k] > bases_[k].knots().upper())
            throw std::domain_error("expansion: point outside the support box");
    EvalScratch scratch(bases_);
    scratch.load(bases_, x);
    return scratch.combine(constant_, terms_);
}

double SddExpansion::basis_product(const Term& term, std::span<const double> x) const {
    double prod = 1.0;
    for (std::size_t l = 0; l < term.coords.size(); ++l) {
        const int k = term.coords[l];
        prod *= bases_[k].eval(x[k])[term.indices[l]];
    }
    return prod;
}

double SddExpansion::variance() const {
    double acc = 0.0;
    for (const Term& t : terms_) acc += t.coeff * t.coeff;
    return acc;
}

std::map<std::vector<int>, double> SddExpansion::variance_by_subset() const {
    std::map<std::vector<int>, double> parts;
    for (const Term& t : terms_) parts[t.coords] += t.coeff * t.coeff;
    return parts;
}

SddExpansion fit_quadrature(const std::function<double(std::span<const double>)>& output,
                            std::vector<OrthonormalBasis1D> bases, int order,
                            const QuadratureFitOptions& options) {
    const int dim = static_cast<int>(bases.size());
    if (dim > kMaxTensorDimension)
        throw UnsupportedError("fit_quadrature: tensor quadrature is limited to dimension <= " +
                               std::to_string(kMaxTensorDimension) + "; use regression");
    if (!options.breakpoints.empty() && static_cast<int>(options.breakpoints.size()) != dim)
        throw std::invalid_argument("fit_quadrature: breakpoints list must match the dimension");

    std::vector<int> counts(dim);
    for (int k = 0; k < dim; ++k) counts[k] = bases[k].size();
    std::vector<Term> terms = enumerate_terms(counts, order);

    int max_degree = 0;
    for (const auto& b : bases) max_degree = std::max(max_degree, b.knots().degree());
    const int points = options.points_per_element > 0 ? options.points_per_element
                                                      : std::max(2 * max_degree + 6, 20);

    // Per-coordinate rules split at every distinct knot plus any declared
    // integrand breakpoints, with orthonormal values tabulated at the nodes.
    std::vector<std::vector<double>> nodes(dim), weights(dim), psi(dim);
    std::vector<std::int64_t> strides(dim);
    std::int64_t total = 1;
    for (int k = 0; k < dim; ++k) {
        const KnotSequence& ks = bases[k].knots();
        std::vector<double> breaks(ks.distinct_knots().begin() + 1, ks.distinct_knots().end() - 1);
        if (!options.breakpoints.empty())
            breaks.insert(breaks.end(), options.breakpoints[k].begin(), options.breakpoints[k].end());
        std::sort(breaks.begin(), breaks.end());
        breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
        QuadratureRule rule = measure_quadrature(bases[k].measure(), breaks, points);
        const int m = static_cast<int>(rule.nodes.size());
        const int n = bases[k].size();
        psi[k].resize(static_cast<std::size_t>(m) * n);
        for (int s = 0; s < m; ++s)
            bases[k].eval(rule.nodes[s], std::span(psi[k]).subspan(static_cast<std::size_t>(s) * n, n));
        nodes[k] = std::move(rule.nodes);
        weights[k] = std::move(rule.weights);
        total *= m;
    }
    for (int k = dim - 1; k >= 0; --k) {
        strides[k] = (k == dim - 1) ? 1 : strides[k + 1] * static_cast<std::int64_t>(nodes[k + 1].size());
    }

    const int nterms = static_cast<int>(terms.size());
    std::vector<double> constant_parts(kFitChunks, 0.0);
    std::vector<std::vector<double>> coeff_parts(kFitChunks, std::vector<double>(nterms, 0.0));

    detail::run_chunked(total, options.threads, kFitChunks, [&](int chunk, std::int64_t begin,
                                                                std::int64_t end) {
        std::vector<int> idx(dim);
        std::vector<double> x(dim);
        std::vector<const double*> rows(dim);
        double& c0 = constant_parts[chunk];
        std::vector<double>& cs = coeff_parts[chunk];
        for (std::int64_t flat = begin; flat < end; ++flat) {
            double w = 1.0;
            for (int k = 0; k < dim; ++k) {
                idx[k] = static_cast<int>((flat / strides[k]) % static_cast<std::int64_t>(nodes[k].size()));
                x[k] = nodes[k][idx[k]];
                w *= weights[k][idx[k]];
                rows[k] = psi[k].data() + static_cast<std::size_t>(idx[k]) * bases[k].size();
            }
            const double wy = w * output(x);
            c0 += wy;
            for (int t = 0; t < nterms; ++t) {
                const Term& term = terms[t];
                double prod = wy;
                for (std::size_t l = 0; l < term.coords.size(); ++l)
                    prod *= rows[term.coords[l]][term.indices[l]];
                cs[t] += prod;
            }
        }
    });

    double constant = 0.0;
    for (double part : constant_parts) constant += part;
    for (int t = 0; t < nterms; ++t) {
        double c = 0.0;
        for (int chunk = 0; chunk < kFitChunks; ++chunk) c += coeff_parts[chunk][t];
        terms[t].coeff = c;
    }
    return SddExpansion(std::move(bases), order, constant, std::move(terms));
}

SddExpansion fit_regression(std::span<const SurrogateSample> samples,
                            std::vector<OrthonormalBasis1D> bases, int order,
                            const RegressionOptions& options, RegressionInfo* info) {
    const int dim = static_cast<int>(bases.size());
    std::vector<int> counts(dim);
    for (int k = 0; k < dim; ++k) counts[k] = bases[k].size();
    std::vector<Term> terms = enumerate_terms(counts, order);

    const std::int64_t rows = static_cast<std::int64_t>(samples.size());
    const std::int64_t cols = static_cast<std::int64_t>(terms.size()) + 1;
    if (rows < cols)
        throw std::invalid_argument("fit_regression: underdetermined system (" +
                                    std::to_string(rows) + " samples for " + std::to_string(cols) +
                                    " coefficients)");
    const auto required = static_cast<std::int64_t>(std::ceil(options.min_oversampling * cols));
    if (rows < required)
        throw std::invalid_argument("fit_regression: need at least " + std::to_string(required) +
                                    " samples for " + std::to_string(cols) +
                                    " coefficients (oversampling policy)");

    for (const SurrogateSample& s : samples) {
        if (static_cast<int>(s.x.size()) != dim)
            throw std::invalid_argument("fit_regression: sample dimension mismatch");
        for (int k = 0; k < dim; ++k)
            if (s.x[k] < bases[k].knots().lower() || s.x[k] > bases[k].knots().upper())
                throw std::invalid_argument("fit_regression: sample outside the support box");
    }

    Eigen::MatrixXd design(rows, cols);
    Eigen::VectorXd rhs(rows);
    detail::run_chunked(rows, options.threads, kFitChunks, [&](int, std::int64_t begin,
                                                               std::int64_t end) {
        EvalScratch scratch(bases);
        for (std::int64_t r = begin; r < end; ++r) {
            scratch.load(bases, samples[r].x);
            design(r, 0) = 1.0;
            for (std::size_t t = 0; t < terms.size(); ++t) {
                const Term& term = terms[t];
                double prod = 1.0;
                for (std::size_t l = 0; l < term.coords.size(); ++l)
                    prod *= scratch.psi[term.coords[l]][term.indices[l]];
                design(r, 1 + t) = prod;
            }
            rhs(r) = samples[r].y;
        }
    });

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    const Eigen::VectorXd rdiag = qr.matrixR().diagonal().cwiseAbs();
    const double rmin = rdiag.minCoeff();
    const double condition = rmin > 0.0 ? rdiag.maxCoeff() / rmin
                                        : std::numeric_limits<double>::infinity();

    Eigen::VectorXd coeffs;
    if (options.ridge > 0.0) {
        Eigen::MatrixXd normal = design.transpose() * design;
        normal.diagonal().array() += options.ridge;
        coeffs = normal.ldlt().solve(design.transpose() * rhs);
    } else {
        coeffs = qr.solve(rhs);
    }

    if (info) {
        info->condition_estimate = condition;
        info->ill_conditioned = !(condition < kConditionWarningThreshold);
    }

    for (std::size_t t = 0; t < terms.size(); ++t) terms[t].coeff = coeffs(1 + t);
    return SddExpansion(std::move(bases), order, coeffs(0), std::move(terms));
}

std::vector<double> sample_inputs(const ProductMeasure& measure, std::uint64_t count,
                                  std::uint64_t seed, int threads) {
    const int dim = measure.dimension();
    std::vector<double> out(count * static_cast<std::uint64_t>(dim));
    detail::run_chunked(static_cast<std::int64_t>(count), threads, kFitChunks,
                        [&](int, std::int64_t begin, std::int64_t end) {
                            for (std::int64_t s = begin; s < end; ++s)
                                for (int k = 0; k < dim; ++k)
                                    out[static_cast<std::size_t>(s) * dim + k] =
                                        measure.component(k).sample(rng::uniform01(seed, k, s));
                        });
    return out;
}

std::vector<double> sample_surrogate(const SddExpansion& expansion, std::uint64_t count,
                                     std::uint64_t seed, int threads) {
    if (count < 1) throw std::invalid_argument("sample_surrogate: count must be >= 1");
    const int dim = expansion.dimension();
    // streams live in a different block than sample_inputs, so reusing one
    // seed for fitting and surrogate Monte Carlo does not replay the
    // training inputs
    constexpr std::uint64_t kStreamBlock = std::uint64_t{1} << 32;
    std::vector<double> out(count);
    detail::run_chunked(static_cast<std::int64_t>(count), threads, kFitChunks,
                        [&](int, std::int64_t begin, std::int64_t end) {
                            EvalScratch scratch(expansion.bases());
                            std::vector<double> x(dim);
                            for (std::int64_t s = begin; s < end; ++s) {
                                for (int k = 0; k < dim; ++k)
                                    x[k] = expansion.basis(k).measure().sample(
                                        rng::uniform01(seed, kStreamBlock + k, s));
                                scratch.load(expansion.bases(), x);
                                out[s] = scratch.combine(expansion.constant(), expansion.terms());
                            }
                        });
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace sdd
