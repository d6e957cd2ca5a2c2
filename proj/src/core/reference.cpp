#include "core/reference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "core/parallel.hpp"

namespace sdd {

namespace {

std::map<std::vector<int>, double> subset_variances(const SddExpansion& e) {
    return e.variance_by_subset();
}

EquivalenceReport compare_subsets(const std::map<std::vector<int>, double>& left,
                                  const std::map<std::vector<int>, double>& right) {
    EquivalenceReport report;
    double total_left = 0.0, total_right = 0.0;
    for (const auto& [u, v] : left) total_left += v;
    for (const auto& [u, v] : right) total_right += v;
    report.total_difference = std::abs(total_left - total_right);

    std::map<std::vector<int>, double> all = left;
    for (const auto& [u, v] : right) all.try_emplace(u, 0.0);
    for (const auto& [u, _] : all) {
        const auto l = left.find(u);
        const auto r = right.find(u);
        const double vl = l == left.end() ? 0.0 : l->second;
        const double vr = r == right.end() ? 0.0 : r->second;
        report.max_subset_difference = std::max(report.max_subset_difference, std::abs(vl - vr));
    }
    const double scale = std::max({total_left, total_right, 1e-300});
    report.max_relative = report.max_subset_difference / scale;
    return report;
}

}  // namespace

std::vector<OrthonormalBasis1D> reference_bases(const std::vector<MeasureSpec>& measures,
                                                int degree, int points_per_element) {
    if (degree < 1) throw std::invalid_argument("reference_bases: degree must be >= 1");
    std::vector<OrthonormalBasis1D> bases;
    bases.reserve(measures.size());
    for (const MeasureSpec& m : measures) {
        KnotSequence knots = KnotSequence::open_uniform(m.lower(), m.upper(), degree, 1);
        bases.emplace_back(std::move(knots), m, points_per_element);
    }
    return bases;
}

double legendre_orthonormal(int degree, double x, double a, double b) {
    if (degree < 0) throw std::invalid_argument("legendre: degree must be >= 0");
    const double t = (2.0 * x - a - b) / (b - a);
    double p0 = 1.0, p1 = t;
    if (degree == 0) return 1.0;
    for (int j = 1; j < degree; ++j) {
        const double p2 = ((2 * j + 1) * t * p1 - j * p0) / (j + 1);
        p0 = p1;
        p1 = p2;
    }
    return std::sqrt(2.0 * degree + 1.0) * p1;
}

TensorPce::TensorPce(std::vector<MeasureSpec> measures, int degree, std::vector<double> coeffs)
    : measures_(std::move(measures)), degree_(degree), coeffs_(std::move(coeffs)) {
    std::size_t expected = 1;
    for (std::size_t k = 0; k < measures_.size(); ++k) expected *= degree_ + 1;
    if (coeffs_.size() != expected)
        throw std::invalid_argument("tensor_pce: coefficient count does not match the index set");
}

double TensorPce::coefficient(std::span<const int> index) const {
    if (static_cast<int>(index.size()) != dimension())
        throw std::invalid_argument("tensor_pce: index dimension mismatch");
    std::size_t flat = 0;
    for (int k = 0; k < dimension(); ++k) {
        if (index[k] < 0 || index[k] > degree_)
            throw std::invalid_argument("tensor_pce: index entry out of range");
        flat = flat * (degree_ + 1) + index[k];
    }
    return coeffs_[flat];
}

double TensorPce::mean() const { return coeffs_[0]; }

double TensorPce::variance() const {
    double acc = 0.0;
    for (std::size_t i = 1; i < coeffs_.size(); ++i) acc += coeffs_[i] * coeffs_[i];
    return acc;
}

std::map<std::vector<int>, double> TensorPce::variance_by_subset() const {
    std::map<std::vector<int>, double> parts;
    std::vector<int> index(dimension(), 0);
    for (std::size_t flat = 1; flat < coeffs_.size(); ++flat) {
        std::size_t rem = flat;
        for (int k = dimension() - 1; k >= 0; --k) {
            index[k] = static_cast<int>(rem % (degree_ + 1));
            rem /= degree_ + 1;
        }
        std::vector<int> subset;
        for (int k = 0; k < dimension(); ++k)
            if (index[k] > 0) subset.push_back(k);
        parts[subset] += coeffs_[flat] * coeffs_[flat];
    }
    return parts;
}

double TensorPce::evaluate(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dimension())
        throw std::invalid_argument("tensor_pce: point dimension mismatch");
    // tabulate univariate values once, then sweep the tensor layout
    std::vector<std::vector<double>> vals(dimension());
    for (int k = 0; k < dimension(); ++k) {
        vals[k].resize(degree_ + 1);
        for (int j = 0; j <= degree_; ++j)
            vals[k][j] = legendre_orthonormal(j, x[k], measures_[k].lower(), measures_[k].upper());
    }
    double acc = 0.0;
    std::vector<int> index(dimension(), 0);
    for (std::size_t flat = 0; flat < coeffs_.size(); ++flat) {
        std::size_t rem = flat;
        double prod = coeffs_[flat];
        for (int k = dimension() - 1; k >= 0; --k) {
            prod *= vals[k][rem % (degree_ + 1)];
            rem /= degree_ + 1;
        }
        acc += prod;
    }
    return acc;
}

TensorPce fit_tensor_legendre(const std::function<double(std::span<const double>)>& output,
                              const std::vector<MeasureSpec>& measures, int degree,
                              const TensorPceOptions& options) {
    const int dim = static_cast<int>(measures.size());
    if (dim < 1 || dim > 6)
        throw std::invalid_argument("fit_tensor_legendre: dimension must lie in [1, 6]");
    if (degree < 1) throw std::invalid_argument("fit_tensor_legendre: degree must be >= 1");
    for (const MeasureSpec& m : measures)
        if (m.family() != Family::Uniform)
            throw std::invalid_argument("fit_tensor_legendre: only uniform measures are supported");
    if (!options.breakpoints.empty() && static_cast<int>(options.breakpoints.size()) != dim)
        throw std::invalid_argument("fit_tensor_legendre: breakpoints list must match the dimension");

    const int nb = degree + 1;
    std::vector<std::vector<double>> nodes(dim), weights(dim), vals(dim);
    std::vector<std::int64_t> strides(dim);
    std::int64_t total = 1;
    for (int k = 0; k < dim; ++k) {
        std::vector<double> breaks;
        if (!options.breakpoints.empty()) {
            breaks = options.breakpoints[k];
            std::sort(breaks.begin(), breaks.end());
            breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
        }
        QuadratureRule rule = measure_quadrature(measures[k], breaks, options.points_per_element);
        const int m = static_cast<int>(rule.nodes.size());
        vals[k].resize(static_cast<std::size_t>(m) * nb);
        for (int s = 0; s < m; ++s)
            for (int j = 0; j < nb; ++j)
                vals[k][static_cast<std::size_t>(s) * nb + j] =
                    legendre_orthonormal(j, rule.nodes[s], measures[k].lower(), measures[k].upper());
        nodes[k] = std::move(rule.nodes);
        weights[k] = std::move(rule.weights);
        total *= m;
    }
    for (int k = dim - 1; k >= 0; --k)
        strides[k] = (k == dim - 1) ? 1 : strides[k + 1] * static_cast<std::int64_t>(nodes[k + 1].size());

    std::size_t ncoef = 1;
    for (int k = 0; k < dim; ++k) ncoef *= nb;

    constexpr int kChunks = 64;
    std::vector<std::vector<double>> parts(kChunks, std::vector<double>(ncoef, 0.0));
    detail::run_chunked(total, options.threads, kChunks, [&](int chunk, std::int64_t begin,
                                                             std::int64_t end) {
        std::vector<double> x(dim);
        std::vector<const double*> rows(dim);
        std::vector<double>& acc = parts[chunk];
        std::vector<int> index(dim);
        for (std::int64_t flat = begin; flat < end; ++flat) {
            double w = 1.0;
            for (int k = 0; k < dim; ++k) {
                const int i = static_cast<int>((flat / strides[k]) % static_cast<std::int64_t>(nodes[k].size()));
                x[k] = nodes[k][i];
                w *= weights[k][i];
                rows[k] = vals[k].data() + static_cast<std::size_t>(i) * nb;
            }
            const double wy = w * output(x);
            // accumulate over the full tensor index set, last index fastest
            std::fill(index.begin(), index.end(), 0);
            for (std::size_t c = 0; c < ncoef; ++c) {
                double prod = wy;
                for (int k = 0; k < dim; ++k) prod *= rows[k][index[k]];
                acc[c] += prod;
                int k = dim - 1;
                while (k >= 0 && index[k] == nb - 1) index[k--] = 0;
                if (k >= 0) ++index[k];
            }
        }
    });

    std::vector<double> coeffs(ncoef, 0.0);
    for (int chunk = 0; chunk < kChunks; ++chunk)
        for (std::size_t c = 0; c < ncoef; ++c) coeffs[c] += parts[chunk][c];
    return TensorPce(measures, degree, std::move(coeffs));
}

EquivalenceReport equivalence_check(const SddExpansion& left, const SddExpansion& right) {
    if (left.dimension() != right.dimension() || left.order() != right.order())
        throw std::invalid_argument("equivalence_check: mismatched configurations");
    for (int k = 0; k < left.dimension(); ++k) {
        if (left.basis(k).knots().degree() != right.basis(k).knots().degree() ||
            left.basis(k).measure().family() != right.basis(k).measure().family() ||
            left.basis(k).measure().lower() != right.basis(k).measure().lower() ||
            left.basis(k).measure().upper() != right.basis(k).measure().upper())
            throw std::invalid_argument("equivalence_check: mismatched configurations");
    }
    auto lv = subset_variances(left);
    auto rv = subset_variances(right);
    EquivalenceReport report = compare_subsets(lv, rv);
    return report;
}

EquivalenceReport equivalence_check(const SddExpansion& left, const TensorPce& right) {
    if (left.dimension() != right.dimension())
        throw std::invalid_argument("equivalence_check: mismatched configurations");
    return compare_subsets(subset_variances(left), right.variance_by_subset());
}

}  // namespace sdd
