#include "core/orthobasis.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "core/bspline.hpp"
#include "core/errors.hpp"

namespace sdd {

namespace {

int default_moment_points(int degree) {
    // p+3 integrates spline products exactly for polynomial densities; the
    // floor of 16 keeps smooth non-polynomial densities (truncated
    // Gaussian) accurate to well below the orthonormality tolerances.
    return std::max(degree + 3, 16);
}

}  // namespace

void auxiliary_vector(const KnotSequence& knots, double x, std::span<double> out) {
    eval_all(knots, x, out);
    out[0] = 1.0;
}

std::vector<double> auxiliary_vector(const KnotSequence& knots, double x) {
    std::vector<double> out(knots.basis_count());
    auxiliary_vector(knots, x, out);
    return out;
}

Eigen::MatrixXd moment_matrix(const KnotSequence& knots, const MeasureSpec& measure,
                              int points_per_element) {
    if (knots.lower() != measure.lower() || knots.upper() != measure.upper())
        throw std::invalid_argument("moment_matrix: knot span must match the measure support");
    const int n = knots.basis_count();
    const int q = points_per_element > 0 ? points_per_element : default_moment_points(knots.degree());

    const std::vector<double>& distinct = knots.distinct_knots();
    const QuadratureRule rule =
        measure_quadrature(measure, std::span(distinct).subspan(1, distinct.size() - 2), q);

    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    std::vector<double> p(n);
    for (std::size_t s = 0; s < rule.nodes.size(); ++s) {
        auxiliary_vector(knots, rule.nodes[s], p);
        const double w = rule.weights[s];
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) g(i, j) += w * p[i] * p[j];
    }
    // only the upper triangle was accumulated; mirror it
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) g(i, j) = g(j, i);
    return g;
}

Eigen::MatrixXd guarded_cholesky(const Eigen::MatrixXd& g) {
    const int n = static_cast<int>(g.rows());
    const double threshold = 1e-12 * g.diagonal().maxCoeff();
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        double d = g(j, j);
        for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > threshold))
            throw ConditioningError(
                j, "moment matrix is numerically not positive definite (pivot " + std::to_string(j) +
                       " = " + std::to_string(d) +
                       "); coarsen the mesh or lower the degree");
        l(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double s = g(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

OrthonormalBasis1D::OrthonormalBasis1D(KnotSequence knots, MeasureSpec measure,
                                       int points_per_element)
    : knots_(std::move(knots)),
      measure_(std::move(measure)),
      factor_(guarded_cholesky(moment_matrix(knots_, measure_, points_per_element))) {}

OrthonormalBasis1D OrthonormalBasis1D::from_factor(KnotSequence knots, MeasureSpec measure,
                                                   Eigen::MatrixXd cholesky_factor) {
    if (cholesky_factor.rows() != knots.basis_count() ||
        cholesky_factor.cols() != knots.basis_count())
        throw std::invalid_argument("orthobasis: factor dimension does not match the knot sequence");
    OrthonormalBasis1D basis(std::move(knots), std::move(measure), std::move(cholesky_factor));
    return basis;
}

OrthonormalBasis1D::OrthonormalBasis1D(KnotSequence knots, MeasureSpec measure,
                                       Eigen::MatrixXd factor)
    : knots_(std::move(knots)), measure_(std::move(measure)), factor_(std::move(factor)) {}

void OrthonormalBasis1D::eval(double x, std::span<double> out) const {
    const int n = size();
    if (static_cast<int>(out.size()) != n)
        throw std::invalid_argument("orthobasis: output span has wrong size");
    auxiliary_vector(knots_, x, out);
    // forward substitution: factor is lower triangular with positive diagonal
    for (int i = 0; i < n; ++i) {
        double s = out[i];
        for (int k = 0; k < i; ++k) s -= factor_(i, k) * out[k];
        out[i] = s / factor_(i, i);
    }
}

std::vector<double> OrthonormalBasis1D::eval(double x) const {
    std::vector<double> out(size());
    eval(x, out);
    return out;
}

}  // namespace sdd
