#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "core/knots.hpp"
#include "core/measures.hpp"

namespace sdd {

/// Auxiliary spline vector P(x) = (1, B_2(x), ..., B_n(x)): the first
/// standard B-spline is replaced by the constant 1.
void auxiliary_vector(const KnotSequence& knots, double x, std::span<double> out);
std::vector<double> auxiliary_vector(const KnotSequence& knots, double x);

/// Spline moment matrix G = E[P(X) P(X)^T], symmetric positive definite.
/// Assembled element-wise with the quadrature split at every distinct knot;
/// points_per_element = 0 selects the default order.
Eigen::MatrixXd moment_matrix(const KnotSequence& knots, const MeasureSpec& measure,
                              int points_per_element = 0);

/// Measure-consistent orthonormal spline basis for one coordinate. The
/// whitening factor is the lower-triangular Cholesky factor Q of the moment
/// matrix, and basis values solve Q psi(x) = P(x), which gives
/// E[psi] = (1, 0, ..., 0)^T and E[psi psi^T] = I. The first element is
/// identically one. Immutable and safe to share across threads.
class OrthonormalBasis1D {
public:
    OrthonormalBasis1D(KnotSequence knots, MeasureSpec measure, int points_per_element = 0);

    /// Rebuild from a previously computed factor (deserialization path).
    static OrthonormalBasis1D from_factor(KnotSequence knots, MeasureSpec measure,
                                          Eigen::MatrixXd cholesky_factor);

    int size() const noexcept { return static_cast<int>(factor_.rows()); }
    const KnotSequence& knots() const noexcept { return knots_; }
    const MeasureSpec& measure() const noexcept { return measure_; }
    const Eigen::MatrixXd& cholesky_factor() const noexcept { return factor_; }

    /// psi(x) by forward substitution against the factor; out.size() == size().
    void eval(double x, std::span<double> out) const;
    std::vector<double> eval(double x) const;

private:
    OrthonormalBasis1D(KnotSequence knots, MeasureSpec measure, Eigen::MatrixXd factor);

    KnotSequence knots_;
    MeasureSpec measure_;
    Eigen::MatrixXd factor_;
};

/// Cholesky factorization with a relative pivot guard: a pivot below
/// 1e-12 * max(diag(G)) raises ConditioningError naming the pivot.
Eigen::MatrixXd guarded_cholesky(const Eigen::MatrixXd& matrix);

}  // namespace sdd
