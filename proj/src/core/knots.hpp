#pragma once

#include <map>
#include <span>
#include <vector>

namespace sdd {

/// A (p+1)-open knot sequence on [a, b]: the first and last knots repeat
/// exactly p+1 times and interior multiplicities lie in [1, p+1]. Knot
/// values are compared bitwise; equal knots must be exactly equal.
class KnotSequence {
public:
    KnotSequence(std::vector<double> knots, int degree);

    /// Uniformly spaced distinct knots with the given element count.
    /// Interior multiplicities default to 1 and can be overridden per
    /// interior knot (keys 1..elements-1).
    static KnotSequence open_uniform(double a, double b, int degree, int elements,
                                     const std::map<int, int>& multiplicities = {});

    int degree() const noexcept { return degree_; }
    /// Dimension n of the spanned spline space.
    int basis_count() const noexcept { return static_cast<int>(knots_.size()) - degree_ - 1; }
    double lower() const noexcept { return knots_.front(); }
    double upper() const noexcept { return knots_.back(); }

    std::span<const double> knots() const noexcept { return knots_; }
    const std::vector<double>& distinct_knots() const noexcept { return distinct_; }
    const std::vector<int>& multiplicities() const noexcept { return mult_; }
    /// Number of mesh elements, I = r - 1.
    int element_count() const noexcept { return static_cast<int>(distinct_.size()) - 1; }
    /// Largest element size h.
    double mesh_size() const;

    bool operator==(const KnotSequence& other) const noexcept {
        return degree_ == other.degree_ && knots_ == other.knots_;
    }

private:
    std::vector<double> knots_;
    int degree_;
    std::vector<double> distinct_;
    std::vector<int> mult_;
};

}  // namespace sdd
