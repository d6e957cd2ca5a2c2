#include "core/knots.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sdd {

KnotSequence::KnotSequence(std::vector<double> knots, int degree)
    : knots_(std::move(knots)), degree_(degree) {
    if (degree_ < 0) throw std::invalid_argument("knots: degree must be >= 0");
    if (static_cast<int>(knots_.size()) < 2 * (degree_ + 1))
        throw std::invalid_argument("knots: sequence too short for a (p+1)-open basis");
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i)
        if (!(knots_[i] <= knots_[i + 1]))
            throw std::invalid_argument("knots: sequence must be non-decreasing");
    if (!(knots_.back() > knots_.front()))
        throw std::invalid_argument("knots: support requires b > a");

    for (std::size_t i = 0; i < knots_.size(); ++i) {
        if (distinct_.empty() || knots_[i] != distinct_.back()) {
            distinct_.push_back(knots_[i]);
            mult_.push_back(1);
        } else {
            ++mult_.back();
        }
    }

    if (mult_.front() != degree_ + 1 || mult_.back() != degree_ + 1)
        throw std::invalid_argument("knots: end knots must repeat exactly p+1 times");
    for (std::size_t j = 1; j + 1 < mult_.size(); ++j)
        if (mult_[j] > degree_ + 1)
            throw std::invalid_argument("knots: interior multiplicity " + std::to_string(mult_[j]) +
                                        " exceeds p+1 at knot index " + std::to_string(j));
}

KnotSequence KnotSequence::open_uniform(double a, double b, int degree, int elements,
                                        const std::map<int, int>& multiplicities) {
    if (!(b > a)) throw std::invalid_argument("open_uniform: requires b > a");
    if (degree < 0) throw std::invalid_argument("open_uniform: degree must be >= 0");
    if (elements < 1) throw std::invalid_argument("open_uniform: elements must be >= 1");
    for (const auto& [idx, m] : multiplicities) {
        if (idx < 1 || idx > elements - 1)
            throw std::invalid_argument("open_uniform: multiplicity index " + std::to_string(idx) +
                                        " is not an interior knot");
        if (m < 1 || m > degree + 1)
            throw std::invalid_argument("open_uniform: multiplicity must lie in [1, p+1]");
    }

    std::vector<double> knots;
    knots.reserve(2 * (degree + 1) + elements - 1);
    for (int j = 0; j <= elements; ++j) {
        const double z = (j == elements) ? b : a + j * (b - a) / elements;
        int m = 1;
        if (j == 0 || j == elements) {
            m = degree + 1;
        } else if (auto it = multiplicities.find(j); it != multiplicities.end()) {
            m = it->second;
        }
        knots.insert(knots.end(), m, z);
    }
    return KnotSequence(std::move(knots), degree);
}

double KnotSequence::mesh_size() const {
    double h = 0.0;
    for (std::size_t j = 0; j + 1 < distinct_.size(); ++j)
        h = std::max(h, distinct_[j + 1] - distinct_[j]);
    return h;
}

}  // namespace sdd
