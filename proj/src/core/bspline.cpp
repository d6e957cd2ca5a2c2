#include "core/bspline.hpp"

#include <algorithm>
#include <stdexcept>

namespace sdd {

int find_span(const KnotSequence& ks, double x) {
    const std::span<const double> knots = ks.knots();
    if (x < ks.lower() || x > ks.upper())
        throw std::invalid_argument("bspline: x outside the knot support");
    if (x == ks.upper()) {
        // last non-empty interval, so values at b are well defined
        auto it = std::lower_bound(knots.begin(), knots.end(), ks.upper());
        return static_cast<int>(it - knots.begin()) - 1;
    }
    auto it = std::upper_bound(knots.begin(), knots.end(), x);
    return static_cast<int>(it - knots.begin()) - 1;
}

double eval_bspline(const KnotSequence& ks, int i, double x) {
    const int n = ks.basis_count();
    const int p = ks.degree();
    if (i < 0 || i >= n) throw std::invalid_argument("bspline: basis index out of range");
    if (x < ks.lower() || x > ks.upper())
        throw std::invalid_argument("bspline: x outside the knot support");
    const std::span<const double> t = ks.knots();
    const bool at_end = (x == ks.upper());

    // Bottom-up Cox-de Boor over the band [i, i+p], 0/0 taken as zero.
    std::vector<double> vals(p + 1);
    for (int j = 0; j <= p; ++j) {
        const int idx = i + j;
        const bool inside = t[idx] <= x && x < t[idx + 1];
        const bool closes_end = at_end && t[idx] < t[idx + 1] && t[idx + 1] == ks.upper();
        vals[j] = (inside || closes_end) ? 1.0 : 0.0;
    }
    for (int q = 1; q <= p; ++q) {
        for (int j = 0; j <= p - q; ++j) {
            const int idx = i + j;
            const double dl = t[idx + q] - t[idx];
            const double dr = t[idx + q + 1] - t[idx + 1];
            double acc = 0.0;
            if (dl > 0.0) acc += (x - t[idx]) / dl * vals[j];
            if (dr > 0.0) acc += (t[idx + q + 1] - x) / dr * vals[j + 1];
            vals[j] = acc;
        }
    }
    return vals[0];
}

void eval_all(const KnotSequence& ks, double x, std::span<double> out) {
    const int n = ks.basis_count();
    const int p = ks.degree();
    if (static_cast<int>(out.size()) != n)
        throw std::invalid_argument("bspline: output span has wrong size");
    std::fill(out.begin(), out.end(), 0.0);

    const int mu = find_span(ks, x);
    const std::span<const double> t = ks.knots();

    // Local triangular scheme seeded at the containing element: only the
    // p+1 functions supported there are computed.
    std::vector<double> vals(p + 1), left(p + 1), right(p + 1);
    vals[0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = x - t[mu + 1 - j];
        right[j] = t[mu + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double tmp = vals[r] / (right[r + 1] + left[j - r]);
            vals[r] = saved + right[r + 1] * tmp;
            saved = left[j - r] * tmp;
        }
        vals[j] = saved;
    }
    for (int j = 0; j <= p; ++j) out[mu - p + j] = vals[j];
}

std::vector<double> eval_all(const KnotSequence& ks, double x) {
    std::vector<double> out(ks.basis_count());
    eval_all(ks, x, out);
    return out;
}

}  // namespace sdd
