#include "core/gauss.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace sdd {

namespace {

// Newton iteration on P_q with the Chebyshev initial guess. Converges in a
// handful of steps for all practical orders; nodes come out symmetric.
GaussLegendre compute_rule(int q) {
    if (q < 1) throw std::invalid_argument("gauss_legendre: points must be >= 1");
    GaussLegendre rule;
    rule.nodes.resize(q);
    rule.weights.resize(q);
    const int half = (q + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // three-term recurrence for P_q(x) and P_{q-1}(x)
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= q; ++j) {
                double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = q * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[q - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[q - 1 - i] = w;
    }
    if (q % 2 == 1) rule.nodes[q / 2] = 0.0;
    return rule;
}

}  // namespace

const GaussLegendre& gauss_legendre(int points) {
    static std::mutex mutex;
    static std::map<int, GaussLegendre> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(points);
    if (it == cache.end()) it = cache.emplace(points, compute_rule(points)).first;
    return it->second;
}

CompositeRule composite_gauss(std::span<const double> breaks, int points) {
    if (breaks.size() < 2) throw std::invalid_argument("composite_gauss: need at least two breakpoints");
    const GaussLegendre& base = gauss_legendre(points);
    CompositeRule rule;
    for (std::size_t e = 0; e + 1 < breaks.size(); ++e) {
        const double lo = breaks[e], hi = breaks[e + 1];
        if (hi < lo) throw std::invalid_argument("composite_gauss: breakpoints must be non-decreasing");
        if (hi == lo) continue;
        const double mid = 0.5 * (hi + lo), scale = 0.5 * (hi - lo);
        for (int i = 0; i < points; ++i) {
            rule.nodes.push_back(mid + scale * base.nodes[i]);
            rule.weights.push_back(scale * base.weights[i]);
        }
    }
    return rule;
}

}  // namespace sdd
