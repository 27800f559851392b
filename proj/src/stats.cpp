#include "ineq/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace ineq {

double mean(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("mean: empty input");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("quantile_sorted: empty input");
    if (!(p >= 0.0 && p <= 1.0))
        throw std::domain_error("quantile_sorted: p outside [0,1]");
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double h = (static_cast<double>(n) - 1.0) * p;  // 0-based position
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= n) return sorted[n - 1];
    const double w = h - static_cast<double>(lo);
    return sorted[lo] + w * (sorted[lo + 1] - sorted[lo]);
}

std::vector<double> quantiles_sorted(std::span<const double> sorted,
                                     std::span<const double> ps) {
    std::vector<double> out;
    out.reserve(ps.size());
    for (double p : ps) out.push_back(quantile_sorted(sorted, p));
    return out;
}

}  // namespace ineq
