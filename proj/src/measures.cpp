#include "ineq/measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ineq/stats.hpp"

namespace ineq {

namespace {

std::vector<double> checked_copy(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("measure: empty sample");
    for (double v : x)
        if (!(v > 0.0)) throw std::domain_error("measure: incomes must be positive");
    return {x.begin(), x.end()};
}

}  // namespace

std::string measure_name(Measure m) {
    switch (m) {
        case Measure::gini: return "gini";
        case Measure::theil: return "theil";
        case Measure::atkinson: return "atkinson";
        case Measure::qri: return "qri";
    }
    throw std::logic_error("unreachable");
}

Measure parse_measure(const std::string& name) {
    if (name == "gini") return Measure::gini;
    if (name == "theil") return Measure::theil;
    if (name == "atkinson") return Measure::atkinson;
    if (name == "qri") return Measure::qri;
    throw std::invalid_argument("unknown measure: " + name);
}

double gini_hat(std::span<const double> x) {
    auto v = checked_copy(x);
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double weighted = 0.0, total = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        weighted += static_cast<double>(i + 1) * v[i];
        total += v[i];
    }
    return 2.0 * weighted / (n * total) - (n + 1.0) / n;
}

double theil_hat(std::span<const double> x) {
    const auto v = checked_copy(x);
    const double m = mean(v);
    double s = 0.0;
    for (double xi : v) s += xi / m * std::log(xi / m);
    return s / static_cast<double>(v.size());
}

double atkinson_hat(std::span<const double> x, double epsilon) {
    if (!(epsilon > 0.0)) throw std::domain_error("atkinson: epsilon must be > 0");
    const auto v = checked_copy(x);
    const double n = static_cast<double>(v.size());
    const double m = mean(v);
    if (epsilon == 1.0) {
        double s = 0.0;
        for (double xi : v) s += std::log(xi);
        return 1.0 - std::exp(s / n) / m;
    }
    double s = 0.0;
    for (double xi : v) s += std::pow(xi, 1.0 - epsilon);
    return 1.0 - std::pow(s / n, 1.0 / (1.0 - epsilon)) / m;
}

double qri_hat(const std::function<double(double)>& quantile, int J) {
    if (J < 1) throw std::domain_error("qri: grid size must be >= 1");
    double s = 0.0;
    for (int j = 1; j <= J; ++j) {
        const double p = (j - 0.5) / J;
        const double lo = quantile(p / 2.0);
        const double hi = quantile(1.0 - p / 2.0);
        if (!(hi > 0.0)) throw std::domain_error("qri: upper quantile must be positive");
        s += 1.0 - lo / hi;
    }
    return s / J;
}

double qri_hat_sample(std::span<const double> x, int J) {
    auto v = checked_copy(x);
    std::sort(v.begin(), v.end());
    return qri_hat([&](double p) { return quantile_sorted(v, p); }, J);
}

}  // namespace ineq
