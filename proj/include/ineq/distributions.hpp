#pragma once

#include <string>
#include <vector>

#include "ineq/model.hpp"

namespace ineq {

enum class Family {
    lognormal,      // (mu, sigma)
    singh_maddala,  // (a, b, q)
    dagum,          // (a, b, p)
    chi_square,     // (k)
    pareto2,        // (scale, shape)
    exponential,    // (rate)
    weibull,        // (shape[, scale=1])
};

struct RefDistribution {
    Family family;
    std::vector<double> params;
};

// Validates parameter count and positivity; throws std::invalid_argument.
RefDistribution make_distribution(Family family, std::vector<double> params);

// "family:p1,p2,..." e.g. "singhmaddala:1.6971,87.6981,8.3679".
RefDistribution parse_distribution(const std::string& spec);

std::string family_name(Family f);

double ref_quantile(const RefDistribution& d, double p);
double ref_density(const RefDistribution& d, double x);  // 0 outside support

struct TrueMeasures {
    double gini, theil, atkinson, qri;
};

// Population values by quadrature over p in (1e-10, 1-1e-10) at relative
// tolerance 1e-8; QRI on the J-point midpoint grid.
TrueMeasures true_measures(const RefDistribution& d, double epsilon = 0.5,
                           int J = 100);

// QuantileModel over an exact reference distribution (bypasses fitting; used
// by variance oracles and as a baseline model).
class RefModel final : public QuantileModel {
  public:
    explicit RefModel(RefDistribution d) : d_(std::move(d)) {}
    double quantile(double p) const override { return ref_quantile(d_, p); }
    double density_at(double p) const override {
        return ref_density(d_, ref_quantile(d_, p));
    }
    const RefDistribution& dist() const { return d_; }

  private:
    RefDistribution d_;
};

}  // namespace ineq
