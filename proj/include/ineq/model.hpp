#pragma once

namespace ineq {

// A distribution seen through its quantile function.  density_at returns the
// density evaluated at the p-th quantile, f(Q(p)) -- the form quantile-based
// variances consume, and available without inverting anything.
struct QuantileModel {
    virtual ~QuantileModel() = default;
    virtual double quantile(double p) const = 0;     // p in (0,1)
    virtual double density_at(double p) const = 0;   // f(quantile(p))
};

}  // namespace ineq
