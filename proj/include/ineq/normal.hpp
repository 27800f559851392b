#pragma once

namespace ineq {

// Inverse standard normal CDF (rational approximation, absolute error < 1e-9
// over (0,1)).  Throws std::domain_error unless 0 < p < 1.
double inv_norm_cdf(double p);

// Standard normal CDF via erfc.
double norm_cdf(double x);

}  // namespace ineq
