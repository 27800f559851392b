#pragma once

#include <span>
#include <vector>

namespace ineq {

double mean(std::span<const double> x);

// Quantile by linear interpolation of order statistics: the p-quantile sits at
// position 1 + (n-1)p among the sorted values.  This one convention is used
// everywhere quantiles of finite samples are taken (binning, bootstrap
// percentiles, raw-data QRI).
double quantile_sorted(std::span<const double> sorted, double p);

std::vector<double> quantiles_sorted(std::span<const double> sorted,
                                     std::span<const double> ps);

}  // namespace ineq
