#pragma once

#include <functional>

namespace ineq {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;  // absolute error estimate
    int intervals = 0;   // panels used
};

// Globally adaptive Gauss-Kronrod 7-15 on [a,b]: the panel with the largest
// error estimate is bisected until the summed estimate satisfies
// |error| <= max(rel_tol*|value|, abs_tol).  Throws std::runtime_error with
// the achieved estimate when the budget of max_intervals panels is exhausted.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-8, double abs_tol = 0.0,
                     int max_intervals = 5000);

}  // namespace ineq
