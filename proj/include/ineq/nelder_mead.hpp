#pragma once

#include <functional>
#include <span>
#include <vector>

namespace ineq {

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;  // simplex diameter fell below tolerance
};

// Downhill simplex minimizer with standard reflection/expansion/contraction/
// shrink coefficients (1, 2, 0.5, 0.5).  The initial simplex is x0 plus one
// vertex per coordinate offset by step[i].  Converged when the max-norm
// diameter of the simplex drops below diameter_tol.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> x0,
                             std::span<const double> step,
                             double diameter_tol, int max_iter);

}  // namespace ineq
