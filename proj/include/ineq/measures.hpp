#pragma once

#include <functional>
#include <span>
#include <string>

namespace ineq {

enum class Measure { gini, theil, atkinson, qri };

std::string measure_name(Measure m);
Measure parse_measure(const std::string& name);

// Sample versions operate on positive incomes; they sort a private copy
// where order matters.
double gini_hat(std::span<const double> x);
double theil_hat(std::span<const double> x);
double atkinson_hat(std::span<const double> x, double epsilon = 0.5);

// Quantile-ratio index from any quantile evaluator: the mean of
// 1 - q(p/2)/q(1-p/2) over the grid p_j = (j - 1/2)/J.
double qri_hat(const std::function<double(double)>& quantile, int J = 100);
double qri_hat_sample(std::span<const double> x, int J = 100);

}  // namespace ineq
