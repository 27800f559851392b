#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ineq/measures.hpp"
#include "ineq/model.hpp"

namespace ineq {

enum class CiMethod { bootstrap_percentile, wald };

std::string ci_method_name(CiMethod m);

struct IntervalResult {
    Measure measure{};
    CiMethod method{};
    double point = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.95;
    int replicates = 0;  // 0 for Wald
    std::uint64_t seed = 0;
};

struct BootstrapOptions {
    int B = 500;
    double level = 0.95;
    double epsilon = 0.5;  // Atkinson aversion
    int J = 100;           // QRI grid size
    int n_eval = 10000;    // plug-in evaluation grid
    std::uint64_t seed = 0;
    int threads = 0;  // 0 = hardware concurrency
};

// Evaluation floor: fitted quantile functions can dip to absurd values in
// the extreme left tail, so model evaluations are floored at a tiny
// fraction of the median.
double clamp_floor(const QuantileModel& m);

class ClampedQuantile {
public:
    explicit ClampedQuantile(const QuantileModel& m);
    double operator()(double p) const;

private:
    const QuantileModel* model_;
    double floor_;
};

// Measure of the fitted distribution itself (grid evaluation for the
// sample-defined measures, direct grid mean for the QRI).
double plugin_estimate(const QuantileModel& m, Measure measure,
                       const BootstrapOptions& opt = {});

std::vector<IntervalResult> bootstrap_ci(const QuantileModel& m, std::size_t n,
                                         std::span<const Measure> measures,
                                         const BootstrapOptions& opt);

// Distribution-free variance of the QRI estimator via the quantile-process
// delta method.
struct QriVariance {
    double variance = 0.0;
    int J = 0;
    std::size_t n = 0;
};

QriVariance qri_variance(const QuantileModel& m, std::size_t n, int J = 100);

IntervalResult wald_qri_ci(const QuantileModel& m, std::size_t n,
                           const BootstrapOptions& opt);

// Two-sample difference (second minus first) from independently fitted models.
std::vector<IntervalResult> bootstrap_diff_ci(const QuantileModel& m1, std::size_t n1,
                                              const QuantileModel& m2, std::size_t n2,
                                              std::span<const Measure> measures,
                                              const BootstrapOptions& opt);

IntervalResult wald_qri_diff_ci(const QuantileModel& m1, std::size_t n1,
                                const QuantileModel& m2, std::size_t n2,
                                const BootstrapOptions& opt);

}  // namespace ineq
