#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "ineq/density_fit.hpp"
#include "ineq/distributions.hpp"
#include "ineq/grouped.hpp"
#include "ineq/intervals.hpp"

namespace ineq {

struct SimConfig {
    RefDistribution dist;
    std::size_t n = 250;
    Scheme scheme = Scheme::quintiles;
    FitMethod fit = FitMethod::li;
    std::vector<Measure> measures{Measure::gini, Measure::theil, Measure::atkinson,
                                  Measure::qri};
    bool wald_qri = true;  // add a Wald cell for the QRI
    int reps = 300;
    int B = 300;
    double level = 0.95;
    double epsilon = 0.5;
    int J = 100;
    std::uint64_t seed = 0;
    int threads = 0;
};

struct CoverageCell {
    Measure measure{};
    CiMethod method{};
    double coverage = 0.0;   // over successful replicates
    double avg_width = 0.0;  // over successful replicates
};

struct CoverageResult {
    SimConfig config;
    std::vector<CoverageCell> cells;
    int failures = 0;  // replicates where fitting/intervals threw
};

// Repeatedly: sample from the reference distribution, bin at sample
// quantiles, refit, build intervals, score against the true measure values.
CoverageResult run_coverage(const SimConfig& config);

// CSV rows "dist,n,scheme,fit,measure,method,coverage,avg_width,failures,reps,B,seed".
void write_sim_csv(std::ostream& out, const CoverageResult& result,
                   bool header = true);

// Sampling distributions of centered estimates (estimate minus truth) for
// lognormal populations of varying spread.
struct CenteredConfig {
    std::vector<double> sigmas{0.5, 1.0, 1.5, 2.0};
    std::size_t n = 250;
    Scheme scheme = Scheme::quintiles;
    FitMethod fit = FitMethod::li;
    std::vector<Measure> measures{Measure::gini, Measure::atkinson, Measure::qri};
    int reps = 300;
    double epsilon = 0.5;
    int J = 100;
    int n_eval = 10000;
    std::uint64_t seed = 0;
    int threads = 0;
};

struct CenteredRow {
    double sigma = 0.0;
    Measure measure{};
    double value = 0.0;
};

using PointEstimator = std::function<double(const QuantileModel&, Measure)>;

// estimator defaults to the model plug-in; injectable for testing.
std::vector<CenteredRow> centered_estimates(const CenteredConfig& config,
                                            const PointEstimator& estimator = {});

// CSV rows "sigma,measure,centered_estimate".
void write_centered_csv(std::ostream& out, std::span<const CenteredRow> rows,
                        bool header = true);

}  // namespace ineq
