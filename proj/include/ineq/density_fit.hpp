#pragma once

#include <stdexcept>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ineq/grouped.hpp"
#include "ineq/model.hpp"

namespace ineq {

enum class FitMethod { gld, li };

// FKML generalized lambda parameters: Q(p) = lambda + [(p^alpha - 1)/alpha -
// ((1-p)^beta - 1)/beta] / eta, with the logarithmic limits at alpha,beta -> 0.
// Valid whenever eta > 0.
struct GldParams {
    double lambda = 0.0;
    double eta = 1.0;
    double alpha = 0.0;
    double beta = 0.0;
    double residual = 0.0;  // least-squares objective at the optimum
    int iterations = 0;
    bool converged = true;
};

// Piecewise-linear density on the bounded bins, exponential density on an
// unbounded final bin.  alphas/betas cover the linearly-fitted bins: all J
// when the top is bounded, the first J-1 when the tail is present.
struct LiDensity {
    std::vector<double> boundaries;  // a_0..a_J (a_J = +inf iff has_tail)
    std::vector<double> freqs;       // relative frequencies, size J
    std::vector<double> cum;         // cumulative, size J+1, cum[0]=0, cum[J]=1
    std::vector<double> alphas;      // density intercepts
    std::vector<double> betas;       // density slopes
    bool has_tail = false;
    double tail_eta = 0.0;     // relative frequency of the tail bin
    double tail_lambda = 0.0;  // mean excess over a_{J-1}
};

struct FitError : std::runtime_error {
    FitError(const std::string& what, double residual)
        : std::runtime_error(what), best_residual(residual) {}
    double best_residual;
};

double gld_quantile(const GldParams& g, double p);
double gld_density_at(const GldParams& g, double p);  // f(Q(p)) = 1/Q'(p)

double li_quantile(const LiDensity& li, double p);
double li_density_at(const LiDensity& li, double p);

// Least-squares percentile matching of the interior boundaries (a_k, F_k),
// k = 1..J-1, by Nelder-Mead over (lambda, ln eta, alpha, beta) from a fixed
// ring of starts; ties are broken toward the lightest admissible upper tail.
// Throws FitError carrying the best residual when no start converges.
GldParams fit_gld(const GroupedData& g);

// Per-bin linear densities from frequencies and means, slopes clamped so the
// density stays nonnegative; exponential tail on an unbounded final bin.
LiDensity fit_li(const GroupedData& g);

class EstimatedDistribution final : public QuantileModel {
  public:
    explicit EstimatedDistribution(GldParams p) : payload_(std::move(p)) {}
    explicit EstimatedDistribution(LiDensity d) : payload_(std::move(d)) {}

    FitMethod method() const {
        return std::holds_alternative<GldParams>(payload_) ? FitMethod::gld
                                                           : FitMethod::li;
    }
    const GldParams& gld() const { return std::get<GldParams>(payload_); }
    const LiDensity& li() const { return std::get<LiDensity>(payload_); }

    double quantile(double p) const override;
    double density_at(double p) const override;
    double cdf(double x) const;  // clamped to [0,1]

    nlohmann::json to_json() const;
    static EstimatedDistribution from_json(const nlohmann::json& j);

  private:
    std::variant<GldParams, LiDensity> payload_;
};

// Convenience: fit with either method.
EstimatedDistribution fit_distribution(const GroupedData& g, FitMethod method);

}  // namespace ineq
