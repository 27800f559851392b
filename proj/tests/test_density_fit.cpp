#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ineq/density_fit.hpp"
#include "ineq/grouped.hpp"

using namespace ineq;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

GroupedData fixture() {
    std::ifstream in(std::string(TEST_DATA_DIR) + "/aus_household_1967.csv");
    REQUIRE(in.good());
    return parse_grouped(in, TableFormat::bins_csv);
}

// Two bounded bins plus an exponential tail, all hand-integrable.
GroupedData tail_example() {
    GroupedData g;
    g.boundaries = {0.0, 5.0, 10.0, kInf};
    g.counts = {5.0, 4.0, 1.0};
    g.means = {2.5, 7.5, 12.0};
    return g;
}

}  // namespace

TEST_CASE("linear density slopes come from the bin means") {
    GroupedData g;
    g.boundaries = {0.0, 1.0, 2.0};
    g.counts = {1.0, 1.0};
    g.means = {7.0 / 12.0, 1.5};
    const auto li = fit_li(g);

    REQUIRE(li.alphas.size() == 2);
    CHECK_FALSE(li.has_tail);
    // slope = freq * 12 (mean - midpoint) / width^3; intercept balances mass.
    CHECK(li.betas[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(li.alphas[0] == doctest::Approx(0.25).epsilon(1e-12));
    // A mean at the midpoint leaves the density flat.
    CHECK(li.betas[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(li.alphas[1] == doctest::Approx(0.5).epsilon(1e-12));

    // Inverting alpha x + beta x^2/2 = p on the first bin: the positive root.
    CHECK(li_quantile(li, 0.25) ==
          doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-12));
    CHECK(li_quantile(li, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(li_quantile(li, 0.75) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(li_density_at(li, 0.25) ==
          doctest::Approx(0.25 + 0.5 * (std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("slopes are clamped so the density stays nonnegative") {
    GroupedData g;
    g.boundaries = {0.0, 1.0, 2.0};
    g.counts = {1.0, 1.0};
    g.means = {0.95, 1.5};  // way above the midpoint: unclamped slope would dip negative
    const auto li = fit_li(g);
    // |slope| tops out at 2 freq / width^2, putting a zero at one bin edge.
    CHECK(li.betas[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(li.alphas[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(li.alphas[0] + li.betas[0] * 0.0 == doctest::Approx(0.0));
    // Clamping reshapes the bin, never its mass.
    const double mass =
        li.alphas[0] * 1.0 + li.betas[0] * 0.5;  // integral of a + b x over [0,1]
    CHECK(mass == doctest::Approx(li.freqs[0]).epsilon(1e-12));
}

TEST_CASE("unbounded final bin gets an exponential tail") {
    const auto li = fit_li(tail_example());
    REQUIRE(li.has_tail);
    CHECK(li.tail_eta == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(li.tail_lambda == doctest::Approx(2.0).epsilon(1e-12));
    REQUIRE(li.alphas.size() == 2);  // tail bin carries no linear piece

    // Q(0.95) = 10 - lambda ln(1 - (0.95 - 0.9)/0.1) = 10 + 2 ln 2.
    CHECK(li_quantile(li, 0.95) ==
          doctest::Approx(10.0 + 2.0 * std::log(2.0)).epsilon(1e-12));
    // Tail density (eta/lambda) e^{-(x - a)/lambda} at that point.
    CHECK(li_density_at(li, 0.95) == doctest::Approx(0.025).epsilon(1e-12));

    const EstimatedDistribution m(li);
    CHECK(m.cdf(10.0 + 2.0 * std::log(2.0)) == doctest::Approx(0.95).epsilon(1e-12));
}

TEST_CASE("fitted household table has the expected tail") {
    const auto li = fit_li(fixture());
    REQUIRE(li.has_tail);
    CHECK(li.tail_eta == doctest::Approx(110.0 / 5440.0).epsilon(1e-12));
    CHECK(li.tail_lambda == doctest::Approx(4617.69).epsilon(1e-12));
    double mass = 0.0;
    for (std::size_t j = 0; j + 1 < li.boundaries.size() - 1; ++j) {
        const double lo = li.boundaries[j], hi = li.boundaries[j + 1];
        mass += li.alphas[j] * (hi - lo) + 0.5 * li.betas[j] * (hi * hi - lo * lo);
    }
    CHECK(mass + li.tail_eta == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("quantile and cdf invert each other across the whole range") {
    const EstimatedDistribution m(fit_li(fixture()));
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> u(1e-6, 1.0 - 1e-6);
    for (int i = 0; i < 1000; ++i) {
        const double p = u(rng);
        CHECK(std::fabs(m.cdf(m.quantile(p)) - p) <= 1e-9);
    }
}

TEST_CASE("quantile functions are nondecreasing") {
    const EstimatedDistribution li(fit_li(fixture()));
    GldParams g{3.0, 0.8, 0.15, -0.2};
    double prev_li = -kInf, prev_gld = -kInf;
    for (int i = 1; i < 10000; ++i) {
        const double p = i / 10000.0;
        const double a = li.quantile(p), b = gld_quantile(g, p);
        CHECK(a >= prev_li);
        CHECK(b >= prev_gld);
        prev_li = a;
        prev_gld = b;
    }
}

TEST_CASE("quantiles reject endpoint probabilities") {
    const auto li = fit_li(tail_example());
    CHECK_THROWS_AS(li_quantile(li, 0.0), std::domain_error);
    CHECK_THROWS_AS(li_quantile(li, 1.0), std::domain_error);
    CHECK_THROWS_AS(gld_quantile(GldParams{}, -0.1), std::domain_error);
    CHECK_THROWS_AS(gld_quantile(GldParams{}, 1.0), std::domain_error);
}

TEST_CASE("generalized lambda closed forms") {
    // (0,1,1,1) is uniform on (-1,1): Q(p) = 2p - 1.
    GldParams uni{0.0, 1.0, 1.0, 1.0};
    CHECK(gld_quantile(uni, 0.5) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(gld_quantile(uni, 0.8) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(gld_density_at(uni, 0.3) == doctest::Approx(0.5).epsilon(1e-15));

    // Both shapes zero is the standard logistic: Q(p) = ln(p/(1-p)).
    GldParams logi{0.0, 1.0, 0.0, 0.0};
    CHECK(gld_quantile(logi, 0.75) == doctest::Approx(std::log(3.0)).epsilon(1e-14));
    CHECK(gld_density_at(logi, 0.5) == doctest::Approx(0.25).epsilon(1e-14));

    // Near-zero shapes must agree with the logarithmic limit, not blow up.
    GldParams near{0.0, 1.0, 1e-9, 1e-9};
    for (double p : {0.1, 0.5, 0.9})
        CHECK(gld_quantile(near, p) ==
              doctest::Approx(gld_quantile(logi, p)).epsilon(1e-9));
}

TEST_CASE("density is the reciprocal quantile slope") {
    GldParams g{1.0, 2.0, 0.3, -0.1};
    for (double p : {0.05, 0.3, 0.5, 0.7, 0.95}) {
        const double eps = 1e-7;
        const double slope =
            (gld_quantile(g, p + eps) - gld_quantile(g, p - eps)) / (2 * eps);
        CHECK(gld_density_at(g, p) * slope == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("percentile matching recovers a generalized lambda shape") {
    GldParams truth{0.0, 1.0, 0.2, 0.2};
    GroupedData g;
    g.boundaries.push_back(gld_quantile(truth, 1e-9) - 1.0);
    for (int k = 1; k <= 9; ++k)
        g.boundaries.push_back(gld_quantile(truth, k / 10.0));
    g.boundaries.push_back(kInf);
    g.counts.assign(10, 500.0);

    const auto fit = fit_gld(g);
    CHECK(fit.converged);
    double amax = 0.0;
    for (int k = 1; k <= 9; ++k)
        amax = std::max(amax, std::fabs(gld_quantile(truth, k / 10.0)));
    for (int k = 1; k <= 9; ++k) {
        const double want = gld_quantile(truth, k / 10.0);
        const double got = gld_quantile(fit, k / 10.0);
        const double denom = std::max(std::fabs(want), 0.01 * amax);
        CHECK(std::fabs(got - want) / denom <= 1e-2);
    }
}

TEST_CASE("percentile matching nails a uniform sample exactly") {
    GroupedData g;
    g.boundaries.push_back(-1.0);
    for (int k = 1; k <= 9; ++k) g.boundaries.push_back(2.0 * (k / 10.0) - 1.0);
    g.boundaries.push_back(1.0);
    g.counts.assign(10, 100.0);
    const auto fit = fit_gld(g);
    for (int k = 1; k <= 9; ++k) {
        const double want = 2.0 * (k / 10.0) - 1.0;
        CHECK(std::fabs(gld_quantile(fit, k / 10.0) - want) <= 1e-4);
    }
}

TEST_CASE("percentile matching approximates an exponential through deciles") {
    GroupedData g;
    g.boundaries.push_back(0.0);
    for (int k = 1; k <= 9; ++k) g.boundaries.push_back(-std::log1p(-k / 10.0));
    g.boundaries.push_back(kInf);
    g.counts.assign(10, 500.0);
    const auto fit = fit_gld(g);
    const double q50 = gld_quantile(fit, 0.5);
    CHECK(std::fabs(q50 - std::log(2.0)) / std::log(2.0) <= 0.05);
}

TEST_CASE("too few bins for percentile matching") {
    GroupedData g;
    g.boundaries = {0.0, 1.0, 2.0, 3.0, 4.0};
    g.counts = {1.0, 1.0, 1.0, 1.0};
    CHECK_THROWS_AS(fit_gld(g), std::invalid_argument);
}

TEST_CASE("linear fit requires means and a sane tail") {
    GroupedData g = tail_example();
    g.means.clear();
    CHECK_THROWS_AS(fit_li(g), std::invalid_argument);

    GroupedData h = tail_example();
    h.means[2] = 9.0;  // tail mean at or below the last finite boundary
    CHECK_THROWS_AS(fit_li(h), std::invalid_argument);
}

TEST_CASE("models serialize to json and back") {
    const EstimatedDistribution li(fit_li(fixture()));
    const auto li2 = EstimatedDistribution::from_json(li.to_json());
    CHECK(li2.method() == FitMethod::li);
    for (double p : {0.05, 0.25, 0.5, 0.75, 0.99})
        CHECK(li2.quantile(p) == doctest::Approx(li.quantile(p)).epsilon(1e-15));

    GldParams g{3622.0, 8.7e-4, 0.15, -0.24};
    const EstimatedDistribution gm(g);
    const auto gm2 = EstimatedDistribution::from_json(gm.to_json());
    CHECK(gm2.method() == FitMethod::gld);
    for (double p : {0.05, 0.5, 0.95})
        CHECK(gm2.quantile(p) == doctest::Approx(gm.quantile(p)).epsilon(1e-15));

    auto j = gm.to_json();
    j["params"]["eta"] = -1.0;
    CHECK_THROWS_AS(EstimatedDistribution::from_json(j), std::invalid_argument);
}
