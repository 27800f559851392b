#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "ineq/measures.hpp"

using namespace ineq;

TEST_CASE("hand-computed values on {1,2,3}") {
    const std::vector<double> x = {1.0, 2.0, 3.0};
    CHECK(gini_hat(x) == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
    CHECK(theil_hat(x) == doctest::Approx(0.0872079).epsilon(1e-5));
    CHECK(atkinson_hat(x, 0.5) == doctest::Approx(0.0449159).epsilon(1e-5));
    // epsilon = 1 switches to the geometric mean: 1 - 6^(1/3)/2.
    CHECK(atkinson_hat(x, 1.0) ==
          doctest::Approx(1.0 - std::cbrt(6.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("equal incomes mean zero inequality") {
    const std::vector<double> x(17, 42.0);
    CHECK(gini_hat(x) == doctest::Approx(0.0).scale(1).epsilon(1e-12));
    CHECK(theil_hat(x) == doctest::Approx(0.0).scale(1).epsilon(1e-12));
    CHECK(atkinson_hat(x) == doctest::Approx(0.0).scale(1).epsilon(1e-12));
    CHECK(qri_hat([](double) { return 42.0; }) ==
          doctest::Approx(0.0).scale(1).epsilon(1e-12));
}

TEST_CASE("measures ignore the income scale") {
    std::mt19937_64 rng(99);
    std::lognormal_distribution<double> ln(0.0, 0.8);
    std::vector<double> x(200);
    for (auto& v : x) v = ln(rng);
    const double g = gini_hat(x), t = theil_hat(x), a = atkinson_hat(x);
    for (double c : {1e-3, 1.0, 1e6}) {
        std::vector<double> y(x);
        for (auto& v : y) v *= c;
        CHECK(gini_hat(y) == doctest::Approx(g).epsilon(1e-12));
        CHECK(theil_hat(y) == doctest::Approx(t).epsilon(1e-12));
        CHECK(atkinson_hat(y) == doctest::Approx(a).epsilon(1e-12));
    }
}

TEST_CASE("measures ignore observation order") {
    std::vector<double> x = {5.0, 1.0, 9.0, 2.0, 7.0, 3.0};
    std::vector<double> y(x);
    std::sort(y.begin(), y.end());
    CHECK(gini_hat(x) == doctest::Approx(gini_hat(y)).epsilon(1e-14));
    CHECK(theil_hat(x) == doctest::Approx(theil_hat(y)).epsilon(1e-14));
    CHECK(atkinson_hat(x) == doctest::Approx(atkinson_hat(y)).epsilon(1e-14));
    CHECK(qri_hat_sample(x) == doctest::Approx(qri_hat_sample(y)).epsilon(1e-14));
}

TEST_CASE("a regressive transfer never lowers inequality") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(1.0, 50.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> x(10);
        for (auto& v : x) v = u(rng);
        std::vector<double> y(x);
        const auto lo = std::min_element(y.begin(), y.end());
        const double take = 0.5 * *lo;
        *lo -= take;
        *std::max_element(y.begin(), y.end()) += take;
        CHECK(gini_hat(y) >= gini_hat(x) - 1e-12);
        CHECK(theil_hat(y) >= theil_hat(x) - 1e-12);
        CHECK(atkinson_hat(y) >= atkinson_hat(x) - 1e-12);
    }
}

TEST_CASE("quantile-ratio index of the unit exponential") {
    const auto q = [](double p) { return -std::log1p(-p); };
    CHECK(std::fabs(qri_hat(q, 100) - 0.702) <= 1e-3);
    // Grid refinement barely moves it.
    CHECK(std::fabs(qri_hat(q, 100) - qri_hat(q, 100000)) <= 1e-3);
}

TEST_CASE("sample quantile-ratio index approaches the population value") {
    std::mt19937_64 rng(2024);
    std::exponential_distribution<double> e(1.0);
    std::vector<double> x(20000);
    for (auto& v : x) v = e(rng);
    CHECK(std::fabs(qri_hat_sample(x) - 0.702) <= 0.02);
}

TEST_CASE("input validation") {
    const std::vector<double> empty;
    CHECK_THROWS_AS(gini_hat(empty), std::invalid_argument);
    CHECK_THROWS_AS(theil_hat(empty), std::invalid_argument);
    CHECK_THROWS_AS(atkinson_hat(empty), std::invalid_argument);
    CHECK_THROWS_AS(qri_hat_sample(empty), std::invalid_argument);

    const std::vector<double> bad = {1.0, 0.0, 2.0};
    CHECK_THROWS_AS(gini_hat(bad), std::domain_error);
    CHECK_THROWS_AS(theil_hat(bad), std::domain_error);
    CHECK_THROWS_AS(atkinson_hat(bad), std::domain_error);

    const std::vector<double> ok = {1.0, 2.0};
    CHECK_THROWS_AS(atkinson_hat(ok, 0.0), std::domain_error);
    CHECK_THROWS_AS(atkinson_hat(ok, -1.0), std::domain_error);

    // Only a nonpositive divisor is fatal for the ratio index.
    CHECK_THROWS_AS(qri_hat([](double p) { return p - 0.99; }, 100),
                    std::domain_error);
    CHECK_NOTHROW(qri_hat([](double p) { return p - 0.01; }, 100));
    CHECK_THROWS_AS(qri_hat([](double) { return 1.0; }, 0), std::domain_error);
}

TEST_CASE("measure names round-trip") {
    for (Measure m : {Measure::gini, Measure::theil, Measure::atkinson, Measure::qri})
        CHECK(parse_measure(measure_name(m)) == m);
    CHECK_THROWS_AS(parse_measure("variance"), std::invalid_argument);
}
