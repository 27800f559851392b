#include "ineq/distributions.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ineq/normal.hpp"
#include "ineq/quadrature.hpp"

namespace ineq {

namespace {

void require_positive(const std::vector<double>& params, std::size_t from,
                      const char* what) {
    for (std::size_t i = from; i < params.size(); ++i)
        if (!(params[i] > 0.0)) {
            std::ostringstream msg;
            msg << what << ": parameter " << (i + 1) << " must be > 0";
            throw std::invalid_argument(msg.str());
        }
}

std::size_t arity(Family f) {
    switch (f) {
        case Family::lognormal: return 2;
        case Family::singh_maddala: return 3;
        case Family::dagum: return 3;
        case Family::chi_square: return 1;
        case Family::pareto2: return 2;
        case Family::exponential: return 1;
        case Family::weibull: return 2;  // scale optional, defaulted in make
    }
    return 0;
}

}  // namespace

RefDistribution make_distribution(Family family, std::vector<double> params) {
    if (family == Family::weibull && params.size() == 1) params.push_back(1.0);
    if (params.size() != arity(family))
        throw std::invalid_argument("distribution " + family_name(family) +
                                    ": wrong number of parameters");
    // all parameters are scales/shapes except the lognormal location mu
    require_positive(params, family == Family::lognormal ? 1 : 0,
                     family_name(family).c_str());
    return {family, std::move(params)};
}

RefDistribution parse_distribution(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    Family fam;
    if (name == "lognormal") fam = Family::lognormal;
    else if (name == "singhmaddala") fam = Family::singh_maddala;
    else if (name == "dagum") fam = Family::dagum;
    else if (name == "chisquare") fam = Family::chi_square;
    else if (name == "pareto2") fam = Family::pareto2;
    else if (name == "exponential") fam = Family::exponential;
    else if (name == "weibull") fam = Family::weibull;
    else throw std::invalid_argument("unknown distribution family: " + name);

    std::vector<double> params;
    if (colon != std::string::npos) {
        std::istringstream in(spec.substr(colon + 1));
        std::string tok;
        while (std::getline(in, tok, ',')) {
            std::size_t pos = 0;
            double v;
            try {
                v = std::stod(tok, &pos);
            } catch (const std::exception&) {
                throw std::invalid_argument("bad parameter '" + tok + "' in " + spec);
            }
            if (pos != tok.size())
                throw std::invalid_argument("bad parameter '" + tok + "' in " + spec);
            params.push_back(v);
        }
    }
    return make_distribution(fam, std::move(params));
}

std::string family_name(Family f) {
    switch (f) {
        case Family::lognormal: return "lognormal";
        case Family::singh_maddala: return "singhmaddala";
        case Family::dagum: return "dagum";
        case Family::chi_square: return "chisquare";
        case Family::pareto2: return "pareto2";
        case Family::exponential: return "exponential";
        case Family::weibull: return "weibull";
    }
    return "?";
}

double ref_quantile(const RefDistribution& d, double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("ref_quantile: p outside (0,1)");
    const auto& c = d.params;
    switch (d.family) {
        case Family::lognormal:
            return std::exp(c[0] + c[1] * inv_norm_cdf(p));
        case Family::singh_maddala:
            return c[1] * std::pow(std::pow(1.0 - p, -1.0 / c[2]) - 1.0, 1.0 / c[0]);
        case Family::dagum:
            return c[1] * std::pow(std::pow(p, -1.0 / c[2]) - 1.0, -1.0 / c[0]);
        case Family::chi_square:
            return boost::math::quantile(boost::math::chi_squared(c[0]), p);
        case Family::pareto2:
            return c[0] * (std::pow(1.0 - p, -1.0 / c[1]) - 1.0);
        case Family::exponential:
            return -std::log1p(-p) / c[0];
        case Family::weibull:
            return c[1] * std::pow(-std::log1p(-p), 1.0 / c[0]);
    }
    return 0.0;
}

double ref_density(const RefDistribution& d, double x) {
    const auto& c = d.params;
    switch (d.family) {
        case Family::lognormal: {
            if (x <= 0.0) return 0.0;
            const double z = (std::log(x) - c[0]) / c[1];
            return std::exp(-0.5 * z * z) /
                   (x * c[1] * std::sqrt(2.0 * std::numbers::pi));
        }
        case Family::singh_maddala: {
            if (x <= 0.0) return 0.0;
            const double a = c[0], b = c[1], q = c[2];
            const double t = std::pow(x / b, a);
            return a * q / b * std::pow(x / b, a - 1.0) * std::pow(1.0 + t, -q - 1.0);
        }
        case Family::dagum: {
            if (x <= 0.0) return 0.0;
            const double a = c[0], b = c[1], pp = c[2];
            const double t = std::pow(x / b, -a);
            return a * pp / b * std::pow(x / b, -a - 1.0) * std::pow(1.0 + t, -pp - 1.0);
        }
        case Family::chi_square: {
            if (x < 0.0) return 0.0;
            return boost::math::pdf(boost::math::chi_squared(c[0]), x);
        }
        case Family::pareto2: {
            if (x < 0.0) return 0.0;
            return c[1] / c[0] * std::pow(1.0 + x / c[0], -c[1] - 1.0);
        }
        case Family::exponential:
            return x < 0.0 ? 0.0 : c[0] * std::exp(-c[0] * x);
        case Family::weibull: {
            if (x < 0.0) return 0.0;
            const double k = c[0], s = c[1];
            if (x == 0.0) return k > 1.0 ? 0.0 : (k == 1.0 ? 1.0 / s : 0.0);
            const double t = std::pow(x / s, k);
            return k / s * std::pow(x / s, k - 1.0) * std::exp(-t);
        }
    }
    return 0.0;
}

TrueMeasures true_measures(const RefDistribution& d, double epsilon, int J) {
    if (!(epsilon > 0.0))
        throw std::domain_error("true_measures: epsilon must be > 0");
    if (J < 1) throw std::domain_error("true_measures: J must be >= 1");
    constexpr double delta = 1e-10;
    constexpr double rel = 1e-8;
    const auto Q = [&](double p) { return ref_quantile(d, p); };

    const double mu = integrate([&](double p) { return Q(p); }, delta, 1.0 - delta, rel).value;
    const double gini =
        2.0 * integrate([&](double p) { return p * Q(p); }, delta, 1.0 - delta, rel).value /
            mu - 1.0;
    const double theil =
        integrate([&](double p) {
            const double r = Q(p) / mu;
            return r * std::log(r);
        }, delta, 1.0 - delta, rel).value;
    double atk;
    if (std::abs(epsilon - 1.0) < 1e-12) {
        atk = 1.0 - std::exp(integrate([&](double p) { return std::log(Q(p) / mu); },
                                       delta, 1.0 - delta, rel).value);
    } else {
        const double m = integrate([&](double p) { return std::pow(Q(p) / mu, 1.0 - epsilon); },
                                   delta, 1.0 - delta, rel).value;
        atk = 1.0 - std::pow(m, 1.0 / (1.0 - epsilon));
    }
    double qri = 0.0;
    for (int j = 1; j <= J; ++j) {
        const double pj = (j - 0.5) / J;
        qri += 1.0 - Q(pj / 2.0) / Q(1.0 - pj / 2.0);
    }
    qri /= J;
    return {gini, theil, atk, qri};
}

}  // namespace ineq
