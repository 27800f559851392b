#include "ineq/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "ineq/normal.hpp"
#include "ineq/rng.hpp"
#include "ineq/stats.hpp"

namespace ineq {

namespace {

void check_level(double level) {
    if (!(level > 0.0 && level < 1.0))
        throw std::domain_error("interval: level outside (0,1)");
}

double sample_measure(std::span<const double> sorted, Measure m,
                      const BootstrapOptions& opt) {
    switch (m) {
        case Measure::gini: return gini_hat(sorted);
        case Measure::theil: return theil_hat(sorted);
        case Measure::atkinson: return atkinson_hat(sorted, opt.epsilon);
        case Measure::qri: return qri_hat_sample(sorted, opt.J);
    }
    throw std::logic_error("unreachable");
}

int thread_count(const BootstrapOptions& opt) {
    if (opt.threads > 0) return opt.threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs B independent replicates; fill(b) writes every per-measure
// statistic for replicate b. Each replicate derives its randomness only
// from (seed, b), so results are identical for any thread count.
template <typename Fill>
void run_replicates(int B, int threads, Fill&& fill) {
    const int T = std::min(std::max(threads, 1), std::max(B, 1));
    auto worker = [&](int lo, int hi) {
        for (int b = lo; b < hi; ++b) fill(b);
    };
    if (T == 1) {
        worker(0, B);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(T));
    const int chunk = (B + T - 1) / T;
    for (int t = 0; t < T; ++t) {
        const int lo = t * chunk;
        const int hi = std::min(B, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
}

std::vector<double> draw_sorted(const ClampedQuantile& q, std::size_t n,
                                rng::Engine& engine) {
    std::vector<double> y(n);
    for (auto& v : y) v = q(rng::uniform01(engine));
    std::sort(y.begin(), y.end());
    return y;
}

// Percentile interval endpoints that are exactly symmetric about the point
// estimate in floating point: the half-width is snapped to a power-of-two
// grid coarse enough that point +/- half round identically.
std::pair<double, double> symmetric_interval(double point, double half) {
    double lo = point - half, hi = point + half;
    if (point - lo == hi - point) return {lo, hi};
    int pe = 0;
    std::frexp(std::max(std::abs(point), std::abs(half)), &pe);
    for (int bits = 52; bits >= 0; --bits) {
        const double g = std::ldexp(1.0, pe - bits);
        double hr = std::round(half / g) * g;
        if (hr == 0.0) hr = g;
        lo = point - hr;
        hi = point + hr;
        if (point - lo == hi - point) return {lo, hi};
    }
    return {point, point};
}

IntervalResult wald_from_variance(Measure m, double point, double variance,
                                  const BootstrapOptions& opt) {
    check_level(opt.level);
    if (!(variance >= 0.0) || !std::isfinite(variance))
        throw std::runtime_error("wald interval: variance is not finite");
    const double z = inv_norm_cdf(0.5 * (1.0 + opt.level));
    const auto [lo, hi] = symmetric_interval(point, z * std::sqrt(variance));
    return {m, CiMethod::wald, point, lo, hi, opt.level, 0, opt.seed};
}

}  // namespace

std::string ci_method_name(CiMethod m) {
    return m == CiMethod::wald ? "wald" : "bootstrap";
}

double clamp_floor(const QuantileModel& m) { return 1e-6 * m.quantile(0.5); }

ClampedQuantile::ClampedQuantile(const QuantileModel& m)
    : model_(&m), floor_(clamp_floor(m)) {}

double ClampedQuantile::operator()(double p) const {
    return std::max(model_->quantile(p), floor_);
}

// QRI of a fitted model, straight off its quantile function.  The ratio
// numerator keeps whatever value the model assigns to low quantiles --
// possibly negative for a fitted GLD -- because flooring it would quietly
// rewrite the measure on exactly the fits where tail extrapolation matters;
// only the divisor has to be positive.
static double model_qri(const QuantileModel& m, int J) {
    if (J < 1) throw std::domain_error("qri: grid size must be >= 1");
    double sum = 0.0;
    for (int j = 1; j <= J; ++j) {
        const double p = (j - 0.5) / static_cast<double>(J);
        const double hi = m.quantile(1.0 - 0.5 * p);
        if (!(hi > 0.0))
            throw std::domain_error("qri: upper model quantile must be positive");
        sum += 1.0 - m.quantile(0.5 * p) / hi;
    }
    return sum / static_cast<double>(J);
}

double plugin_estimate(const QuantileModel& m, Measure measure,
                       const BootstrapOptions& opt) {
    if (measure == Measure::qri) return model_qri(m, opt.J);
    const ClampedQuantile q(m);
    if (opt.n_eval < 2) throw std::domain_error("plug-in grid must have >= 2 points");
    std::vector<double> y(static_cast<std::size_t>(opt.n_eval));
    for (int i = 0; i < opt.n_eval; ++i)
        y[static_cast<std::size_t>(i)] = q((i + 0.5) / opt.n_eval);
    return sample_measure(y, measure, opt);
}

std::vector<IntervalResult> bootstrap_ci(const QuantileModel& m, std::size_t n,
                                         std::span<const Measure> measures,
                                         const BootstrapOptions& opt) {
    check_level(opt.level);
    if (opt.B < 2) throw std::domain_error("bootstrap: B must be >= 2");
    if (n == 0) throw std::domain_error("bootstrap: sample size must be >= 1");
    const ClampedQuantile q(m);
    const std::size_t M = measures.size();
    std::vector<std::vector<double>> stats(M, std::vector<double>(static_cast<std::size_t>(opt.B)));
    run_replicates(opt.B, thread_count(opt), [&](int b) {
        auto engine = rng::make_engine(rng::substream(opt.seed, static_cast<std::uint64_t>(b)));
        const auto y = draw_sorted(q, n, engine);
        for (std::size_t k = 0; k < M; ++k)
            stats[k][static_cast<std::size_t>(b)] = sample_measure(y, measures[k], opt);
    });

    std::vector<IntervalResult> out;
    out.reserve(M);
    const double lo_p = 0.5 * (1.0 - opt.level);
    for (std::size_t k = 0; k < M; ++k) {
        std::sort(stats[k].begin(), stats[k].end());
        out.push_back({measures[k], CiMethod::bootstrap_percentile,
                       plugin_estimate(m, measures[k], opt),
                       quantile_sorted(stats[k], lo_p),
                       quantile_sorted(stats[k], 1.0 - lo_p), opt.level, opt.B,
                       opt.seed});
    }
    return out;
}

QriVariance qri_variance(const QuantileModel& m, std::size_t n, int J) {
    if (n == 0) throw std::domain_error("variance: sample size must be >= 1");
    if (J < 1) throw std::domain_error("variance: grid size must be >= 1");
    const std::size_t Js = static_cast<std::size_t>(J);
    std::vector<double> pa(Js), pb(Js), xa(Js), xb(Js), fa(Js), fb(Js);
    for (std::size_t j = 0; j < Js; ++j) {
        const double p = (static_cast<double>(j) + 0.5) / static_cast<double>(J);
        pa[j] = 0.5 * p;
        pb[j] = 1.0 - 0.5 * p;
        // Same signed evaluation as the point estimate the interval centers on.
        xa[j] = m.quantile(pa[j]);
        xb[j] = m.quantile(pb[j]);
        if (!(xb[j] > 0.0))
            throw std::domain_error("qri variance: upper model quantile must be positive");
        fa[j] = m.density_at(pa[j]);
        fb[j] = m.density_at(pb[j]);
    }
    const double nn = static_cast<double>(n);
    const auto cov_q = [&](double ps, double fs, double pt, double ft) {
        return std::min(ps, pt) * (1.0 - std::max(ps, pt)) / (nn * fs * ft);
    };
    double total = 0.0;
    for (std::size_t j = 0; j < Js; ++j) {
        for (std::size_t k = 0; k < Js; ++k) {
            const double c_aa = cov_q(pa[j], fa[j], pa[k], fa[k]);
            const double c_ab = cov_q(pa[j], fa[j], pb[k], fb[k]);
            const double c_ba = cov_q(pb[j], fb[j], pa[k], fa[k]);
            const double c_bb = cov_q(pb[j], fb[j], pb[k], fb[k]);
            total += c_aa / (xb[j] * xb[k]) - c_ab * xa[k] / (xb[j] * xb[k] * xb[k]) -
                     c_ba * xa[j] / (xb[j] * xb[j] * xb[k]) +
                     c_bb * xa[j] * xa[k] / (xb[j] * xb[j] * xb[k] * xb[k]);
        }
    }
    return {total / (static_cast<double>(J) * static_cast<double>(J)), J, n};
}

IntervalResult wald_qri_ci(const QuantileModel& m, std::size_t n,
                           const BootstrapOptions& opt) {
    const double point = plugin_estimate(m, Measure::qri, opt);
    const double var = qri_variance(m, n, opt.J).variance;
    return wald_from_variance(Measure::qri, point, var, opt);
}

std::vector<IntervalResult> bootstrap_diff_ci(const QuantileModel& m1, std::size_t n1,
                                              const QuantileModel& m2, std::size_t n2,
                                              std::span<const Measure> measures,
                                              const BootstrapOptions& opt) {
    check_level(opt.level);
    if (opt.B < 2) throw std::domain_error("bootstrap: B must be >= 2");
    if (n1 == 0 || n2 == 0) throw std::domain_error("bootstrap: sample sizes must be >= 1");
    const ClampedQuantile q1(m1), q2(m2);
    const std::size_t M = measures.size();
    std::vector<std::vector<double>> stats(M, std::vector<double>(static_cast<std::size_t>(opt.B)));
    run_replicates(opt.B, thread_count(opt), [&](int b) {
        // independent substreams so neither sample's draws perturb the other
        const std::uint64_t sb = rng::substream(opt.seed, static_cast<std::uint64_t>(b));
        auto e1 = rng::make_engine(rng::substream(sb, 1));
        auto e2 = rng::make_engine(rng::substream(sb, 2));
        const auto y1 = draw_sorted(q1, n1, e1);
        const auto y2 = draw_sorted(q2, n2, e2);
        for (std::size_t k = 0; k < M; ++k)
            stats[k][static_cast<std::size_t>(b)] =
                sample_measure(y2, measures[k], opt) - sample_measure(y1, measures[k], opt);
    });

    std::vector<IntervalResult> out;
    out.reserve(M);
    const double lo_p = 0.5 * (1.0 - opt.level);
    for (std::size_t k = 0; k < M; ++k) {
        std::sort(stats[k].begin(), stats[k].end());
        const double point = plugin_estimate(m2, measures[k], opt) -
                             plugin_estimate(m1, measures[k], opt);
        out.push_back({measures[k], CiMethod::bootstrap_percentile, point,
                       quantile_sorted(stats[k], lo_p),
                       quantile_sorted(stats[k], 1.0 - lo_p), opt.level, opt.B,
                       opt.seed});
    }
    return out;
}

IntervalResult wald_qri_diff_ci(const QuantileModel& m1, std::size_t n1,
                                const QuantileModel& m2, std::size_t n2,
                                const BootstrapOptions& opt) {
    const double point = plugin_estimate(m2, Measure::qri, opt) -
                         plugin_estimate(m1, Measure::qri, opt);
    const double var =
        qri_variance(m1, n1, opt.J).variance + qri_variance(m2, n2, opt.J).variance;
    return wald_from_variance(Measure::qri, point, var, opt);
}

}  // namespace ineq
