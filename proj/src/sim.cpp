#include "ineq/sim.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "ineq/rng.hpp"

namespace ineq {

namespace {

int thread_count(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Deterministic replicate parallelism: task(r) depends only on r, results
// land in per-replicate slots, reduction happens serially afterwards.
template <typename Task>
void parallel_reps(int reps, int threads, Task&& task) {
    const int T = std::min(std::max(threads, 1), std::max(reps, 1));
    if (T == 1) {
        for (int r = 0; r < reps; ++r) task(r);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(T));
    const int chunk = (reps + T - 1) / T;
    for (int t = 0; t < T; ++t) {
        const int lo = t * chunk;
        const int hi = std::min(reps, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&task, lo, hi] {
            for (int r = lo; r < hi; ++r) task(r);
        });
    }
    for (auto& th : pool) th.join();
}

std::vector<double> draw_reference(const RefDistribution& dist, std::size_t n,
                                   rng::Engine& engine) {
    std::vector<double> x(n);
    for (auto& v : x) v = ref_quantile(dist, rng::uniform01(engine));
    return x;
}

std::string scheme_name(Scheme s) {
    return s == Scheme::quintiles ? "quintiles" : "deciles";
}

std::string fit_name(FitMethod f) { return f == FitMethod::gld ? "gld" : "li"; }

}  // namespace

CoverageResult run_coverage(const SimConfig& config) {
    if (config.reps < 1) throw std::domain_error("simulation: reps must be >= 1");
    const TrueMeasures truth = true_measures(config.dist, config.epsilon, config.J);
    const auto true_of = [&](Measure m) {
        switch (m) {
            case Measure::gini: return truth.gini;
            case Measure::theil: return truth.theil;
            case Measure::atkinson: return truth.atkinson;
            case Measure::qri: return truth.qri;
        }
        throw std::logic_error("unreachable");
    };

    struct Cell {
        Measure measure;
        CiMethod method;
    };
    std::vector<Cell> cells;
    for (Measure m : config.measures) cells.push_back({m, CiMethod::bootstrap_percentile});
    if (config.wald_qri) cells.push_back({Measure::qri, CiMethod::wald});
    const std::size_t C = cells.size();

    struct RepOutcome {
        bool failed = false;
        std::vector<char> hit;
        std::vector<double> width;
    };
    std::vector<RepOutcome> outcomes(static_cast<std::size_t>(config.reps));

    parallel_reps(config.reps, thread_count(config.threads), [&](int r) {
        auto& out = outcomes[static_cast<std::size_t>(r)];
        const std::uint64_t sr = rng::substream(config.seed, static_cast<std::uint64_t>(r));
        try {
            auto engine = rng::make_engine(rng::substream(sr, 0));
            const auto sample = draw_reference(config.dist, config.n, engine);
            const GroupedData grouped =
                group_sample(sample, config.scheme, config.fit == FitMethod::li);
            const EstimatedDistribution model = fit_distribution(grouped, config.fit);

            BootstrapOptions opt;
            opt.B = config.B;
            opt.level = config.level;
            opt.epsilon = config.epsilon;
            opt.J = config.J;
            opt.seed = rng::substream(sr, 1);
            opt.threads = 1;  // replicates already saturate the pool
            const auto boot = bootstrap_ci(model, config.n, config.measures, opt);

            out.hit.resize(C);
            out.width.resize(C);
            for (std::size_t k = 0; k < boot.size(); ++k) {
                const double t = true_of(boot[k].measure);
                out.hit[k] = boot[k].lower <= t && t <= boot[k].upper;
                out.width[k] = boot[k].upper - boot[k].lower;
            }
            if (config.wald_qri) {
                const auto wald = wald_qri_ci(model, config.n, opt);
                const double t = true_of(Measure::qri);
                out.hit[C - 1] = wald.lower <= t && t <= wald.upper;
                out.width[C - 1] = wald.upper - wald.lower;
            }
        } catch (const std::logic_error&) {
            out.failed = true;
        } catch (const std::runtime_error&) {
            out.failed = true;
        }
    });

    CoverageResult result;
    result.config = config;
    int ok = 0;
    std::vector<double> hits(C, 0.0), widths(C, 0.0);
    for (const auto& out : outcomes) {
        if (out.failed) {
            ++result.failures;
            continue;
        }
        ++ok;
        for (std::size_t k = 0; k < C; ++k) {
            hits[k] += out.hit[k] ? 1.0 : 0.0;
            widths[k] += out.width[k];
        }
    }
    for (std::size_t k = 0; k < C; ++k)
        result.cells.push_back({cells[k].measure, cells[k].method,
                                ok > 0 ? hits[k] / ok : std::nan(""),
                                ok > 0 ? widths[k] / ok : std::nan("")});
    return result;
}

void write_sim_csv(std::ostream& out, const CoverageResult& result, bool header) {
    if (header)
        out << "dist,n,scheme,fit,measure,method,coverage,avg_width,failures,reps,B,seed\n";
    const auto& c = result.config;
    char buf[64];
    for (const auto& cell : result.cells) {
        out << family_name(c.dist.family) << ',' << c.n << ',' << scheme_name(c.scheme)
            << ',' << fit_name(c.fit) << ',' << measure_name(cell.measure) << ','
            << ci_method_name(cell.method) << ',';
        std::snprintf(buf, sizeof buf, "%.6f,%.6f", cell.coverage, cell.avg_width);
        out << buf << ',' << result.failures << ',' << c.reps << ',' << c.B << ','
            << c.seed << '\n';
    }
}

std::vector<CenteredRow> centered_estimates(const CenteredConfig& config,
                                            const PointEstimator& estimator) {
    if (config.reps < 1) throw std::domain_error("simulation: reps must be >= 1");
    PointEstimator est = estimator;
    if (!est) {
        est = [&config](const QuantileModel& m, Measure meas) {
            BootstrapOptions opt;
            opt.epsilon = config.epsilon;
            opt.J = config.J;
            opt.n_eval = config.n_eval;
            return plugin_estimate(m, meas, opt);
        };
    }

    const std::size_t S = config.sigmas.size();
    const std::size_t M = config.measures.size();
    // slot per (sigma, rep, measure); NaN marks a failed replicate
    std::vector<double> slots(S * static_cast<std::size_t>(config.reps) * M,
                              std::nan(""));

    for (std::size_t si = 0; si < S; ++si) {
        const double sigma = config.sigmas[si];
        const RefDistribution dist{Family::lognormal, {0.0, sigma}};
        const TrueMeasures truth = true_measures(dist, config.epsilon, config.J);
        const auto true_of = [&](Measure m) {
            switch (m) {
                case Measure::gini: return truth.gini;
                case Measure::theil: return truth.theil;
                case Measure::atkinson: return truth.atkinson;
                case Measure::qri: return truth.qri;
            }
            throw std::logic_error("unreachable");
        };
        const std::uint64_t sigma_seed = rng::substream(config.seed, si);
        parallel_reps(config.reps, thread_count(config.threads), [&](int r) {
            const std::uint64_t sr =
                rng::substream(sigma_seed, static_cast<std::uint64_t>(r));
            try {
                auto engine = rng::make_engine(rng::substream(sr, 0));
                const auto sample = draw_reference(dist, config.n, engine);
                const GroupedData grouped =
                    group_sample(sample, config.scheme, config.fit == FitMethod::li);
                const EstimatedDistribution model =
                    fit_distribution(grouped, config.fit);
                for (std::size_t k = 0; k < M; ++k) {
                    const Measure m = config.measures[k];
                    slots[(si * config.reps + r) * M + k] = est(model, m) - true_of(m);
                }
            } catch (const std::logic_error&) {
            } catch (const std::runtime_error&) {
            }
        });
    }

    std::vector<CenteredRow> rows;
    rows.reserve(slots.size());
    for (std::size_t si = 0; si < S; ++si)
        for (int r = 0; r < config.reps; ++r)
            for (std::size_t k = 0; k < M; ++k) {
                const double v = slots[(si * config.reps + r) * M + k];
                if (!std::isnan(v))
                    rows.push_back({config.sigmas[si], config.measures[k], v});
            }
    return rows;
}

void write_centered_csv(std::ostream& out, std::span<const CenteredRow> rows,
                        bool header) {
    if (header) out << "sigma,measure,centered_estimate\n";
    char buf[64];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%g,%s,%.6f", row.sigma,
                      measure_name(row.measure).c_str(), row.value);
        out << buf << '\n';
    }
}

}  // namespace ineq
