// End-to-end checks against the published reference results.  Each criterion
// prints one PASS/FAIL line; the exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ineq/cli.hpp"
#include "ineq/density_fit.hpp"
#include "ineq/distributions.hpp"
#include "ineq/grouped.hpp"
#include "ineq/intervals.hpp"
#include "ineq/measures.hpp"
#include "ineq/sim.hpp"

using namespace ineq;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Criterion {
    std::string name;
    bool ok = true;
    std::string detail;

    void expect(bool cond, const std::string& what) {
        if (cond) return;
        ok = false;
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

GroupedData load_bins(const std::string& name) {
    std::ifstream in(std::string(TEST_DATA_DIR) + "/" + name);
    if (!in) throw std::runtime_error("missing fixture " + name);
    return parse_grouped(in, TableFormat::bins_csv);
}

GroupedData load_percentiles(const std::string& name, double total_n, double top) {
    std::ifstream in(std::string(TEST_DATA_DIR) + "/" + name);
    if (!in) throw std::runtime_error("missing fixture " + name);
    ParseOptions opts;
    opts.total_n = total_n;
    opts.top_value = top;
    return parse_grouped(in, TableFormat::percentile_table, opts);
}

bool near(double got, double want, double tol) {
    // tiny slack so a binary tolerance boundary never flips on representation
    return std::fabs(got - want) <= tol + 1e-9;
}

// ---- 1: population measure table ---------------------------------------

Criterion population_table() {
    Criterion c{"population value table"};
    struct Row {
        const char* spec;
        double want[4];
    };
    const Row rows[] = {
        {"lognormal:0,1", {0.520, 0.500, 0.221, 0.664}},
        {"singhmaddala:1.6971,87.6981,8.3679", {0.355, 0.206, 0.106, 0.579}},
        {"dagum:4.273,14.28,0.36", {0.335, 0.191, 0.097, 0.548}},
        {"chisquare:2", {0.500, 0.423, 0.215, 0.702}},
        {"pareto2:1,2", {0.667, 1.000, 0.383, 0.740}},
        {"exponential:1", {0.500, 0.423, 0.215, 0.702}},
        {"weibull:10", {0.067, 0.007, 0.004, 0.167}},
    };
    for (const auto& row : rows) {
        std::ostringstream out, err;
        const int code = run_cli({"true-values", "--dist", row.spec}, out, err);
        c.expect(code == 0, std::string(row.spec) + " exited " + fmt(code));
        if (code != 0) continue;
        std::istringstream in(out.str());
        std::string header, data;
        std::getline(in, header);
        std::getline(in, data);
        double got[4];
        char comma;
        std::istringstream fields(data);
        fields >> got[0] >> comma >> got[1] >> comma >> got[2] >> comma >> got[3];
        static const char* names[4] = {"gini", "theil", "atkinson", "qri"};
        for (int i = 0; i < 4; ++i)
            c.expect(near(got[i], row.want[i], 1e-3),
                     std::string(row.spec) + " " + names[i] + "=" + fmt(got[i]) +
                         " want " + fmt(row.want[i]));
    }
    return c;
}

// ---- 2: single-table estimates and intervals ----------------------------

Criterion single_table_example() {
    Criterion c{"household-table estimates"};
    const auto g = load_bins("aus_household_1967.csv");
    const std::size_t n = 5440;
    BootstrapOptions opt;

    const EstimatedDistribution li(fit_li(g));
    const double want_li[4] = {0.319, 0.178, 0.088, 0.510};
    const Measure order[4] = {Measure::gini, Measure::theil, Measure::atkinson,
                              Measure::qri};
    for (int i = 0; i < 4; ++i) {
        const double v = plugin_estimate(li, order[i], opt);
        c.expect(near(v, want_li[i], 0.010),
                 measure_name(order[i]) + "(li)=" + fmt(v) + " want " +
                     fmt(want_li[i]) + "+-0.010");
    }
    const auto li_wald = wald_qri_ci(li, n, opt);
    c.expect(near(li_wald.lower, 0.502, 0.010),
             "li wald lower=" + fmt(li_wald.lower) + " want 0.502+-0.010");
    c.expect(near(li_wald.upper, 0.517, 0.010),
             "li wald upper=" + fmt(li_wald.upper) + " want 0.517+-0.010");

    const EstimatedDistribution gld(fit_gld(g));
    const double g_gini = plugin_estimate(gld, Measure::gini, opt);
    c.expect(near(g_gini, 0.329, 0.015),
             "gini(gld)=" + fmt(g_gini) + " want 0.329+-0.015");
    const auto g_wald = wald_qri_ci(gld, n, opt);
    c.expect(near(g_wald.lower, 0.513, 0.015),
             "gld wald lower=" + fmt(g_wald.lower) + " want 0.513+-0.015");
    c.expect(near(g_wald.upper, 0.529, 0.015),
             "gld wald upper=" + fmt(g_wald.upper) + " want 0.529+-0.015");
    return c;
}

// ---- 3: two-sample comparison -------------------------------------------

Criterion comparison_example() {
    Criterion c{"two-sample difference intervals"};
    const auto g1 = load_percentiles("wa_disposable_1996.csv", 5000, 5000);
    const auto g2 = load_percentiles("wa_disposable_2009.csv", 5000, 5000);
    const EstimatedDistribution m1(fit_gld(g1)), m2(fit_gld(g2));
    const std::size_t n1 = 5000, n2 = 5000;

    BootstrapOptions opt;
    opt.B = 500;
    opt.seed = 7;
    const std::vector<Measure> all = {Measure::gini, Measure::theil,
                                      Measure::atkinson, Measure::qri};
    const auto boot = bootstrap_diff_ci(m1, n1, m2, n2, all, opt);
    for (const auto& r : boot)
        c.expect(r.lower > 0.0 || r.upper < 0.0,
                 measure_name(r.measure) + " diff CI (" + fmt(r.lower) + "," +
                     fmt(r.upper) + ") touches zero");
    const auto wald = wald_qri_diff_ci(m1, n1, m2, n2, opt);
    c.expect(wald.lower > 0.0 || wald.upper < 0.0,
             "qri wald diff CI (" + fmt(wald.lower) + "," + fmt(wald.upper) +
                 ") touches zero");
    c.expect(near(wald.point, 0.049, 0.015),
             "qri diff point=" + fmt(wald.point) + " want 0.049+-0.015");
    return c;
}

// ---- 4: coverage at desk scale -------------------------------------------

double cell_value(const CoverageResult& r, Measure m, CiMethod method) {
    for (const auto& cell : r.cells)
        if (cell.measure == m && cell.method == method) return cell.coverage;
    return -1.0;
}

Criterion coverage_studies() {
    Criterion c{"coverage studies"};

    SimConfig a;
    a.dist = parse_distribution("exponential:1");
    a.n = 250;
    a.fit = FitMethod::li;
    a.seed = 42;
    const auto ra = run_coverage(a);
    const double a_wald = cell_value(ra, Measure::qri, CiMethod::wald);
    const double a_gini = cell_value(ra, Measure::gini, CiMethod::bootstrap_percentile);
    c.expect(a_wald >= 0.92 && a_wald <= 0.99,
             "exponential qri wald coverage=" + fmt(a_wald) + " want [0.92,0.99]");
    c.expect(a_gini >= 0.89 && a_gini <= 0.97,
             "exponential gini bootstrap coverage=" + fmt(a_gini) +
                 " want [0.89,0.97]");
    c.expect(ra.failures == 0, "exponential study had fit failures");

    SimConfig b;
    b.dist = parse_distribution("pareto2:1,2");
    b.n = 500;
    b.fit = FitMethod::li;
    b.seed = 42;
    const auto rb = run_coverage(b);
    const double b_gini = cell_value(rb, Measure::gini, CiMethod::bootstrap_percentile);
    const double b_wald = cell_value(rb, Measure::qri, CiMethod::wald);
    c.expect(b_gini < 0.65,
             "heavy-tail gini bootstrap coverage=" + fmt(b_gini) + " want <0.65");
    c.expect(b_wald >= 0.90,
             "heavy-tail qri wald coverage=" + fmt(b_wald) + " want >=0.90");

    SimConfig d;
    d.dist = parse_distribution("lognormal:0,1");
    d.n = 500;
    d.fit = FitMethod::gld;
    d.seed = 42;
    const auto rd = run_coverage(d);
    const double d_wald = cell_value(rd, Measure::qri, CiMethod::wald);
    c.expect(d_wald <= 0.85,
             "lognormal gld qri wald coverage=" + fmt(d_wald) + " want <=0.85");
    return c;
}

// ---- 5: analytic properties ----------------------------------------------

Criterion property_suite() {
    Criterion c{"property suite"};
    std::mt19937_64 rng(2718281828);

    // Quantile/CDF round-trip and normalization across random mean-carrying fits.
    int pairs = 0;
    for (int fit = 0; fit < 10; ++fit) {
        GroupedData g;
        const int J = 5;
        std::uniform_real_distribution<double> width(0.5, 3.0);
        g.boundaries.push_back(0.0);
        for (int j = 0; j < J; ++j)
            g.boundaries.push_back(g.boundaries.back() + width(rng));
        const bool tail = fit % 2 == 0;
        if (tail) g.boundaries.back() = kInf;
        std::uniform_real_distribution<double> cnt(5.0, 100.0);
        std::uniform_real_distribution<double> pos(0.05, 0.95);
        for (int j = 0; j < J; ++j) {
            g.counts.push_back(cnt(rng));
            const double lo = g.boundaries[j];
            const double hi = g.boundaries[j + 1];
            g.means.push_back(std::isinf(hi) ? lo + width(rng)
                                             : lo + pos(rng) * (hi - lo));
        }
        const EstimatedDistribution m(fit_li(g));

        std::uniform_real_distribution<double> up(1e-6, 1.0 - 1e-6);
        for (int i = 0; i < 100; ++i, ++pairs) {
            const double p = up(rng);
            const double err = std::fabs(m.cdf(m.quantile(p)) - p);
            if (err > 1e-9) {
                c.expect(false, "round-trip error " + fmt(err) + " at p=" + fmt(p));
                break;
            }
        }

        const auto& li = m.li();
        double mass = li.has_tail ? li.tail_eta : 0.0;
        const std::size_t linear = li.alphas.size();
        for (std::size_t j = 0; j < linear; ++j) {
            const double lo = li.boundaries[j], hi = li.boundaries[j + 1];
            mass += li.alphas[j] * (hi - lo) + 0.5 * li.betas[j] * (hi * hi - lo * lo);
        }
        c.expect(std::fabs(mass - 1.0) <= 1e-12,
                 "density mass " + fmt(mass) + " != 1");
    }
    c.expect(pairs == 1000, "expected 1000 round-trip pairs");

    // Scale invariance of the four sample estimators.
    std::lognormal_distribution<double> ln(0.0, 1.0);
    std::vector<double> x(300);
    for (auto& v : x) v = ln(rng);
    const double base[4] = {gini_hat(x), theil_hat(x), atkinson_hat(x),
                            qri_hat_sample(x)};
    for (double scale : {1e-4, 12.0, 3e7}) {
        std::vector<double> y(x);
        for (auto& v : y) v *= scale;
        const double got[4] = {gini_hat(y), theil_hat(y), atkinson_hat(y),
                               qri_hat_sample(y)};
        for (int i = 0; i < 4; ++i)
            c.expect(std::fabs(got[i] - base[i]) <= 1e-12 * std::fabs(base[i]),
                     "estimator " + fmt(i) + " moved under scale " + fmt(scale));
    }

    // Wald symmetry is exact, not approximate.
    const RefModel expo(parse_distribution("exponential:1"));
    BootstrapOptions wopt;
    const auto w = wald_qri_ci(expo, 400, wopt);
    c.expect(w.upper - w.point == w.point - w.lower, "wald interval asymmetric");

    // Bit-exact reproducibility regardless of thread count.
    BootstrapOptions t1, t8;
    t1.B = t8.B = 100;
    t1.seed = t8.seed = 1337;
    t1.threads = 1;
    t8.threads = 8;
    const std::vector<Measure> all = {Measure::gini, Measure::theil,
                                      Measure::atkinson, Measure::qri};
    const auto r1 = bootstrap_ci(expo, 300, all, t1);
    const auto r8 = bootstrap_ci(expo, 300, all, t8);
    for (std::size_t i = 0; i < r1.size(); ++i) {
        c.expect(r1[i].point == r8[i].point && r1[i].lower == r8[i].lower &&
                     r1[i].upper == r8[i].upper,
                 "thread count changed " + measure_name(r1[i].measure) + " interval");
    }

    // Delta-method variance against a brute-force sampling oracle.
    const auto d = parse_distribution("exponential:1");
    const std::size_t n = 200;
    const int reps = 10000;
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<double> sample(n), stats(reps);
    for (int r = 0; r < reps; ++r) {
        for (auto& v : sample) v = ref_quantile(d, u01(rng));
        stats[r] = qri_hat_sample(sample, 100);
    }
    double mean = 0.0;
    for (double s : stats) mean += s;
    mean /= reps;
    double var = 0.0;
    for (double s : stats) var += (s - mean) * (s - mean);
    var /= reps - 1;
    const double delta = qri_variance(expo, n, 100).variance;
    c.expect(std::fabs(delta - var) / var <= 0.10,
             "delta variance " + fmt(delta) + " vs oracle " + fmt(var));
    return c;
}

// ---- 6: shape recovery -----------------------------------------------------

Criterion shape_recovery() {
    Criterion c{"quantile-shape recovery"};
    GldParams truth{0.0, 1.0, 0.2, 0.2};
    GroupedData g;
    g.boundaries.push_back(gld_quantile(truth, 1e-9) - 1.0);
    for (int k = 1; k <= 9; ++k)
        g.boundaries.push_back(gld_quantile(truth, k / 10.0));
    g.boundaries.push_back(kInf);
    g.counts.assign(10, 500.0);

    const auto fit = fit_gld(g);
    double amax = 0.0;
    for (int k = 1; k <= 9; ++k)
        amax = std::max(amax, std::fabs(gld_quantile(truth, k / 10.0)));
    double worst = 0.0;
    for (int k = 1; k <= 9; ++k) {
        const double want = gld_quantile(truth, k / 10.0);
        const double got = gld_quantile(fit, k / 10.0);
        worst = std::max(worst, std::fabs(got - want) /
                                    std::max(std::fabs(want), 0.01 * amax));
    }
    c.expect(worst <= 1e-2,
             "worst boundary-quantile relative error " + fmt(worst) + " > 1e-2");
    return c;
}

}  // namespace

int main() {
    using clock = std::chrono::steady_clock;
    struct Entry {
        const char* name;
        Criterion (*fn)();
    };
    const Entry entries[] = {
        {"population value table", population_table},
        {"household-table estimates", single_table_example},
        {"two-sample difference intervals", comparison_example},
        {"coverage studies", coverage_studies},
        {"property suite", property_suite},
        {"quantile-shape recovery", shape_recovery},
    };
    int failures = 0;
    int id = 0;
    for (const auto& entry : entries) {
        ++id;
        const auto t0 = clock::now();
        Criterion c;
        c.name = entry.name;
        try {
            c = entry.fn();
        } catch (const std::exception& e) {
            c.name = entry.name;
            c.ok = false;
            c.detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(clock::now() - t0).count();
        std::printf("criterion %d %s %s (%.1fs)%s%s\n", id,
                    c.ok ? "PASS" : "FAIL", c.name.c_str(), secs,
                    c.detail.empty() ? "" : " -- ", c.detail.c_str());
        std::fflush(stdout);
        if (!c.ok) ++failures;
    }
    return failures;
}
