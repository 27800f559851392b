#include "ineq/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>

#include "ineq/density_fit.hpp"
#include "ineq/distributions.hpp"
#include "ineq/grouped.hpp"
#include "ineq/intervals.hpp"
#include "ineq/sim.hpp"

namespace ineq {

namespace {

// flag/value problems that merit exit 2 rather than 1
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<Measure> parse_measures(const std::string& s) {
    if (s == "all")
        return {Measure::gini, Measure::theil, Measure::atkinson, Measure::qri};
    std::vector<Measure> out;
    for (const auto& name : split_list(s)) {
        try {
            out.push_back(parse_measure(name));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    if (out.empty()) throw UsageError("--measures given an empty list");
    return out;
}

struct CiChoice {
    bool bootstrap = false;
    bool wald = false;
};

CiChoice parse_ci(const std::string& s) {
    CiChoice c;
    for (const auto& name : split_list(s)) {
        if (name == "bootstrap")
            c.bootstrap = true;
        else if (name == "wald")
            c.wald = true;
        else
            throw UsageError("unknown interval method: " + name +
                             " (expected bootstrap and/or wald)");
    }
    if (!c.bootstrap && !c.wald) throw UsageError("--ci given an empty list");
    return c;
}

RefDistribution parse_dist_flag(const std::string& spec) {
    try {
        return parse_distribution(spec);
    } catch (const std::exception& e) {
        throw UsageError(std::string("--dist: ") + e.what());
    }
}

FitMethod parse_fit_flag(const std::string& s) {
    if (s == "gld") return FitMethod::gld;
    if (s == "li") return FitMethod::li;
    throw UsageError("unknown fit method: " + s + " (expected gld or li)");
}

// Shared ingestion flags for subcommands that read a grouped-data table.
struct IngestFlags {
    std::string format = "bins";
    double lower_bound = 0.0;
    std::optional<double> top;
    std::optional<double> total_n;
};

void add_ingest_flags(CLI::App* sub, IngestFlags& f) {
    sub->add_option("--format", f.format,
                    "Input layout: bins | percentile-table (default bins)");
    sub->add_option("--lower-bound", f.lower_bound,
                    "Lowest boundary for percentile tables (default 0)");
    sub->add_option("--top,--top-value", f.top,
                    "Top boundary for percentile tables (default: unbounded)");
    sub->add_option("--total-n", f.total_n,
                    "Total observation count (required for percentile tables)");
}

GroupedData load_grouped(const std::string& path, const IngestFlags& f,
                         std::optional<double> total_override, std::ostream& err) {
    TableFormat fmt;
    if (f.format == "bins")
        fmt = TableFormat::bins_csv;
    else if (f.format == "percentile-table")
        fmt = TableFormat::percentile_table;
    else
        throw UsageError("unknown --format: " + f.format +
                         " (expected bins or percentile-table)");

    ParseOptions opts;
    opts.lower_bound = f.lower_bound;
    opts.top_value = f.top;
    opts.total_n = total_override ? total_override : f.total_n;
    opts.label = path;
    if (fmt == TableFormat::percentile_table && !opts.total_n)
        throw UsageError("percentile-table input requires --total-n");
    if (fmt == TableFormat::bins_csv && f.top)
        err << "note: bins input defines its own boundaries; --top ignored\n";

    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return parse_grouped(in, fmt, opts);
}

EstimatedDistribution load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return EstimatedDistribution::from_json(j);
}

std::uint64_t ensure_seed(std::optional<std::uint64_t> flag, std::ostream& err) {
    if (flag) return *flag;
    std::random_device rd;
    const std::uint64_t s =
        (static_cast<std::uint64_t>(rd()) << 32) ^ static_cast<std::uint64_t>(rd());
    err << "# seed " << s << "\n";
    return s;
}

std::size_t default_n(const GroupedData& g) {
    return static_cast<std::size_t>(std::llround(g.total()));
}

std::string ftoa(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

void write_interval_row(std::ostream& o, const IntervalResult& r,
                        const std::string& prefix) {
    o << prefix << measure_name(r.measure) << ',' << ci_method_name(r.method) << ','
      << ftoa(r.point) << ',' << ftoa(r.lower) << ',' << ftoa(r.upper) << ','
      << ftoa(r.level) << ',' << r.replicates << ','
      << static_cast<unsigned long long>(r.seed) << '\n';
}

void pretty_interval_row(std::ostream& o, const IntervalResult& r,
                         const std::string& tag) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-12s%-10s%-10s%10.4f   (%9.4f, %9.4f)\n",
                  tag.c_str(), measure_name(r.measure).c_str(),
                  ci_method_name(r.method).c_str(), r.point, r.lower, r.upper);
    o << buf;
}

// ---- subcommand drivers ----

struct CommonStatFlags {
    std::string measures = "all";
    double epsilon = 0.5;
    int J = 100;
    int n_eval = 10000;
};

void add_stat_flags(CLI::App* sub, CommonStatFlags& f) {
    sub->add_option("--measures", f.measures,
                    "Comma list of gini,theil,atkinson,qri (default all)");
    sub->add_option("--epsilon", f.epsilon, "Atkinson aversion (default 0.5)");
    sub->add_option("--J", f.J, "QRI grid size (default 100)");
    sub->add_option("--n-eval", f.n_eval,
                    "Plug-in evaluation grid size (default 10000)");
}

int cmd_true_values(const std::string& dist_spec, double epsilon, int J,
                    std::ostream& out) {
    const RefDistribution dist = parse_dist_flag(dist_spec);
    const TrueMeasures t = true_measures(dist, epsilon, J);
    out << "gini,theil,atkinson,qri\n"
        << ftoa(t.gini, 3) << ',' << ftoa(t.theil, 3) << ',' << ftoa(t.atkinson, 3)
        << ',' << ftoa(t.qri, 3) << '\n';
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
    CLI::App app{"Inequality measures and confidence intervals from grouped income data"};
    app.require_subcommand(1);

    // --- true-values ---
    auto* tv = app.add_subcommand("true-values",
                                  "Exact measure values for a reference distribution");
    std::string tv_dist;
    double tv_epsilon = 0.5;
    int tv_J = 100;
    tv->add_option("--dist", tv_dist, "family:p1,p2 e.g. exponential:1")->required();
    tv->add_option("--epsilon", tv_epsilon, "Atkinson aversion (default 0.5)");
    tv->add_option("--J", tv_J, "QRI grid size (default 100)");

    // --- fit ---
    auto* fit = app.add_subcommand("fit", "Fit a distribution to grouped data");
    std::string fit_input, fit_method = "gld";
    IngestFlags fit_ingest;
    bool fit_pretty = false;
    fit->add_option("--input", fit_input, "Grouped-data table")->required();
    fit->add_option("--method", fit_method, "gld | li (default gld)");
    add_ingest_flags(fit, fit_ingest);
    fit->add_flag("--pretty", fit_pretty, "Indent the JSON output");

    // --- estimate ---
    auto* est = app.add_subcommand("estimate", "Point estimates from a fit");
    std::string est_input, est_model, est_method = "gld";
    IngestFlags est_ingest;
    CommonStatFlags est_stats;
    bool est_pretty = false;
    est->add_option("--input", est_input, "Grouped-data table (fit on the fly)");
    est->add_option("--model", est_model, "Fitted-model JSON from `fit`");
    est->add_option("--method", est_method, "gld | li when fitting --input");
    add_ingest_flags(est, est_ingest);
    add_stat_flags(est, est_stats);
    est->add_flag("--pretty", est_pretty, "Human-readable table");

    // --- interval ---
    auto* itv = app.add_subcommand("interval", "Confidence intervals from a fit");
    std::string itv_input, itv_model, itv_method = "gld", itv_ci = "bootstrap";
    IngestFlags itv_ingest;
    CommonStatFlags itv_stats;
    std::optional<std::size_t> itv_n;
    std::optional<std::uint64_t> itv_seed;
    int itv_B = 500, itv_threads = 0;
    double itv_level = 0.95;
    bool itv_pretty = false;
    itv->add_option("--input", itv_input, "Grouped-data table (fit on the fly)");
    itv->add_option("--model", itv_model, "Fitted-model JSON from `fit`");
    itv->add_option("--method", itv_method, "gld | li when fitting --input");
    add_ingest_flags(itv, itv_ingest);
    add_stat_flags(itv, itv_stats);
    itv->add_option("--ci", itv_ci, "Comma list of bootstrap,wald (default bootstrap)");
    itv->add_option("--n", itv_n, "Sample size (default: grouped total)");
    itv->add_option("--B", itv_B, "Bootstrap replicates (default 500)");
    itv->add_option("--level", itv_level, "Confidence level (default 0.95)");
    itv->add_option("--seed", itv_seed, "RNG seed (default: generated and echoed)");
    itv->add_option("--threads", itv_threads, "Worker threads (default all)");
    itv->add_flag("--pretty", itv_pretty, "Human-readable table");

    // --- compare ---
    auto* cmp = app.add_subcommand("compare",
                                   "Difference intervals between two populations");
    std::string cmp_input1, cmp_input2, cmp_method = "gld", cmp_ci = "bootstrap,wald";
    IngestFlags cmp_ingest;
    CommonStatFlags cmp_stats;
    std::optional<double> cmp_total1, cmp_total2;
    std::optional<std::size_t> cmp_n1, cmp_n2;
    std::optional<std::uint64_t> cmp_seed;
    int cmp_B = 500, cmp_threads = 0;
    double cmp_level = 0.95;
    bool cmp_pretty = false;
    cmp->add_option("--input1", cmp_input1, "First grouped-data table")->required();
    cmp->add_option("--input2", cmp_input2, "Second grouped-data table")->required();
    cmp->add_option("--method", cmp_method, "gld | li (default gld)");
    add_ingest_flags(cmp, cmp_ingest);
    cmp->add_option("--total-n1", cmp_total1, "Total count override for input 1");
    cmp->add_option("--total-n2", cmp_total2, "Total count override for input 2");
    add_stat_flags(cmp, cmp_stats);
    cmp->add_option("--ci", cmp_ci, "Comma list of bootstrap,wald (default both)");
    cmp->add_option("--n1", cmp_n1, "Sample size 1 (default: grouped total)");
    cmp->add_option("--n2", cmp_n2, "Sample size 2 (default: grouped total)");
    cmp->add_option("--B", cmp_B, "Bootstrap replicates (default 500)");
    cmp->add_option("--level", cmp_level, "Confidence level (default 0.95)");
    cmp->add_option("--seed", cmp_seed, "RNG seed (default: generated and echoed)");
    cmp->add_option("--threads", cmp_threads, "Worker threads (default all)");
    cmp->add_flag("--pretty", cmp_pretty, "Human-readable table");

    // --- simulate ---
    auto* sim = app.add_subcommand("simulate", "Monte-Carlo coverage study");
    std::string sim_dist, sim_scheme = "quintiles", sim_fit = "li";
    std::string sim_measures, sim_sigmas = "0.5,1,1.5,2";
    std::size_t sim_n = 250;
    int sim_reps = 300, sim_B = 300, sim_threads = 0, sim_J = 100;
    double sim_level = 0.95, sim_epsilon = 0.5;
    std::optional<std::uint64_t> sim_seed;
    bool sim_centered = false;
    sim->add_option("--dist", sim_dist, "family:p1,p2 (ignored with --centered)");
    sim->add_option("--n", sim_n, "Sample size per replicate (default 250)");
    sim->add_option("--scheme", sim_scheme, "quintiles | deciles (default quintiles)");
    sim->add_option("--fit", sim_fit, "gld | li (default li)");
    sim->add_option("--measures", sim_measures,
                    "Comma list (default all; default gini,atkinson,qri with --centered)");
    sim->add_option("--reps", sim_reps, "Replicates (default 300)");
    sim->add_option("--B", sim_B, "Bootstrap replicates per CI (default 300)");
    sim->add_option("--level", sim_level, "Confidence level (default 0.95)");
    sim->add_option("--epsilon", sim_epsilon, "Atkinson aversion (default 0.5)");
    sim->add_option("--J", sim_J, "QRI grid size (default 100)");
    sim->add_option("--seed", sim_seed, "RNG seed (default: generated and echoed)");
    sim->add_option("--threads", sim_threads, "Worker threads (default all)");
    sim->add_flag("--centered", sim_centered,
                  "Emit centered lognormal estimates instead of coverage");
    sim->add_option("--sigmas", sim_sigmas,
                    "Lognormal sigma list for --centered (default 0.5,1,1.5,2)");

    std::string out_path;
    app.add_option("--out", out_path, "Write results to a file instead of stdout");
    // let trailing app-level flags (--out) be given after the subcommand
    for (auto* sub : app.get_subcommands(nullptr)) sub->fallthrough();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        const auto parsed = app.get_subcommands();
        out << (parsed.empty() ? app.help() : parsed.front()->help());
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\nRun with --help for usage.\n";
        return 2;
    }

    std::ofstream out_file;
    std::ostream* sink = &out;
    const char* stage = "input";
    try {
        if (!out_path.empty()) {
            stage = "output";
            out_file.open(out_path);
            if (!out_file) throw std::runtime_error("cannot open " + out_path);
            sink = &out_file;
            stage = "input";
        }
        std::ostream& os = *sink;

        if (tv->parsed()) {
            stage = "true-values";
            return cmd_true_values(tv_dist, tv_epsilon, tv_J, os);
        }

        if (fit->parsed()) {
            const FitMethod method = parse_fit_flag(fit_method);
            const GroupedData g = load_grouped(fit_input, fit_ingest, {}, err);
            if (method == FitMethod::li && !g.has_means())
                throw UsageError("--method li requires bin means in the input");
            stage = "fit";
            const auto model = fit_distribution(g, method);
            os << (fit_pretty ? model.to_json().dump(2) : model.to_json().dump())
               << '\n';
            return 0;
        }

        if (est->parsed()) {
            const auto measures = parse_measures(est_stats.measures);
            if (est_input.empty() == est_model.empty())
                throw UsageError("estimate needs exactly one of --input or --model");
            BootstrapOptions opt;
            opt.epsilon = est_stats.epsilon;
            opt.J = est_stats.J;
            opt.n_eval = est_stats.n_eval;
            std::optional<EstimatedDistribution> model;
            if (!est_model.empty()) {
                model = load_model(est_model);
            } else {
                const FitMethod method = parse_fit_flag(est_method);
                const GroupedData g = load_grouped(est_input, est_ingest, {}, err);
                if (method == FitMethod::li && !g.has_means())
                    throw UsageError("--method li requires bin means in the input");
                stage = "fit";
                model = fit_distribution(g, method);
            }
            stage = "estimate";
            const std::string fname =
                model->method() == FitMethod::gld ? "gld" : "li";
            if (!est_pretty) os << "measure,fit,point\n";
            for (Measure m : measures) {
                const double v = plugin_estimate(*model, m, opt);
                if (est_pretty) {
                    char buf[80];
                    std::snprintf(buf, sizeof buf, "%-10s (%s) %10.4f\n",
                                  measure_name(m).c_str(), fname.c_str(), v);
                    os << buf;
                } else {
                    os << measure_name(m) << ',' << fname << ',' << ftoa(v) << '\n';
                }
            }
            return 0;
        }

        if (itv->parsed()) {
            const auto measures = parse_measures(itv_stats.measures);
            const CiChoice ci = parse_ci(itv_ci);
            const bool has_qri =
                std::find(measures.begin(), measures.end(), Measure::qri) !=
                measures.end();
            if (ci.wald && !ci.bootstrap && !has_qri)
                throw UsageError(
                    "wald intervals apply only to the qri measure; add qri to "
                    "--measures or request --ci bootstrap");
            if (itv_input.empty() == itv_model.empty())
                throw UsageError("interval needs exactly one of --input or --model");

            BootstrapOptions opt;
            opt.B = itv_B;
            opt.level = itv_level;
            opt.epsilon = itv_stats.epsilon;
            opt.J = itv_stats.J;
            opt.n_eval = itv_stats.n_eval;
            opt.threads = itv_threads;
            opt.seed = ensure_seed(itv_seed, err);

            std::optional<EstimatedDistribution> model;
            std::size_t n = 0;
            if (!itv_model.empty()) {
                if (!itv_n)
                    throw UsageError("--model input requires an explicit --n");
                model = load_model(itv_model);
                n = *itv_n;
            } else {
                const FitMethod method = parse_fit_flag(itv_method);
                const GroupedData g = load_grouped(itv_input, itv_ingest, {}, err);
                if (method == FitMethod::li && !g.has_means())
                    throw UsageError("--method li requires bin means in the input");
                stage = "fit";
                model = fit_distribution(g, method);
                n = itv_n ? *itv_n : default_n(g);
            }

            stage = "interval";
            std::vector<IntervalResult> rows;
            if (ci.bootstrap) {
                const auto r = bootstrap_ci(*model, n, measures, opt);
                rows.insert(rows.end(), r.begin(), r.end());
            }
            if (ci.wald && has_qri) rows.push_back(wald_qri_ci(*model, n, opt));
            if (itv_pretty) {
                for (const auto& r : rows) pretty_interval_row(os, r, "");
            } else {
                os << "measure,method,point,lower,upper,level,B,seed\n";
                for (const auto& r : rows) write_interval_row(os, r, "");
            }
            return 0;
        }

        if (cmp->parsed()) {
            const auto measures = parse_measures(cmp_stats.measures);
            const CiChoice ci = parse_ci(cmp_ci);
            const FitMethod method = parse_fit_flag(cmp_method);

            const GroupedData g1 = load_grouped(cmp_input1, cmp_ingest, cmp_total1, err);
            const GroupedData g2 = load_grouped(cmp_input2, cmp_ingest, cmp_total2, err);
            if (method == FitMethod::li && !(g1.has_means() && g2.has_means()))
                throw UsageError("--method li requires bin means in both inputs");

            BootstrapOptions opt;
            opt.B = cmp_B;
            opt.level = cmp_level;
            opt.epsilon = cmp_stats.epsilon;
            opt.J = cmp_stats.J;
            opt.n_eval = cmp_stats.n_eval;
            opt.threads = cmp_threads;
            opt.seed = ensure_seed(cmp_seed, err);

            stage = "fit";
            const auto m1 = fit_distribution(g1, method);
            const auto m2 = fit_distribution(g2, method);
            const std::size_t n1 = cmp_n1 ? *cmp_n1 : default_n(g1);
            const std::size_t n2 = cmp_n2 ? *cmp_n2 : default_n(g2);

            stage = "compare";
            struct Row {
                std::string tag;
                Measure measure;
                std::string method;  // point | bootstrap | wald
                double point, lower, upper;
                int B;
            };
            std::vector<Row> rows;
            for (int which = 0; which < 2; ++which) {
                const auto& model = which == 0 ? m1 : m2;
                const std::size_t n = which == 0 ? n1 : n2;
                const std::string tag = which == 0 ? "sample1" : "sample2";
                for (Measure m : measures) {
                    const double v = plugin_estimate(model, m, opt);
                    rows.push_back({tag, m, "point", v, v, v, 0});
                }
                if (ci.wald) {
                    const auto w = wald_qri_ci(model, n, opt);
                    rows.push_back({tag, w.measure, "wald", w.point, w.lower, w.upper, 0});
                }
            }
            if (ci.bootstrap)
                for (const auto& d : bootstrap_diff_ci(m1, n1, m2, n2, measures, opt))
                    rows.push_back({"difference", d.measure, "bootstrap", d.point,
                                    d.lower, d.upper, d.replicates});
            if (ci.wald) {
                const auto w = wald_qri_diff_ci(m1, n1, m2, n2, opt);
                rows.push_back({"difference", w.measure, "wald", w.point, w.lower,
                                w.upper, 0});
            }

            if (cmp_pretty) {
                std::string last;
                for (const auto& r : rows) {
                    if (r.tag != last) os << r.tag << ":\n";
                    last = r.tag;
                    char buf[160];
                    std::snprintf(buf, sizeof buf,
                                  "  %-10s%-10s%10.4f   (%9.4f, %9.4f)\n",
                                  measure_name(r.measure).c_str(), r.method.c_str(),
                                  r.point, r.lower, r.upper);
                    os << buf;
                }
            } else {
                os << "which,measure,method,point,lower,upper,level,B,seed\n";
                for (const auto& r : rows)
                    os << r.tag << ',' << measure_name(r.measure) << ',' << r.method
                       << ',' << ftoa(r.point) << ',' << ftoa(r.lower) << ','
                       << ftoa(r.upper) << ',' << ftoa(opt.level) << ',' << r.B << ','
                       << static_cast<unsigned long long>(opt.seed) << '\n';
            }
            return 0;
        }

        // simulate
        const std::uint64_t seed = ensure_seed(sim_seed, err);
        if (sim_centered) {
            CenteredConfig cfg;
            cfg.n = sim_n;
            cfg.reps = sim_reps;
            cfg.epsilon = sim_epsilon;
            cfg.J = sim_J;
            cfg.seed = seed;
            cfg.threads = sim_threads;
            cfg.fit = parse_fit_flag(sim_fit);
            if (sim_scheme == "quintiles")
                cfg.scheme = Scheme::quintiles;
            else if (sim_scheme == "deciles")
                cfg.scheme = Scheme::deciles;
            else
                throw UsageError("unknown scheme: " + sim_scheme);
            if (!sim_measures.empty()) cfg.measures = parse_measures(sim_measures);
            cfg.sigmas.clear();
            for (const auto& tok : split_list(sim_sigmas)) {
                std::size_t used = 0;
                const double v = std::stod(tok, &used);
                if (used != tok.size() || !(v > 0.0))
                    throw UsageError("bad --sigmas entry: " + tok);
                cfg.sigmas.push_back(v);
            }
            if (cfg.sigmas.empty()) throw UsageError("--sigmas given an empty list");
            stage = "simulate";
            write_centered_csv(os, centered_estimates(cfg));
            return 0;
        }

        if (sim_dist.empty()) throw UsageError("simulate requires --dist");
        SimConfig cfg;
        cfg.dist = parse_dist_flag(sim_dist);
        cfg.n = sim_n;
        cfg.reps = sim_reps;
        cfg.B = sim_B;
        cfg.level = sim_level;
        cfg.epsilon = sim_epsilon;
        cfg.J = sim_J;
        cfg.seed = seed;
        cfg.threads = sim_threads;
        cfg.fit = parse_fit_flag(sim_fit);
        if (sim_scheme == "quintiles")
            cfg.scheme = Scheme::quintiles;
        else if (sim_scheme == "deciles")
            cfg.scheme = Scheme::deciles;
        else
            throw UsageError("unknown scheme: " + sim_scheme);
        if (!sim_measures.empty()) cfg.measures = parse_measures(sim_measures);
        if (std::find(cfg.measures.begin(), cfg.measures.end(), Measure::qri) ==
            cfg.measures.end())
            cfg.wald_qri = false;
        stage = "simulate";
        write_sim_csv(os, run_coverage(cfg));
        return 0;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\nRun with --help for usage.\n";
        return 2;
    } catch (const std::exception& e) {
        err << stage << ": " << e.what() << '\n';
        return 1;
    }
}

}  // namespace ineq
