#include "ineq/grouped.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ineq/stats.hpp"

namespace ineq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail_row(std::size_t row, const std::string& what) {
    std::ostringstream msg;
    msg << "row " << row << ": " << what;
    throw std::invalid_argument(msg.str());
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string tok;
    std::istringstream in(line);
    while (std::getline(in, tok, ',')) {
        // trim surrounding whitespace
        const auto b = tok.find_first_not_of(" \t\r");
        const auto e = tok.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : tok.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double parse_number(const std::string& tok, std::size_t row, bool allow_inf) {
    if (allow_inf && (tok == "inf" || tok == "Inf" || tok == "INF")) return kInf;
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        fail_row(row, "malformed number '" + tok + "'");
    }
    if (pos != tok.size()) fail_row(row, "malformed number '" + tok + "'");
    return v;
}

bool next_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) return true;
    }
    return false;
}

GroupedData parse_bins_csv(std::istream& in, const ParseOptions& opts) {
    std::string line;
    if (!next_line(in, line)) throw std::invalid_argument("empty input");
    auto header = split_csv(line);
    bool with_mean;
    if (header.size() == 3 && header[0] == "lower" && header[1] == "upper" &&
        header[2] == "count") {
        with_mean = false;
    } else if (header.size() == 4 && header[0] == "lower" && header[1] == "upper" &&
               header[2] == "count" && header[3] == "mean") {
        with_mean = true;
    } else {
        throw std::invalid_argument(
            "expected header 'lower,upper,count[,mean]', got '" + line + "'");
    }

    GroupedData g;
    g.label = opts.label;
    std::size_t row = 1;
    while (next_line(in, line)) {
        ++row;
        auto f = split_csv(line);
        if (f.size() != header.size())
            fail_row(row, "expected " + std::to_string(header.size()) + " fields");
        const double lo = parse_number(f[0], row, false);
        const double up = parse_number(f[1], row, true);
        const double count = parse_number(f[2], row, false);
        if (g.boundaries.empty()) {
            g.boundaries.push_back(lo);
        } else if (lo != g.boundaries.back()) {
            fail_row(row, "bins not contiguous: lower bound does not match previous upper");
        }
        if (!(up > lo)) fail_row(row, "upper bound not above lower bound");
        if (!(count >= 0.0)) fail_row(row, "negative count");
        g.boundaries.push_back(up);
        g.counts.push_back(count);
        if (with_mean) g.means.push_back(parse_number(f[3], row, false));
    }
    validate(g);
    return g;
}

GroupedData parse_percentile_table(std::istream& in, const ParseOptions& opts) {
    if (!opts.total_n)
        throw std::invalid_argument("percentile table requires a declared total n");
    const double n = *opts.total_n;
    if (!(n >= 1.0)) throw std::invalid_argument("total n must be >= 1");

    std::string line;
    if (!next_line(in, line)) throw std::invalid_argument("empty input");
    auto header = split_csv(line);
    if (header.size() != 2 || header[0] != "percentile" || header[1] != "value")
        throw std::invalid_argument("expected header 'percentile,value', got '" + line + "'");

    std::vector<double> pct, val;
    std::size_t row = 1;
    while (next_line(in, line)) {
        ++row;
        auto f = split_csv(line);
        if (f.size() != 2) fail_row(row, "expected 2 fields");
        const double p = parse_number(f[0], row, false);
        const double v = parse_number(f[1], row, false);
        if (!(p > 0.0 && p < 100.0)) fail_row(row, "percentile outside (0,100)");
        if (!pct.empty() && !(p > pct.back()))
            fail_row(row, "percentiles not strictly increasing");
        pct.push_back(p);
        val.push_back(v);
    }
    if (pct.empty()) throw std::invalid_argument("no percentile rows");

    GroupedData g;
    g.label = opts.label;
    g.boundaries.push_back(opts.lower_bound);
    for (double v : val) g.boundaries.push_back(v);
    g.boundaries.push_back(opts.top_value ? *opts.top_value : kInf);
    double prev = 0.0;
    for (double p : pct) {
        g.counts.push_back(n * (p / 100.0 - prev));
        prev = p / 100.0;
    }
    g.counts.push_back(n * (1.0 - prev));
    validate(g);
    return g;
}

}  // namespace

double GroupedData::total() const {
    double s = 0.0;
    for (double c : counts) s += c;
    return s;
}

bool GroupedData::unbounded_top() const {
    return !boundaries.empty() && std::isinf(boundaries.back());
}

void validate(const GroupedData& g) {
    const std::size_t J = g.counts.size();
    if (J < 2) throw std::invalid_argument("need at least 2 bins");
    if (g.boundaries.size() != J + 1)
        throw std::invalid_argument("boundary/count size mismatch");
    for (std::size_t j = 0; j + 1 < g.boundaries.size(); ++j) {
        if (std::isinf(g.boundaries[j]))
            throw std::invalid_argument("only the final boundary may be infinite");
        if (!(g.boundaries[j] < g.boundaries[j + 1])) {
            std::ostringstream msg;
            msg << "bin " << (j + 1) << ": boundaries not strictly increasing";
            throw std::invalid_argument(msg.str());
        }
    }
    double n = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
        if (!(g.counts[j] >= 0.0)) {
            std::ostringstream msg;
            msg << "bin " << (j + 1) << ": negative count";
            throw std::invalid_argument(msg.str());
        }
        n += g.counts[j];
    }
    if (!(n >= 1.0)) throw std::invalid_argument("total count must be >= 1");
    if (!g.means.empty()) {
        if (g.means.size() != J)
            throw std::invalid_argument("means/count size mismatch");
        for (std::size_t j = 0; j < J; ++j) {
            const bool last_unbounded = (j == J - 1) && g.unbounded_top();
            const bool ok = last_unbounded
                                ? g.means[j] > g.boundaries[j]
                                : g.means[j] >= g.boundaries[j] &&
                                      g.means[j] <= g.boundaries[j + 1];
            if (!ok) {
                std::ostringstream msg;
                msg << "bin " << (j + 1) << ": mean " << g.means[j]
                    << " outside its bin";
                throw std::invalid_argument(msg.str());
            }
        }
    }
}

GroupedData parse_grouped(std::istream& in, TableFormat format,
                          const ParseOptions& opts) {
    return format == TableFormat::bins_csv ? parse_bins_csv(in, opts)
                                           : parse_percentile_table(in, opts);
}

std::string serialize(const GroupedData& g) {
    std::ostringstream out;
    out.precision(17);
    out << (g.has_means() ? "lower,upper,count,mean" : "lower,upper,count") << "\n";
    for (std::size_t j = 0; j < g.bins(); ++j) {
        out << g.boundaries[j] << ",";
        if (std::isinf(g.boundaries[j + 1])) out << "inf";
        else out << g.boundaries[j + 1];
        out << "," << g.counts[j];
        if (g.has_means()) out << "," << g.means[j];
        out << "\n";
    }
    return out.str();
}

GroupedData group_sample(std::span<const double> x, Scheme scheme, bool with_means) {
    const std::size_t B = scheme == Scheme::quintiles ? 5 : 10;
    if (x.size() < B)
        throw std::invalid_argument("group_sample: need at least one observation per bin");
    for (double v : x)
        if (!(v > 0.0)) throw std::domain_error("group_sample: nonpositive observation");

    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> qs(B - 1);
    for (std::size_t k = 1; k < B; ++k)
        qs[k - 1] = quantile_sorted(sorted, static_cast<double>(k) / B);
    for (std::size_t k = 1; k < qs.size(); ++k)
        if (!(qs[k] > qs[k - 1]))
            throw std::invalid_argument("group_sample: tied sample quantiles collapse bins");

    GroupedData g;
    g.boundaries.push_back(0.0);
    g.boundaries.insert(g.boundaries.end(), qs.begin(), qs.end());
    g.boundaries.push_back(kInf);
    g.counts.assign(B, 0.0);
    std::vector<double> sums(B, 0.0);
    for (double v : x) {
        // first interior boundary >= v; observations at a boundary go left
        const std::size_t j =
            std::lower_bound(qs.begin(), qs.end(), v) - qs.begin();
        g.counts[j] += 1.0;
        sums[j] += v;
    }
    if (with_means) {
        g.means.resize(B);
        for (std::size_t j = 0; j < B; ++j) {
            if (g.counts[j] == 0.0)
                throw std::invalid_argument("group_sample: empty bin");
            g.means[j] = sums[j] / g.counts[j];
        }
    }
    validate(g);
    return g;
}

}  // namespace ineq
