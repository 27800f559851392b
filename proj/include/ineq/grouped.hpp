#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ineq {

// Binned observations: J bins bounded by a_0 < a_1 < ... < a_J where a_J may
// be +infinity, with per-bin counts and (optionally) per-bin means.
struct GroupedData {
    std::vector<double> boundaries;  // size J+1
    std::vector<double> counts;      // size J, nonnegative
    std::vector<double> means;       // empty, or size J
    std::string label;

    std::size_t bins() const { return counts.size(); }
    double total() const;
    bool has_means() const { return !means.empty(); }
    bool unbounded_top() const;
};

// Throws std::invalid_argument naming the offending bin when the invariants
// fail (monotone boundaries, J >= 2, counts >= 0 with positive total, means
// inside their bins, unbounded-top mean above a_{J-1}).
void validate(const GroupedData& g);

enum class TableFormat { bins_csv, percentile_table };

struct ParseOptions {
    double lower_bound = 0.0;            // a_0 for percentile tables
    std::optional<double> top_value;     // a_J for percentile tables (else +inf)
    std::optional<double> total_n;       // required for percentile tables
    std::string label;
};

// BinsCSV: header "lower,upper,count[,mean]", literal "inf" allowed as the
// final upper bound.  PercentileTable: header "percentile,value" with
// percentiles strictly increasing in (0,100); bins get counts total_n*dF.
GroupedData parse_grouped(std::istream& in, TableFormat format,
                          const ParseOptions& opts = {});

// BinsCSV text; parse_grouped(serialize(g)) == g.
std::string serialize(const GroupedData& g);

enum class Scheme { quintiles, deciles };

// Bin a raw positive sample at its own quantiles: boundaries are 0, the
// sample quantiles at k/B (B = 5 or 10), +infinity.  Observations equal to a
// boundary fall in the lower bin.  Tied boundaries are an error.
GroupedData group_sample(std::span<const double> x, Scheme scheme, bool with_means);

}  // namespace ineq
