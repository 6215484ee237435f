#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "forgetlens/tracker.hpp"

namespace forgetlens {
namespace analytics {

// Two equal-length sequences aligned by example, for correlation.
struct PairedSeries {
    std::vector<double> x;
    std::vector<double> y;
};

double pearson(const PairedSeries& series);

// Pearson of average ranks; +inf values rank above every finite value and
// tie with each other.
double spearman(const PairedSeries& series);

// Rank vector with average (fractional) ranks for ties, 1-based.
std::vector<double> average_ranks(const std::vector<double>& values);

enum class PrefixEnd { least_forgotten, most_forgotten };

struct PrecisionRecall {
    double precision = 0.0;
    double recall = 0.0;
};

PrecisionRecall precision_recall(const tracker::Ordering& ordering,
                                 const std::set<ExampleId>& reference, std::size_t k,
                                 PrefixEnd end = PrefixEnd::least_forgotten);

struct PRCurve {
    std::vector<std::size_t> k;
    std::vector<double> precision;
    std::vector<double> recall;
};

PRCurve pr_curve(const tracker::Ordering& ordering, const std::set<ExampleId>& reference,
                 PrefixEnd end = PrefixEnd::least_forgotten);

// Unit-width integer bins over [0, max_count], plus a separate category
// for never-learnt examples.
struct Histogram {
    std::vector<std::int64_t> counts;  // counts[i] = examples with key i
    std::int64_t never_learnt = 0;

    std::int64_t total() const;
};

Histogram histogram(const std::vector<tracker::SortKey>& keys, std::int64_t max_count = -1);

// Per-rank-position confidence band over group-averaged, individually
// sorted (descending) count curves.
struct ConfidenceBand {
    std::vector<double> low;
    std::vector<double> mean;
    std::vector<double> high;
};

// counts_per_seed is seeds x examples; seeds are grouped in blocks of
// group_size (must divide). Percentiles use linear interpolation between
// closest ranks (rank = p/100 * (n+1), clamped at the extremes).
ConfidenceBand grouped_confidence_interval(const std::vector<std::vector<double>>& counts_per_seed,
                                           std::size_t group_size = 5, double low_pct = 2.5,
                                           double high_pct = 97.5);

// Percentile of a sample by the convention above.
double percentile(std::vector<double> values, double pct);

void export_pr_curve_csv(const PRCurve& curve, const std::string& path);
void export_histogram_csv(const Histogram& hist, const std::string& path);
void export_confidence_band_csv(const ConfidenceBand& band, const std::string& path);

}  // namespace analytics
}  // namespace forgetlens
