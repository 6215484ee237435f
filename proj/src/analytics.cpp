#include "forgetlens/analytics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "forgetlens/errors.hpp"

namespace forgetlens {
namespace analytics {

namespace {

void check_series(const PairedSeries& series) {
    if (series.x.size() != series.y.size()) {
        throw InvalidArgument("correlation: series lengths differ");
    }
    if (series.x.size() < 2) throw InvalidArgument("correlation: need at least 2 points");
}

bool all_equal(const std::vector<double>& v) {
    for (double x : v) {
        if (x != v.front()) return false;
    }
    return true;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

double pearson(const PairedSeries& series) {
    check_series(series);
    const std::size_t n = series.x.size();
    const double mx = std::accumulate(series.x.begin(), series.x.end(), 0.0) / n;
    const double my = std::accumulate(series.y.begin(), series.y.end(), 0.0) / n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = series.x[i] - mx;
        const double dy = series.y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw InvalidArgument("pearson: degenerate series with zero variance");
    }
    return sxy / std::sqrt(sxx * syy);
}

std::vector<double> average_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&values](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t end = i;
        while (end < n && values[order[end]] == values[order[i]]) ++end;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(end)) / 2.0;
        for (std::size_t j = i; j < end; ++j) ranks[order[j]] = avg;
        i = end;
    }
    return ranks;
}

double spearman(const PairedSeries& series) {
    check_series(series);
    if (all_equal(series.x) || all_equal(series.y)) {
        throw InvalidArgument("spearman: degenerate series, all values identical");
    }
    PairedSeries ranked{average_ranks(series.x), average_ranks(series.y)};
    return pearson(ranked);
}

PrecisionRecall precision_recall(const tracker::Ordering& ordering,
                                 const std::set<ExampleId>& reference, std::size_t k,
                                 PrefixEnd end) {
    if (reference.empty()) throw InvalidArgument("precision_recall: empty reference set");
    if (k < 1 || k > ordering.permutation.size()) {
        throw InvalidArgument("precision_recall: k out of range");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t idx =
            end == PrefixEnd::least_forgotten ? i : ordering.permutation.size() - 1 - i;
        if (reference.count(ordering.permutation[idx])) ++hits;
    }
    PrecisionRecall pr;
    pr.precision = static_cast<double>(hits) / static_cast<double>(k);
    pr.recall = static_cast<double>(hits) / static_cast<double>(reference.size());
    return pr;
}

PRCurve pr_curve(const tracker::Ordering& ordering, const std::set<ExampleId>& reference,
                 PrefixEnd end) {
    PRCurve curve;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ordering.permutation.size(); ++i) {
        const std::size_t idx =
            end == PrefixEnd::least_forgotten ? i : ordering.permutation.size() - 1 - i;
        if (reference.count(ordering.permutation[idx])) ++hits;
        curve.k.push_back(i + 1);
        curve.precision.push_back(static_cast<double>(hits) / static_cast<double>(i + 1));
        curve.recall.push_back(static_cast<double>(hits) / static_cast<double>(reference.size()));
    }
    return curve;
}

std::int64_t Histogram::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::int64_t{0}) + never_learnt;
}

Histogram histogram(const std::vector<tracker::SortKey>& keys, std::int64_t max_count) {
    std::int64_t max_finite = 0;
    for (const tracker::SortKey& k : keys) {
        if (!k.never_learnt) max_finite = std::max(max_finite, k.count);
    }
    if (max_count >= 0) {
        if (max_count < max_finite) {
            throw InvalidArgument("histogram: bin range does not cover the largest count");
        }
        max_finite = max_count;
    }
    Histogram hist;
    hist.counts.assign(static_cast<std::size_t>(max_finite) + 1, 0);
    for (const tracker::SortKey& k : keys) {
        if (k.never_learnt) {
            hist.never_learnt += 1;
        } else {
            hist.counts[static_cast<std::size_t>(k.count)] += 1;
        }
    }
    return hist;
}

double percentile(std::vector<double> values, double pct) {
    if (values.empty()) throw InvalidArgument("percentile: empty sample");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    const double rank = pct / 100.0 * (n + 1.0);
    if (rank <= 1.0) return values.front();
    if (rank >= n) return values.back();
    const std::size_t lo = static_cast<std::size_t>(rank) - 1;
    const double frac = rank - std::floor(rank);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

ConfidenceBand grouped_confidence_interval(const std::vector<std::vector<double>>& counts_per_seed,
                                           std::size_t group_size, double low_pct,
                                           double high_pct) {
    if (counts_per_seed.empty()) throw InvalidArgument("confidence: no seeds");
    if (group_size == 0 || counts_per_seed.size() % group_size != 0) {
        throw InvalidArgument("confidence: seed count not divisible by group size");
    }
    const std::size_t n_examples = counts_per_seed.front().size();
    for (const auto& row : counts_per_seed) {
        if (row.size() != n_examples) throw InvalidArgument("confidence: ragged count matrix");
    }
    const std::size_t n_groups = counts_per_seed.size() / group_size;

    // Group-averaged curves, each sorted by decreasing count.
    std::vector<std::vector<double>> curves(n_groups, std::vector<double>(n_examples, 0.0));
    for (std::size_t g = 0; g < n_groups; ++g) {
        for (std::size_t s = 0; s < group_size; ++s) {
            const std::vector<double>& row = counts_per_seed[g * group_size + s];
            for (std::size_t e = 0; e < n_examples; ++e) curves[g][e] += row[e];
        }
        for (double& v : curves[g]) v /= static_cast<double>(group_size);
        std::sort(curves[g].begin(), curves[g].end(), std::greater<double>());
    }

    ConfidenceBand band;
    band.low.resize(n_examples);
    band.mean.resize(n_examples);
    band.high.resize(n_examples);
    std::vector<double> column(n_groups);
    for (std::size_t e = 0; e < n_examples; ++e) {
        for (std::size_t g = 0; g < n_groups; ++g) column[g] = curves[g][e];
        band.mean[e] = std::accumulate(column.begin(), column.end(), 0.0) / n_groups;
        band.low[e] = percentile(column, low_pct);
        band.high[e] = percentile(column, high_pct);
    }
    return band;
}

void export_pr_curve_csv(const PRCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write file: " + path);
    out << "k,precision,recall\n";
    for (std::size_t i = 0; i < curve.k.size(); ++i) {
        out << curve.k[i] << ',' << format_double(curve.precision[i]) << ','
            << format_double(curve.recall[i]) << '\n';
    }
}

void export_histogram_csv(const Histogram& hist, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write file: " + path);
    out << "bin,count\n";
    for (std::size_t i = 0; i < hist.counts.size(); ++i) {
        out << i << ',' << hist.counts[i] << '\n';
    }
    out << "never_learnt," << hist.never_learnt << '\n';
}

void export_confidence_band_csv(const ConfidenceBand& band, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write file: " + path);
    out << "rank,low,mean,high\n";
    for (std::size_t i = 0; i < band.mean.size(); ++i) {
        out << i << ',' << format_double(band.low[i]) << ',' << format_double(band.mean[i]) << ','
            << format_double(band.high[i]) << '\n';
    }
}

}  // namespace analytics
}  // namespace forgetlens
