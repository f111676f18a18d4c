#include "inner/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "inner/errors.hpp"

namespace inner::metrics {

namespace {

void check_two_classes(std::span<const int> labels, std::size_t& n_pos, std::size_t& n_neg) {
    n_pos = n_neg = 0;
    for (int y : labels) {
        if (y != 0 && y != 1) throw ContractError("labels must be 0 or 1");
        if (y == 1)
            ++n_pos;
        else
            ++n_neg;
    }
    if (n_pos == 0 || n_neg == 0)
        throw UndefinedMetricError("metric undefined: both classes must be present");
}

}  // namespace

double c_statistic(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw ContractError("scores/labels length mismatch");
    std::size_t n_pos = 0, n_neg = 0;
    check_two_classes(labels, n_pos, n_neg);

    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Midranks over tie groups; rank sums of small integers and halves stay
    // exact in double.
    double positive_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
        for (std::size_t k = i; k < j; ++k)
            if (labels[order[k]] == 1) positive_rank_sum += midrank;
        i = j;
    }
    const double np = static_cast<double>(n_pos);
    const double u = positive_rank_sum - np * (np + 1.0) / 2.0;
    return u / (np * static_cast<double>(n_neg));
}

MetricReport classify_and_score(std::span<const double> scores, std::span<const int> labels,
                                double threshold) {
    if (scores.size() != labels.size()) throw ContractError("scores/labels length mismatch");
    if (!(threshold > 0.0 && threshold < 1.0))
        throw ContractError("threshold must lie strictly inside (0,1)");
    MetricReport report;
    check_two_classes(labels, report.n_pos, report.n_neg);
    report.threshold = threshold;
    report.c_statistic = c_statistic(scores, labels);

    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool called_positive = scores[i] > threshold;
        if (labels[i] == 1)
            called_positive ? ++tp : ++fn;
        else
            called_positive ? ++fp : ++tn;
    }
    const double n = static_cast<double>(scores.size());
    report.accuracy = static_cast<double>(tp + tn) / n;
    report.sensitivity = static_cast<double>(tp) / static_cast<double>(tp + fn);
    report.specificity = static_cast<double>(tn) / static_cast<double>(tn + fp);
    report.balance_accuracy = (report.sensitivity + report.specificity) / 2.0;
    return report;
}

namespace {

MetricSummary summarize(std::span<const double> values) {
    const bool all_equal =
        std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); });
    if (all_equal) return {values.front(), 0.0};
    const double r = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= r;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (r - 1.0));
    return {mean, sd / std::sqrt(r)};
}

}  // namespace

AggregateReport aggregate(std::span<const MetricReport> reports) {
    if (reports.size() < 2)
        throw ContractError("aggregate: standard errors need at least two repetitions");
    for (const auto& r : reports)
        if (r.threshold != reports.front().threshold)
            throw ContractError("aggregate: mixed thresholds");

    AggregateReport agg;
    agg.threshold = reports.front().threshold;
    agg.repetitions = reports.size();
    std::vector<double> buf(reports.size());
    auto collect = [&](auto member) {
        for (std::size_t i = 0; i < reports.size(); ++i) buf[i] = reports[i].*member;
        return summarize(buf);
    };
    agg.c_statistic = collect(&MetricReport::c_statistic);
    agg.accuracy = collect(&MetricReport::accuracy);
    agg.sensitivity = collect(&MetricReport::sensitivity);
    agg.specificity = collect(&MetricReport::specificity);
    agg.balance_accuracy = collect(&MetricReport::balance_accuracy);
    return agg;
}

}  // namespace inner::metrics
