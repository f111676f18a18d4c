#pragma once

#include <span>
#include <string>
#include <vector>

namespace inner::metrics {

struct MetricReport {
    double c_statistic = 0.0;
    double accuracy = 0.0;
    double sensitivity = 0.0;
    double specificity = 0.0;
    double balance_accuracy = 0.0;
    double threshold = 0.5;
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
};

struct MetricSummary {
    double mean = 0.0;
    double standard_error = 0.0;
};

struct AggregateReport {
    MetricSummary c_statistic;
    MetricSummary accuracy;
    MetricSummary sensitivity;
    MetricSummary specificity;
    MetricSummary balance_accuracy;
    double threshold = 0.5;
    std::size_t repetitions = 0;
};

// Probability that a random positive outranks a random negative, ties
// counted one half; rank-sum formulation, O(n log n). Needs both classes.
double c_statistic(std::span<const double> scores, std::span<const int> labels);

// Thresholded confusion metrics plus the C-statistic. A score counts as a
// positive call only when strictly above the threshold.
MetricReport classify_and_score(std::span<const double> scores, std::span<const int> labels,
                                double threshold);

// Per-metric mean and standard error (sample sd over sqrt(R)) across
// repetitions sharing one threshold. Needs R >= 2.
AggregateReport aggregate(std::span<const MetricReport> reports);

}  // namespace inner::metrics
