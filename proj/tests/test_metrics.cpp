#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "inner/errors.hpp"
#include "inner/linalg.hpp"
#include "inner/metrics.hpp"
#include "inner/rng.hpp"

using namespace inner;
using namespace inner::metrics;

namespace {

// O(n^2) oracle: probability a random positive outranks a random negative,
// ties counted one half.
double pairwise_auc(std::span<const double> scores, std::span<const int> labels) {
    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            ++pairs;
            if (scores[i] > scores[j])
                wins += 1.0;
            else if (scores[i] == scores[j])
                wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

}  // namespace

TEST_CASE("perfect ranking scores one") {
    Vector scores{0.9, 0.1};
    std::vector<int> labels{1, 0};
    CHECK(c_statistic(scores, labels) == 1.0);
}

TEST_CASE("all-tied scores give one half") {
    Vector scores{0.4, 0.4, 0.4, 0.4};
    std::vector<int> labels{1, 0, 1, 0};
    CHECK(c_statistic(scores, labels) == 0.5);
}

TEST_CASE("hand-enumerated four-point instance") {
    // Pairs: (0.5 vs 0.2) win, (0.5 vs 0.8) loss, (0.4 vs 0.2) win,
    // (0.4 vs 0.8) loss -> 2 of 4.
    Vector scores{0.2, 0.5, 0.8, 0.4};
    std::vector<int> labels{0, 1, 0, 1};
    CHECK(c_statistic(scores, labels) == 0.5);
}

TEST_CASE("single-class input is an undefined metric") {
    Vector scores{0.2, 0.5};
    std::vector<int> ones{1, 1};
    std::vector<int> zeros{0, 0};
    CHECK_THROWS_AS(c_statistic(scores, ones), UndefinedMetricError);
    CHECK_THROWS_AS(c_statistic(scores, zeros), UndefinedMetricError);
}

TEST_CASE("rank-sum equals exhaustive pair enumeration exactly, ties included") {
    Rng rng(555);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng.below(199);
        Vector scores(n);
        std::vector<int> labels(n);
        bool saw0 = false, saw1 = false;
        for (std::size_t i = 0; i < n; ++i) {
            // Coarse quantization forces plenty of ties.
            scores[i] = std::floor(rng.uniform() * 8.0) / 8.0;
            labels[i] = rng.below(2) == 0 ? 0 : 1;
            (labels[i] ? saw1 : saw0) = true;
        }
        if (!saw0 || !saw1) {
            labels[0] = 0;
            labels[n - 1] = 1;
        }
        CHECK(c_statistic(scores, labels) == pairwise_auc(scores, labels));
    }
}

TEST_CASE("auc is invariant under strictly increasing transforms") {
    Rng rng(556);
    const std::size_t n = 100;
    Vector scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        scores[i] = rng.normal();
        labels[i] = rng.below(2) == 0 ? 0 : 1;
    }
    labels[0] = 0;
    labels[1] = 1;
    const double base = c_statistic(scores, labels);
    Vector warped(n);
    for (std::size_t i = 0; i < n; ++i) warped[i] = std::exp(2.0 * scores[i]) + 3.0;
    CHECK(c_statistic(warped, labels) == base);
}

TEST_CASE("classification at a clean threshold") {
    Vector scores{0.6, 0.4};
    std::vector<int> labels{1, 0};
    auto r = classify_and_score(scores, labels, 0.5);
    CHECK(r.sensitivity == 1.0);
    CHECK(r.specificity == 1.0);
    CHECK(r.accuracy == 1.0);
    CHECK(r.balance_accuracy == 1.0);
    CHECK(r.n_pos == 1);
    CHECK(r.n_neg == 1);
}

TEST_CASE("hand confusion table") {
    Vector scores{0.3, 0.3, 0.7};
    std::vector<int> labels{0, 1, 1};
    auto r = classify_and_score(scores, labels, 0.5);
    CHECK(r.sensitivity == 0.5);
    CHECK(r.specificity == 1.0);
    CHECK(r.balance_accuracy == 0.75);
    CHECK(r.accuracy == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("score exactly at threshold is a negative call") {
    Vector scores{0.5};
    std::vector<int> labels{1};
    Vector scores2{0.5, 0.6};
    std::vector<int> labels2{0, 1};
    auto r = classify_and_score(scores2, labels2, 0.5);
    CHECK(r.specificity == 1.0);  // 0.5 not called positive
}

TEST_CASE("both standard operating points are accepted") {
    Vector scores{0.3, 0.25, 0.7, 0.1};
    std::vector<int> labels{1, 0, 1, 0};
    auto r50 = classify_and_score(scores, labels, 0.50);
    auto r23 = classify_and_score(scores, labels, 0.2309);
    CHECK(r50.threshold == 0.50);
    CHECK(r23.threshold == 0.2309);
    CHECK(r23.sensitivity >= r50.sensitivity);
}

TEST_CASE("raising the threshold never raises sensitivity nor lowers specificity") {
    Rng rng(557);
    const std::size_t n = 200;
    Vector scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        scores[i] = rng.uniform();
        labels[i] = rng.below(2) == 0 ? 0 : 1;
    }
    labels[0] = 0;
    labels[1] = 1;
    double prev_sens = 1.0, prev_spec = 0.0;
    for (double th = 0.1; th < 1.0; th += 0.1) {
        auto r = classify_and_score(scores, labels, th);
        CHECK(r.sensitivity <= prev_sens + 1e-15);
        CHECK(r.specificity >= prev_spec - 1e-15);
        prev_sens = r.sensitivity;
        prev_spec = r.specificity;
    }
}

TEST_CASE("aggregate of identical reports has zero standard error") {
    MetricReport r;
    r.c_statistic = 0.8;
    r.accuracy = 0.7;
    r.sensitivity = 0.6;
    r.specificity = 0.8;
    r.balance_accuracy = 0.7;
    r.threshold = 0.5;
    std::vector<MetricReport> reports{r, r, r};
    auto agg = aggregate(reports);
    CHECK(agg.c_statistic.mean == doctest::Approx(0.8));
    CHECK(agg.c_statistic.standard_error == 0.0);
    CHECK(agg.repetitions == 3);
}

TEST_CASE("aggregate of 0.7 and 0.9 c-statistics") {
    MetricReport a, b;
    a.c_statistic = 0.7;
    b.c_statistic = 0.9;
    std::vector<MetricReport> reports{a, b};
    auto agg = aggregate(reports);
    CHECK(agg.c_statistic.mean == doctest::Approx(0.8));
    // sd = sqrt(0.02), se = sd / sqrt(2) = 0.1 exactly.
    CHECK(agg.c_statistic.standard_error == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("aggregate rejects singletons and mixed thresholds") {
    MetricReport a;
    std::vector<MetricReport> one{a};
    CHECK_THROWS_AS(aggregate(one), ContractError);
    MetricReport b;
    b.threshold = 0.23;
    std::vector<MetricReport> mixed{a, b};
    CHECK_THROWS_AS(aggregate(mixed), ContractError);
}
