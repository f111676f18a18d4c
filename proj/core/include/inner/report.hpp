#pragma once

#include <span>
#include <string>
#include <vector>

#include "inner/metrics.hpp"
#include "inner/optim.hpp"
#include "inner/simgen.hpp"
#include "inner/subgroup.hpp"

namespace inner::report {

// Full-precision decimal form that parses back to the same double.
std::string format_double(double v);

// "0.96 (0.0003)": mean to 2 decimals, standard error to 4.
std::string format_mean_se(const metrics::MetricSummary& s);

// CSV with header epoch,train_loss,validation_loss.
std::string train_log_csv(const optim::TrainLog& log);

// Dataset CSV with header y,x,z1..zp.
std::string dataset_csv(std::span<const Subject> subjects);

// Two-series learning curve (train/validation loss per epoch). No
// timestamps; output depends only on the log.
std::string learning_curve_svg(const optim::TrainLog& log);

std::string subgroup_label(subgroup::TailClass bot, subgroup::TailClass pot);

// Per-subject subgroup report CSV.
std::string subgroup_csv(std::span<const TendencyScore> scores,
                         std::span<const subgroup::SubgroupAssignment> assignments);

// Risk curve CSV: subgroup,pain,mean_prob.
std::string risk_curves_csv(std::span<const subgroup::RiskCurve> curves);

// Multi-line chart of the subgroup risk curves with a 0.5 reference line.
std::string risk_curves_svg(std::span<const subgroup::RiskCurve> curves);

// R-squared table CSV: covariate,r2_bot,r2_pot (empty field when undefined).
std::string r2_csv(std::span<const subgroup::R2Entry> entries);

// One benchmark cell: the generating configuration plus aggregate metrics
// for the model and the logistic baseline.
struct BenchmarkCell {
    simgen::SimConfig config;
    std::size_t repetitions = 0;
    metrics::MetricSummary model_c_statistic;
    metrics::MetricSummary baseline_c_statistic;
    bool failed = false;
    std::string failure;
};

std::string benchmark_table_text(std::span<const BenchmarkCell> cells);
std::string benchmark_report_json(std::span<const BenchmarkCell> cells);

// Aligned text block of an aggregate report, one metric per row.
std::string aggregate_table_text(const metrics::AggregateReport& report);

}  // namespace inner::report
