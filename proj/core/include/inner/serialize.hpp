#pragma once

#include <string>

#include "inner/dataio.hpp"
#include "inner/metrics.hpp"
#include "inner/model.hpp"
#include "inner/optim.hpp"
#include "inner/simgen.hpp"

namespace inner::serialize {

// Network JSON: {dims, activations, dropout_rates, layers: [{weights, bias}]}
// with weights flattened row-major. Round-trips are bit-exact for finite
// doubles.
std::string network_to_json(const nn::DenseNetwork& net);
nn::DenseNetwork network_from_json(const std::string& json_text);

// Model envelope: {architecture, net_alpha, net_beta, covariate_schema_hash}.
std::string model_to_json(const InnerModel& model, const std::string& covariate_schema_hash);
struct ModelEnvelope {
    InnerModel model;
    std::string covariate_schema_hash;
};
ModelEnvelope model_from_json(const std::string& json_text);

// Ensemble file: {models: [envelope...], subsample_indices}.
std::string ensemble_to_json(const dataio::BalancedEnsemble& ensemble,
                             const std::string& covariate_schema_hash);
dataio::BalancedEnsemble ensemble_from_json(const std::string& json_text,
                                            std::string* covariate_schema_hash = nullptr);

// Schema file: {covariates: [{name, kind, levels?}], pain_column, label_column}.
std::string schema_to_json(const dataio::CovariateSchema& schema);
dataio::CovariateSchema schema_from_json(const std::string& json_text);

std::string transform_to_json(const dataio::FittedTransform& transform);
dataio::FittedTransform transform_from_json(const std::string& json_text);

std::string metric_report_to_json(const metrics::MetricReport& report);
std::string aggregate_report_to_json(const metrics::AggregateReport& report);

// Simulation truth sidecar: coefficients, calibrated scale, achieved SNR
// and the generating configuration.
std::string sim_truth_to_json(const simgen::SimDataset& dataset);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace inner::serialize
