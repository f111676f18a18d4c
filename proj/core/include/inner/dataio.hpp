#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "inner/model.hpp"

namespace inner::dataio {

enum class CovariateKind { Continuous, Categorical };

struct CovariateSpec {
    std::string name;
    CovariateKind kind = CovariateKind::Continuous;
    // Declared levels for a categorical covariate; inferred from the fitting
    // split when empty. The first level is the dropped reference.
    std::vector<std::string> levels;
};

struct CovariateSchema {
    std::vector<CovariateSpec> covariates;
    std::string pain_column = "x";
    std::string label_column = "y";

    void validate() const;
};

// Stable identifier tying a trained model to the schema it was fit under.
std::string schema_hash(const CovariateSchema& schema);

// Schema for simulation-style files: label y, pain x, continuous z1..zp.
CovariateSchema implicit_schema(std::size_t p);

struct RawCell {
    bool missing = true;
    double number = 0.0;
    std::string category;
};

struct RawRow {
    double pain = 0.0;
    int label = 0;
    std::vector<RawCell> cells;
    std::size_t line = 0;
};

struct RawTable {
    CovariateSchema schema;
    std::vector<RawRow> rows;
};

// Parses a cohort CSV against the schema. Empty fields and the literal NA
// are missing markers; labels must be 0/1 and pain must lie in [0, 10].
RawTable load_cohort(const std::string& path, const CovariateSchema& schema);

// Builds a RawTable in memory (used by tests and the simulation bridge).
RawTable table_from_rows(const CovariateSchema& schema, std::vector<RawRow> rows);

struct ContinuousTransform {
    double impute_value = 0.0;  // mean of observed values in the fitting split
    double center = 0.0;        // mean after imputation
    double scale = 1.0;         // sd after imputation
};

struct CategoricalTransform {
    std::string impute_level;  // mode of observed values
    std::vector<std::string> levels;
};

// Imputation and encoding statistics fit on one split only.
struct FittedTransform {
    CovariateSchema schema;
    std::vector<ContinuousTransform> continuous;    // indexed like schema (unused slots default)
    std::vector<CategoricalTransform> categorical;  // same indexing
    std::vector<std::string> column_names;          // design matrix columns
};

struct DesignMatrix {
    std::vector<std::string> column_names;
    Matrix covariates;  // n x d
    Vector pain;
    std::vector<int> labels;

    std::vector<Subject> to_subjects() const;
};

// Fits imputation (mean/mode) and encoding (standardization, one-hot with
// the reference level dropped) on the given split.
FittedTransform fit_transform(const RawTable& table);

// Applies a fitted transform; unseen categorical levels map to an all-zero
// block and are reported through warnings when provided.
DesignMatrix apply_transform(const RawTable& table, const FittedTransform& transform,
                             std::vector<std::string>* warnings = nullptr);

// Uniform random partition without replacement; the first part receives
// ceil(fraction * n) rows. Deterministic per seed, order-preserving.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, double fraction, std::uint64_t seed);

std::pair<RawTable, RawTable> split(const RawTable& table, double fraction, std::uint64_t seed);

template <typename T>
std::pair<std::vector<T>, std::vector<T>> split_rows(const std::vector<T>& rows, double fraction,
                                                     std::uint64_t seed) {
    auto [first, second] = split_indices(rows.size(), fraction, seed);
    std::pair<std::vector<T>, std::vector<T>> out;
    out.first.reserve(first.size());
    out.second.reserve(second.size());
    for (auto i : first) out.first.push_back(rows[i]);
    for (auto i : second) out.second.push_back(rows[i]);
    return out;
}

// All minority-class cases plus an equal-size without-replacement draw of
// controls; the result has prevalence exactly one half. Indices ascending.
std::vector<std::size_t> balanced_subsample(std::span<const int> labels, std::uint64_t seed);

// K models trained on balanced subsamples of one training split.
struct BalancedEnsemble {
    std::vector<InnerModel> models;
    std::vector<std::vector<std::size_t>> subsample_indices;
};

// Mean of the member models' predicted probabilities.
double ensemble_predict(const BalancedEnsemble& ensemble, const Subject& subject);

}  // namespace inner::dataio
