#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "inner/optim.hpp"
#include "inner/report.hpp"
#include "inner/simgen.hpp"

namespace inner::cli {

// Parses and executes one command line (without the program name). Returns
// the process exit code: 0 success, 1 validation error, 2 I/O error,
// 3 numeric failure.
int run(const std::vector<std::string>& args);

// Architecture of the two coefficient networks: hidden widths ending in the
// scalar output, e.g. {250, 125, 1}; hidden layers are ReLU, the output
// layer linear.
struct ArchSpec {
    std::vector<std::size_t> layer_widths{250, 125, 1};
    std::vector<double> dropout_rates;  // empty = no dropout
    nn::InitScheme init;

    InnerModel build(std::size_t input_dim, std::uint64_t seed) const;
};

ArchSpec parse_arch(const std::string& widths_csv, const std::string& dropout_csv,
                    const std::string& weight_init, const std::string& bias_init);

struct BenchmarkOptions {
    simgen::ExperimentAxes axes;
    std::size_t repetitions = 10;
    ArchSpec arch{{32, 16, 1}, {}, {}};
    optim::TrainConfig train;
    double split_fraction = 0.8;
    bool include_model = true;  // the INNER fit; the logistic baseline always runs
    std::size_t threads = 1;
};

// Per cell and replication: generate, split, train the model and the
// logistic baseline, score the held-out part. Replications run on a worker
// pool; results are deterministic for a fixed seed regardless of thread
// count. Cell failures are recorded, not thrown.
std::vector<report::BenchmarkCell> run_benchmark(const BenchmarkOptions& options);

// Single replication of one cell; exposed for the acceptance suite.
struct CellRun {
    double model_c_statistic = 0.0;
    double baseline_c_statistic = 0.0;
};
CellRun run_cell_once(const simgen::SimConfig& cell, std::uint64_t replication,
                      const BenchmarkOptions& options);

}  // namespace inner::cli
