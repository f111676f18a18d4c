#pragma once

#include <string>

#include "inner_cli/cli.hpp"

namespace inner::cli {

struct CommonOptions {
    std::uint64_t seed = 0;
    std::string out_dir;
    std::size_t threads = 1;
};

struct SimulateOptions {
    CommonOptions common;
    std::string scenario = "correct";
    std::size_t n_samples = 5000;
    std::size_t p_signal = 8;
    std::size_t p_noise = 0;
    double snr = 3.2;
};

struct TrainOptions {
    CommonOptions common;
    std::string data_path;
    std::string schema_path;  // empty: inferred from the header
    double val_fraction = 0.3;
    std::string arch = "250,125,1";
    std::string dropout;
    std::string weight_init = "glorot-uniform";
    std::string bias_init = "zeros";
    std::string optimizer = "sgd";
    double learning_rate = 0.01;
    std::size_t batch_size = 64;
    std::size_t max_epochs = 200;
    double gap_delta = 1e-2;
    bool logistic_baseline = false;
    std::size_t balanced = 0;  // K > 0 trains the balanced ensemble
};

struct EvaluateOptions {
    CommonOptions common;
    std::string data_path;
    std::string schema_path;
    std::string model_path;
    std::string transform_path;
    std::string impute_mode = "train";  // or "split": refit on the scored data
    double threshold = 0.5;
};

struct TuneOptions {
    CommonOptions common;
    std::string data_path;
    std::string schema_path;
    double val_fraction = 0.3;
    std::string arch = "250,125,1";
    std::string dropout;
    std::string weight_init = "glorot-uniform";
    std::string bias_init = "zeros";
    std::string optimizer = "sgd";
    std::size_t batch_size = 64;
    std::size_t max_epochs = 200;
    double gap_delta = 1e-2;
    double grid_min = 0.005;
    double grid_max = 0.1;
    std::size_t grid_points = 20;
};

struct BenchmarkFlags {
    CommonOptions common;
    std::string scenario = "correct";
    std::string snr_list = "3.2";
    std::string noise_list = "0";
    std::string cells = "16:40000";  // p:n pairs
    std::size_t repetitions = 10;
    std::string arch = "32,16,1";
    std::string optimizer = "adam";
    double learning_rate = 0.01;
    std::size_t batch_size = 64;
    std::size_t max_epochs = 200;
    double gap_delta = 0.1;
    double split_fraction = 0.8;
};

struct SubgroupOptions {
    CommonOptions common;
    std::string data_path;
    std::string schema_path;
    std::string model_path;
    std::string transform_path;
    double q = 0.2;
};

int cmd_simulate(const SimulateOptions& opt);
int cmd_train(const TrainOptions& opt);
int cmd_evaluate(const EvaluateOptions& opt);
int cmd_tune(const TuneOptions& opt);
int cmd_benchmark(const BenchmarkFlags& opt);
int cmd_subgroup(const SubgroupOptions& opt);

}  // namespace inner::cli
