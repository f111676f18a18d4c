#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "inner/model.hpp"

namespace inner::optim {

enum class Optimizer { Sgd, Adagrad, Adadelta, Adam };

std::string to_string(Optimizer o);
Optimizer optimizer_from_string(const std::string& name);

// Constants for the adaptive update rules, at their usual defaults.
struct OptimizerParams {
    double adagrad_epsilon = 1e-8;
    double adadelta_decay = 0.95;
    double adadelta_epsilon = 1e-6;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
};

struct TrainConfig {
    double learning_rate = 0.01;
    std::size_t batch_size = 64;
    std::size_t max_epochs = 200;
    // Stop once validation loss - training loss exceeds this gap (per-sample
    // mean losses).
    double gap_delta = 1e-2;
    Optimizer optimizer = Optimizer::Sgd;
    OptimizerParams params;
    std::uint64_t seed = 0;
};

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    double train_loss = 0.0;
    double validation_loss = 0.0;

    bool operator==(const EpochRecord&) const = default;
};

enum class StopReason { GapExceeded, MaxEpochs };

struct TrainLog {
    std::vector<EpochRecord> epochs;
    StopReason stop_reason = StopReason::MaxEpochs;

    bool operator==(const TrainLog&) const = default;
};

// Accumulators shared by the adaptive optimizers; sized on first use.
struct OptimizerState {
    Vector accum1;  // Adagrad sum of squares / Adam first moment / Adadelta E[g^2]
    Vector accum2;  // Adam second moment / Adadelta E[dx^2]
    std::size_t step = 0;

    void ensure_size(std::size_t n);
};

// Elementwise update rules. params and grads must have equal length.
void step_sgd(std::span<double> params, std::span<const double> grads, OptimizerState& state,
              const TrainConfig& cfg);
void step_adagrad(std::span<double> params, std::span<const double> grads, OptimizerState& state,
                  const TrainConfig& cfg);
void step_adadelta(std::span<double> params, std::span<const double> grads, OptimizerState& state,
                   const TrainConfig& cfg);
void step_adam(std::span<double> params, std::span<const double> grads, OptimizerState& state,
               const TrainConfig& cfg);
void apply_step(Optimizer opt, std::span<double> params, std::span<const double> grads,
                OptimizerState& state, const TrainConfig& cfg);

// Deterministic within-epoch minibatch schedule: shuffles the index set and
// yields consecutive chunks, keeping the final short batch, so every index
// is visited exactly once per epoch.
class EpochBatcher {
public:
    EpochBatcher(std::size_t n, std::size_t batch_size, Rng& rng);
    bool next(std::span<const std::size_t>& batch);

private:
    std::vector<std::size_t> indices_;
    std::size_t batch_size_;
    std::size_t cursor_ = 0;
};

struct TrainResult {
    InnerModel model;
    TrainLog log;
};

// Minibatch gradient descent: per epoch, shuffle, walk the data without
// replacement applying one optimizer update per minibatch, then log full-set
// per-sample mean train/validation losses. Stops when the validation-train
// gap exceeds cfg.gap_delta or at max_epochs; returns the parameters from
// the final completed epoch.
TrainResult train(InnerModel model, std::span<const Subject> train_set,
                  std::span<const Subject> validation_set, const TrainConfig& cfg);

using ModelFactory = std::function<InnerModel(std::uint64_t seed)>;

struct GridPoint {
    double learning_rate = 0.0;
    double validation_loss = 0.0;
    bool diverged = false;
};

struct GridSearchResult {
    double best_learning_rate = 0.0;
    std::vector<GridPoint> points;
};

// 20 equally spaced learning rates from 0.005 to 0.1.
std::vector<double> default_learning_rate_grid();

// Trains one fresh model per grid point (factory seeded per point) and picks
// the learning rate with the lowest final validation loss; ties go to the
// smaller rate. Throws if every point diverges.
GridSearchResult grid_search_lr(const ModelFactory& factory, std::span<const Subject> train_set,
                                std::span<const Subject> validation_set,
                                std::span<const double> grid, const TrainConfig& base_cfg);

}  // namespace inner::optim
