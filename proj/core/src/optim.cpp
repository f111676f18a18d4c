#include "inner/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "inner/errors.hpp"

namespace inner::optim {

std::string to_string(Optimizer o) {
    switch (o) {
        case Optimizer::Sgd: return "sgd";
        case Optimizer::Adagrad: return "adagrad";
        case Optimizer::Adadelta: return "adadelta";
        case Optimizer::Adam: return "adam";
    }
    return "sgd";
}

Optimizer optimizer_from_string(const std::string& name) {
    if (name == "sgd") return Optimizer::Sgd;
    if (name == "adagrad") return Optimizer::Adagrad;
    if (name == "adadelta") return Optimizer::Adadelta;
    if (name == "adam") return Optimizer::Adam;
    throw ConfigError("unknown optimizer: " + name);
}

void OptimizerState::ensure_size(std::size_t n) {
    if (accum1.size() != n) accum1.assign(n, 0.0);
    if (accum2.size() != n) accum2.assign(n, 0.0);
}

namespace {

void check_shapes(std::span<double> params, std::span<const double> grads) {
    if (params.size() != grads.size())
        throw ContractError("optimizer step: params/grads length mismatch");
}

}  // namespace

void step_sgd(std::span<double> params, std::span<const double> grads, OptimizerState& state,
              const TrainConfig& cfg) {
    check_shapes(params, grads);
    ++state.step;
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= cfg.learning_rate * grads[i];
}

void step_adagrad(std::span<double> params, std::span<const double> grads, OptimizerState& state,
                  const TrainConfig& cfg) {
    check_shapes(params, grads);
    state.ensure_size(params.size());
    ++state.step;
    const double eps = cfg.params.adagrad_epsilon;
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.accum1[i] += grads[i] * grads[i];
        params[i] -= cfg.learning_rate * grads[i] / (std::sqrt(state.accum1[i]) + eps);
    }
}

void step_adadelta(std::span<double> params, std::span<const double> grads, OptimizerState& state,
                   const TrainConfig& cfg) {
    check_shapes(params, grads);
    state.ensure_size(params.size());
    ++state.step;
    const double rho = cfg.params.adadelta_decay;
    const double eps = cfg.params.adadelta_epsilon;
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.accum1[i] = rho * state.accum1[i] + (1.0 - rho) * grads[i] * grads[i];
        const double update = -std::sqrt(state.accum2[i] + eps) / std::sqrt(state.accum1[i] + eps) *
                              grads[i];
        state.accum2[i] = rho * state.accum2[i] + (1.0 - rho) * update * update;
        params[i] += cfg.learning_rate * update;
    }
}

void step_adam(std::span<double> params, std::span<const double> grads, OptimizerState& state,
               const TrainConfig& cfg) {
    check_shapes(params, grads);
    state.ensure_size(params.size());
    ++state.step;
    const double b1 = cfg.params.adam_beta1;
    const double b2 = cfg.params.adam_beta2;
    const double eps = cfg.params.adam_epsilon;
    const double bias1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double bias2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.accum1[i] = b1 * state.accum1[i] + (1.0 - b1) * grads[i];
        state.accum2[i] = b2 * state.accum2[i] + (1.0 - b2) * grads[i] * grads[i];
        const double m_hat = state.accum1[i] / bias1;
        const double v_hat = state.accum2[i] / bias2;
        params[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + eps);
    }
}

void apply_step(Optimizer opt, std::span<double> params, std::span<const double> grads,
                OptimizerState& state, const TrainConfig& cfg) {
    switch (opt) {
        case Optimizer::Sgd: step_sgd(params, grads, state, cfg); break;
        case Optimizer::Adagrad: step_adagrad(params, grads, state, cfg); break;
        case Optimizer::Adadelta: step_adadelta(params, grads, state, cfg); break;
        case Optimizer::Adam: step_adam(params, grads, state, cfg); break;
    }
}

EpochBatcher::EpochBatcher(std::size_t n, std::size_t batch_size, Rng& rng)
    : indices_(n), batch_size_(batch_size) {
    if (batch_size == 0) throw ConfigError("batch size must be positive");
    std::iota(indices_.begin(), indices_.end(), std::size_t{0});
    rng.shuffle(indices_);
}

bool EpochBatcher::next(std::span<const std::size_t>& batch) {
    if (cursor_ >= indices_.size()) return false;
    const std::size_t len = std::min(batch_size_, indices_.size() - cursor_);
    batch = std::span<const std::size_t>(indices_.data() + cursor_, len);
    cursor_ += len;
    return true;
}

namespace {

double mean_loss(const InnerModel& model, std::span<const Subject> subjects) {
    return batch_loss(model, subjects) / static_cast<double>(subjects.size());
}

}  // namespace

TrainResult train(InnerModel model, std::span<const Subject> train_set,
                  std::span<const Subject> validation_set, const TrainConfig& cfg) {
    if (train_set.empty() || validation_set.empty())
        throw ConfigError("train: empty training or validation set");
    if (cfg.batch_size == 0 || cfg.batch_size > train_set.size())
        throw ConfigError("train: batch size must lie in [1, training-set size]");
    if (cfg.max_epochs == 0) throw ConfigError("train: max_epochs must be positive");
    if (cfg.gap_delta <= 0.0) throw ConfigError("train: gap_delta must be positive");
    validate_inner_architecture(model);

    Rng shuffle_rng(derive_seed(cfg.seed, "train:shuffle"));
    Rng dropout_rng(derive_seed(cfg.seed, "train:dropout"));

    Vector params = get_params(model);
    OptimizerState state;
    std::vector<Subject> batch_buffer;
    batch_buffer.reserve(cfg.batch_size);

    TrainLog log;
    log.stop_reason = StopReason::MaxEpochs;
    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        EpochBatcher batcher(train_set.size(), cfg.batch_size, shuffle_rng);
        std::span<const std::size_t> batch_idx;
        while (batcher.next(batch_idx)) {
            batch_buffer.clear();
            for (std::size_t i : batch_idx) batch_buffer.push_back(train_set[i]);
            InnerGrads grads = batch_gradients(model, batch_buffer, nn::Mode::Train, &dropout_rng);
            Vector flat = flatten_grads(model, grads);
            apply_step(cfg.optimizer, params, flat, state, cfg);
            set_params(model, params);
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = mean_loss(model, train_set);
        rec.validation_loss = mean_loss(model, validation_set);
        if (!std::isfinite(rec.train_loss) || !std::isfinite(rec.validation_loss))
            throw DivergenceError("training diverged at epoch " + std::to_string(epoch));
        log.epochs.push_back(rec);

        if (rec.validation_loss - rec.train_loss > cfg.gap_delta) {
            log.stop_reason = StopReason::GapExceeded;
            break;
        }
    }
    return {std::move(model), std::move(log)};
}

std::vector<double> default_learning_rate_grid() {
    std::vector<double> grid(20);
    for (std::size_t i = 0; i < grid.size(); ++i)
        grid[i] = 0.005 + static_cast<double>(i) * (0.1 - 0.005) / 19.0;
    return grid;
}

GridSearchResult grid_search_lr(const ModelFactory& factory, std::span<const Subject> train_set,
                                std::span<const Subject> validation_set,
                                std::span<const double> grid, const TrainConfig& base_cfg) {
    if (grid.empty()) throw ConfigError("grid_search_lr: empty grid");
    GridSearchResult result;
    result.points.reserve(grid.size());
    bool any_converged = false;
    double best_loss = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        TrainConfig cfg = base_cfg;
        cfg.learning_rate = grid[i];
        cfg.seed = derive_seed(base_cfg.seed, "grid", i);
        GridPoint point;
        point.learning_rate = grid[i];
        try {
            TrainResult run = train(factory(cfg.seed), train_set, validation_set, cfg);
            point.validation_loss = run.log.epochs.back().validation_loss;
        } catch (const DivergenceError&) {
            point.diverged = true;
        }
        const bool better =
            !point.diverged &&
            (!any_converged || point.validation_loss < best_loss ||
             (point.validation_loss == best_loss &&
              point.learning_rate < result.best_learning_rate));
        if (better) {
            any_converged = true;
            best_loss = point.validation_loss;
            result.best_learning_rate = point.learning_rate;
        }
        result.points.push_back(point);
    }
    if (!any_converged) {
        std::string msg = "grid_search_lr: every learning rate diverged;";
        for (const auto& p : result.points) msg += " " + std::to_string(p.learning_rate);
        throw NumericError(msg);
    }
    return result;
}

}  // namespace inner::optim
