#include "inner/model.hpp"

#include <algorithm>
#include <cmath>

#include "inner/errors.hpp"

namespace inner {

namespace {

// Stable per-sample cross entropy from the raw logit:
//   -[y log p + (1-y) log(1-p)] = max(l, 0) - y*l + log(1 + exp(-|l|)).
double cross_entropy_from_logit(double l, double y) {
    return std::max(l, 0.0) - y * l + std::log1p(std::exp(-std::abs(l)));
}

void check_subject(const InnerModel& model, const Subject& s) {
    if (s.covariates.size() != model.covariate_dim())
        throw ContractError("subject covariate length " + std::to_string(s.covariates.size()) +
                            " does not match model input dim " + std::to_string(model.covariate_dim()));
}

}  // namespace

void validate_inner_architecture(const InnerModel& model) {
    const auto da = model.net_alpha.dims();
    const auto db = model.net_beta.dims();
    if (da != db) throw ConfigError("inner model: alpha and beta architectures differ");
    if (model.net_alpha.layers.empty()) throw ConfigError("inner model: empty network");
    if (model.net_alpha.output_dim() != 1 || model.net_beta.output_dim() != 1)
        throw ConfigError("inner model: final layer must have a single output unit");
    if (model.net_alpha.layers.back().activation != nn::Activation::Linear ||
        model.net_beta.layers.back().activation != nn::Activation::Linear)
        throw ConfigError("inner model: final layer activation must be linear");
    for (std::size_t l = 0; l < model.net_alpha.layers.size(); ++l)
        if (model.net_alpha.layers[l].activation != model.net_beta.layers[l].activation)
            throw ConfigError("inner model: alpha and beta activations differ");
}

InnerModel init_inner_model(const std::vector<std::size_t>& dims,
                            const std::vector<nn::Activation>& activations,
                            const std::vector<double>& dropout_rates,
                            const nn::InitScheme& scheme, std::uint64_t seed) {
    InnerModel model;
    model.net_alpha = nn::init_network(dims, activations, dropout_rates, scheme,
                                       derive_seed(seed, "init:alpha"));
    model.net_beta = nn::init_network(dims, activations, dropout_rates, scheme,
                                      derive_seed(seed, "init:beta"));
    validate_inner_architecture(model);
    return model;
}

InnerModel make_logistic_baseline(std::size_t p) {
    if (p < 1) throw ConfigError("make_logistic_baseline: p must be >= 1");
    std::vector<std::size_t> dims{p, 1};
    std::vector<nn::Activation> acts{nn::Activation::Linear};
    std::vector<double> rates{0.0};
    // Zero start: deterministic and a sensible origin for a convex fit.
    InnerModel model = init_inner_model(dims, acts, rates, {}, 0);
    for (auto* net : {&model.net_alpha, &model.net_beta}) {
        net->layers[0].weights.fill(0.0);
        net->layers[0].bias.assign(1, 0.0);
    }
    return model;
}

double logit(const InnerModel& model, const Subject& subject) {
    check_subject(model, subject);
    const double a = nn::evaluate(model.net_alpha, subject.covariates)[0];
    const double b = nn::evaluate(model.net_beta, subject.covariates)[0];
    return a + b * subject.pain;
}

double predict(const InnerModel& model, const Subject& subject) {
    const double l = std::clamp(logit(model, subject), -kLogitClamp, kLogitClamp);
    return nn::sigmoid(l);
}

TendencyScore tendency(const InnerModel& model, std::span<const double> covariates) {
    if (covariates.size() != model.covariate_dim())
        throw ContractError("tendency: covariate length does not match model input dim");
    TendencyScore score;
    score.log_bot = nn::evaluate(model.net_alpha, covariates)[0];
    score.log_pot = nn::evaluate(model.net_beta, covariates)[0];
    score.bot = std::exp(score.log_bot);
    score.pot = std::exp(score.log_pot);
    return score;
}

double batch_loss(const InnerModel& model, std::span<const Subject> subjects) {
    double total = 0.0;
    for (const Subject& s : subjects) {
        if (!s.label.has_value()) throw ContractError("batch_loss: unlabeled subject");
        check_subject(model, s);
        const double a = nn::evaluate(model.net_alpha, s.covariates)[0];
        const double b = nn::evaluate(model.net_beta, s.covariates)[0];
        const double l = std::clamp(a + b * s.pain, -kLogitClamp, kLogitClamp);
        total += cross_entropy_from_logit(l, static_cast<double>(*s.label));
    }
    return total;
}

InnerGrads batch_gradients(const InnerModel& model, std::span<const Subject> subjects,
                           nn::Mode mode, Rng* rng) {
    InnerGrads grads{nn::zero_grads_like(model.net_alpha), nn::zero_grads_like(model.net_beta)};
    Vector upstream(1);
    for (const Subject& s : subjects) {
        if (!s.label.has_value()) throw ContractError("batch_gradients: unlabeled subject");
        check_subject(model, s);
        auto [a_out, a_trace] = nn::forward(model.net_alpha, s.covariates, mode, rng);
        auto [b_out, b_trace] = nn::forward(model.net_beta, s.covariates, mode, rng);
        const double l = a_out[0] + b_out[0] * s.pain;
        const double residual = nn::sigmoid(l) - static_cast<double>(*s.label);

        upstream[0] = residual;
        grads.alpha.add(nn::backward(model.net_alpha, a_trace, upstream).param_grads);
        upstream[0] = residual * s.pain;
        grads.beta.add(nn::backward(model.net_beta, b_trace, upstream).param_grads);
    }
    return grads;
}

std::size_t param_count(const InnerModel& model) {
    return nn::param_count(model.net_alpha) + nn::param_count(model.net_beta);
}

Vector get_params(const InnerModel& model) {
    Vector params(param_count(model));
    const std::size_t na = nn::param_count(model.net_alpha);
    nn::copy_params(model.net_alpha, std::span(params).subspan(0, na));
    nn::copy_params(model.net_beta, std::span(params).subspan(na));
    return params;
}

void set_params(InnerModel& model, std::span<const double> params) {
    if (params.size() != param_count(model)) throw ContractError("set_params: size mismatch");
    const std::size_t na = nn::param_count(model.net_alpha);
    nn::set_params(model.net_alpha, params.subspan(0, na));
    nn::set_params(model.net_beta, params.subspan(na));
}

Vector flatten_grads(const InnerModel& model, const InnerGrads& grads) {
    Vector flat(param_count(model));
    const std::size_t na = nn::param_count(model.net_alpha);
    nn::copy_grads(grads.alpha, std::span(flat).subspan(0, na));
    nn::copy_grads(grads.beta, std::span(flat).subspan(na));
    return flat;
}

}  // namespace inner
