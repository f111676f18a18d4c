#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "inner/model.hpp"

namespace testutil {

// Central finite differences of batch_loss with respect to the flattened
// model parameters. Independent of the backward pass it checks.
inline inner::Vector finite_difference_grads(inner::InnerModel model,
                                             std::span<const inner::Subject> batch,
                                             double step = 1e-6) {
    inner::Vector params = inner::get_params(model);
    inner::Vector grads(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double orig = params[i];
        params[i] = orig + step;
        inner::set_params(model, params);
        const double up = inner::batch_loss(model, batch);
        params[i] = orig - step;
        inner::set_params(model, params);
        const double down = inner::batch_loss(model, batch);
        params[i] = orig;
        grads[i] = (up - down) / (2.0 * step);
    }
    inner::set_params(model, params);
    return grads;
}

// Same oracle for a bare network, differentiating its scalar output.
inline inner::Vector finite_difference_net_grads(inner::nn::DenseNetwork net,
                                                 const inner::Vector& input,
                                                 double step = 1e-6) {
    inner::Vector params(inner::nn::param_count(net));
    inner::nn::copy_params(net, params);
    inner::Vector grads(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double orig = params[i];
        params[i] = orig + step;
        inner::nn::set_params(net, params);
        const double up = inner::nn::evaluate(net, input)[0];
        params[i] = orig - step;
        inner::nn::set_params(net, params);
        const double down = inner::nn::evaluate(net, input)[0];
        params[i] = orig;
        grads[i] = (up - down) / (2.0 * step);
    }
    return grads;
}

// Relative error with a small floor so finite-difference noise on near-zero
// partials does not dominate.
inline double max_relative_error(std::span<const double> a, std::span<const double> b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double denom = std::max({std::abs(a[i]), std::abs(b[i]), 1e-2});
        worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
    }
    return worst;
}

// True when every relu pre-activation sits clear of its kink, so a central
// difference never straddles a non-differentiable point. Draws failing this
// are resampled by the gradient checks; at a kink the derivative does not
// exist and the finite-difference oracle is invalid.
inline bool clear_of_kinks(const inner::nn::DenseNetwork& net, const inner::Vector& input,
                           double margin = 1e-4) {
    const auto trace = inner::nn::forward(net, input, inner::nn::Mode::Eval, nullptr).second;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        if (net.layers[l].activation != inner::nn::Activation::ReLU) continue;
        for (double pre : trace.pre_activations[l])
            if (std::abs(pre) < margin) return false;
    }
    return true;
}

// Model-level guard: both networks plus the logit clamp boundary.
inline bool clear_of_kinks(const inner::InnerModel& model, const inner::Subject& subject,
                           double margin = 1e-4) {
    if (!clear_of_kinks(model.net_alpha, subject.covariates, margin)) return false;
    if (!clear_of_kinks(model.net_beta, subject.covariates, margin)) return false;
    const double l = inner::logit(model, subject);
    return std::abs(std::abs(l) - inner::kLogitClamp) > 1e-3;
}

}  // namespace testutil
