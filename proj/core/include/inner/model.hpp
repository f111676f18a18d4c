#pragma once

#include <optional>
#include <span>
#include <vector>

#include "inner/nn.hpp"

namespace inner {

// One observation: overall body pain score in [0, 10], a covariate vector,
// and an optional binary outcome.
struct Subject {
    double pain = 0.0;
    Vector covariates;
    std::optional<int> label;
};

// Patient-level odds scores derived from the two network outputs:
// bot = exp(alpha output), the odds of a positive outcome at zero pain;
// pot = exp(beta output), the odds ratio per unit pain increase.
struct TendencyScore {
    double log_bot = 0.0;
    double log_pot = 0.0;
    double bot = 1.0;
    double pot = 1.0;
};

// Varying-coefficient logistic model: the intercept and the pain slope are
// each produced by a dense network of the covariates,
//   logit P(y=1 | x, z) = F(z; alpha) + F(z; beta) * x.
// Both networks share one architecture and end in a scalar linear unit.
struct InnerModel {
    nn::DenseNetwork net_alpha;
    nn::DenseNetwork net_beta;

    std::size_t covariate_dim() const { return net_alpha.input_dim; }
};

// Guard for the sigmoid/loss path only; keeps probabilities strictly inside
// (0,1) in double precision. Gradients use unclamped logits.
inline constexpr double kLogitClamp = 35.0;

void validate_inner_architecture(const InnerModel& model);

// Builds both networks with a shared architecture. dims = [p, ..., 1]; the
// final activation must be Linear. Alpha and beta get independent streams
// derived from seed.
InnerModel init_inner_model(const std::vector<std::size_t>& dims,
                            const std::vector<nn::Activation>& activations,
                            const std::vector<double>& dropout_rates,
                            const nn::InitScheme& scheme, std::uint64_t seed);

// The one-layer, linear-activation special case: an ordinary logistic
// regression with pain interactions. Parameters start at zero.
InnerModel make_logistic_baseline(std::size_t p);

// Raw linear predictor a + b*x in Eval mode.
double logit(const InnerModel& model, const Subject& subject);

// P(y=1 | pain, covariates), strictly inside (0,1); Eval mode, no dropout.
double predict(const InnerModel& model, const Subject& subject);

TendencyScore tendency(const InnerModel& model, std::span<const double> covariates);

// Total negative log likelihood over the batch (a plain sum, not a mean),
// evaluated in Eval mode through a log-sum-exp-safe form. All subjects must
// be labeled.
double batch_loss(const InnerModel& model, std::span<const Subject> subjects);

struct InnerGrads {
    nn::NetworkGrads alpha;
    nn::NetworkGrads beta;
};

// Gradients of batch_loss with respect to every parameter of both networks.
// dL/dlogit_i = p_i - y_i feeds the alpha network directly and the beta
// network scaled by pain. Train mode draws fresh dropout masks from rng.
InnerGrads batch_gradients(const InnerModel& model, std::span<const Subject> subjects,
                           nn::Mode mode = nn::Mode::Eval, Rng* rng = nullptr);

// Flat parameter vector across both networks (alpha first), for optimizers
// and finite-difference checks.
std::size_t param_count(const InnerModel& model);
Vector get_params(const InnerModel& model);
void set_params(InnerModel& model, std::span<const double> params);
Vector flatten_grads(const InnerModel& model, const InnerGrads& grads);

}  // namespace inner
