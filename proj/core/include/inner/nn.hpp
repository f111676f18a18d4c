#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "inner/linalg.hpp"
#include "inner/rng.hpp"

namespace inner::nn {

enum class Activation { ReLU, Linear, Sigmoid };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

// Numerically stable logistic function, branch form for large |x|.
double sigmoid(double x);

enum class WeightInit { GlorotUniform, GlorotNormal, HeUniform };
enum class BiasInit { Zeros, Ones };

struct InitScheme {
    WeightInit weights = WeightInit::GlorotUniform;
    BiasInit bias = BiasInit::Zeros;
};

std::string to_string(WeightInit w);
std::string to_string(BiasInit b);
WeightInit weight_init_from_string(const std::string& name);
BiasInit bias_init_from_string(const std::string& name);

// One affine + activation stage with optional inverted dropout on its output.
struct DenseLayer {
    Matrix weights;       // out_dim x in_dim
    Vector bias;          // out_dim
    Activation activation = Activation::ReLU;
    double dropout_rate = 0.0;  // in [0, 1)

    std::size_t in_dim() const { return weights.cols(); }
    std::size_t out_dim() const { return weights.rows(); }
};

struct DenseNetwork {
    std::vector<DenseLayer> layers;
    std::size_t input_dim = 0;

    std::size_t output_dim() const { return layers.empty() ? input_dim : layers.back().out_dim(); }
    // Layer widths, input first: [k_1, k_2, ..., k_{L+1}].
    std::vector<std::size_t> dims() const;
};

enum class Mode { Train, Eval };

// Per-layer intermediates kept for backpropagation. Dropout masks hold the
// applied scale per unit: 0 for a dropped unit, 1/(1-rate) for a kept one.
// In Eval mode masks are empty and read as identity.
struct ForwardTrace {
    Vector input;
    std::vector<Vector> pre_activations;
    std::vector<Vector> outputs;  // post-activation, post-dropout
    std::vector<Vector> dropout_masks;
    Mode mode = Mode::Eval;
};

struct NetworkGrads {
    std::vector<Matrix> weights;
    std::vector<Vector> bias;

    void add(const NetworkGrads& other);
    void scale(double factor);
};

NetworkGrads zero_grads_like(const DenseNetwork& net);

// Builds a network from layer widths [k_1, ..., k_{L+1}], one activation and
// dropout rate per layer. Deterministic for a fixed seed.
DenseNetwork init_network(const std::vector<std::size_t>& dims,
                          const std::vector<Activation>& activations,
                          const std::vector<double>& dropout_rates,
                          const InitScheme& scheme, std::uint64_t seed);

// Forward evaluation. In Train mode surviving units are rescaled by
// 1/(1-dropout_rate) so the expectation over masks equals the Eval output;
// Eval mode never touches the rng.
std::pair<Vector, ForwardTrace> forward(const DenseNetwork& net, std::span<const double> input,
                                        Mode mode, Rng* rng);

// Eval-mode convenience; no trace retained.
Vector evaluate(const DenseNetwork& net, std::span<const double> input);

struct BackwardResult {
    NetworkGrads param_grads;
    Vector input_grad;
};

// Exact reverse-mode gradients for the traced computation, dropout masks and
// rescaling included. The trace must come from forward() on the same net.
BackwardResult backward(const DenseNetwork& net, const ForwardTrace& trace,
                        std::span<const double> upstream_grad);

// Flat parameter views, alpha ordering: layer 0 weights row-major, layer 0
// bias, layer 1 weights, ... Used by the optimizers and gradient checks.
std::size_t param_count(const DenseNetwork& net);
void copy_params(const DenseNetwork& net, std::span<double> out);
void set_params(DenseNetwork& net, std::span<const double> in);
void copy_grads(const NetworkGrads& grads, std::span<double> out);

}  // namespace inner::nn
