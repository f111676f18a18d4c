#include "inner/nn.hpp"

#include <cmath>
#include <cstring>

#include "inner/errors.hpp"

namespace inner::nn {

std::string to_string(Activation a) {
    switch (a) {
        case Activation::ReLU: return "relu";
        case Activation::Linear: return "linear";
        case Activation::Sigmoid: return "sigmoid";
    }
    return "relu";
}

Activation activation_from_string(const std::string& name) {
    if (name == "relu") return Activation::ReLU;
    if (name == "linear") return Activation::Linear;
    if (name == "sigmoid") return Activation::Sigmoid;
    throw ConfigError("unknown activation: " + name);
}

std::string to_string(WeightInit w) {
    switch (w) {
        case WeightInit::GlorotUniform: return "glorot-uniform";
        case WeightInit::GlorotNormal: return "glorot-normal";
        case WeightInit::HeUniform: return "he-uniform";
    }
    return "glorot-uniform";
}

std::string to_string(BiasInit b) {
    return b == BiasInit::Zeros ? "zeros" : "ones";
}

WeightInit weight_init_from_string(const std::string& name) {
    if (name == "glorot-uniform") return WeightInit::GlorotUniform;
    if (name == "glorot-normal") return WeightInit::GlorotNormal;
    if (name == "he-uniform") return WeightInit::HeUniform;
    throw ConfigError("unknown weight init: " + name);
}

BiasInit bias_init_from_string(const std::string& name) {
    if (name == "zeros") return BiasInit::Zeros;
    if (name == "ones") return BiasInit::Ones;
    throw ConfigError("unknown bias init: " + name);
}

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

std::vector<std::size_t> DenseNetwork::dims() const {
    std::vector<std::size_t> d;
    d.reserve(layers.size() + 1);
    d.push_back(input_dim);
    for (const auto& layer : layers) d.push_back(layer.out_dim());
    return d;
}

void NetworkGrads::add(const NetworkGrads& other) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        auto& w = weights[l].data();
        const auto& ow = other.weights[l].data();
        for (std::size_t i = 0; i < w.size(); ++i) w[i] += ow[i];
        for (std::size_t i = 0; i < bias[l].size(); ++i) bias[l][i] += other.bias[l][i];
    }
}

void NetworkGrads::scale(double factor) {
    for (auto& w : weights)
        for (auto& v : w.data()) v *= factor;
    for (auto& b : bias)
        for (auto& v : b) v *= factor;
}

NetworkGrads zero_grads_like(const DenseNetwork& net) {
    NetworkGrads g;
    g.weights.reserve(net.layers.size());
    g.bias.reserve(net.layers.size());
    for (const auto& layer : net.layers) {
        g.weights.emplace_back(layer.out_dim(), layer.in_dim());
        g.bias.emplace_back(layer.out_dim(), 0.0);
    }
    return g;
}

DenseNetwork init_network(const std::vector<std::size_t>& dims,
                          const std::vector<Activation>& activations,
                          const std::vector<double>& dropout_rates,
                          const InitScheme& scheme, std::uint64_t seed) {
    if (dims.size() < 2) throw ConfigError("init_network: dims needs at least input and output width");
    const std::size_t n_layers = dims.size() - 1;
    if (activations.size() != n_layers)
        throw ConfigError("init_network: expected " + std::to_string(n_layers) + " activations, got " +
                          std::to_string(activations.size()));
    if (dropout_rates.size() != n_layers)
        throw ConfigError("init_network: expected " + std::to_string(n_layers) + " dropout rates, got " +
                          std::to_string(dropout_rates.size()));
    for (std::size_t d : dims)
        if (d == 0) throw ConfigError("init_network: zero layer width");
    for (double r : dropout_rates)
        if (r < 0.0 || r >= 1.0) throw ConfigError("init_network: dropout rate must lie in [0, 1)");

    Rng rng(seed);
    DenseNetwork net;
    net.input_dim = dims.front();
    net.layers.reserve(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        const std::size_t fan_in = dims[l];
        const std::size_t fan_out = dims[l + 1];
        DenseLayer layer;
        layer.weights = Matrix(fan_out, fan_in);
        layer.activation = activations[l];
        layer.dropout_rate = dropout_rates[l];
        switch (scheme.weights) {
            case WeightInit::GlorotUniform: {
                double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
                for (auto& w : layer.weights.data()) w = rng.uniform(-limit, limit);
                break;
            }
            case WeightInit::GlorotNormal: {
                double sd = std::sqrt(2.0 / static_cast<double>(fan_in + fan_out));
                for (auto& w : layer.weights.data()) w = sd * rng.normal();
                break;
            }
            case WeightInit::HeUniform: {
                double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
                for (auto& w : layer.weights.data()) w = rng.uniform(-limit, limit);
                break;
            }
        }
        layer.bias.assign(fan_out, scheme.bias == BiasInit::Zeros ? 0.0 : 1.0);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

namespace {

void apply_activation(Activation act, const Vector& pre, Vector& out) {
    out.resize(pre.size());
    switch (act) {
        case Activation::ReLU:
            for (std::size_t i = 0; i < pre.size(); ++i) out[i] = pre[i] > 0.0 ? pre[i] : 0.0;
            break;
        case Activation::Linear:
            out = pre;
            break;
        case Activation::Sigmoid:
            for (std::size_t i = 0; i < pre.size(); ++i) out[i] = sigmoid(pre[i]);
            break;
    }
}

double activation_derivative(Activation act, double pre) {
    switch (act) {
        case Activation::ReLU: return pre > 0.0 ? 1.0 : 0.0;
        case Activation::Linear: return 1.0;
        case Activation::Sigmoid: {
            double s = sigmoid(pre);
            return s * (1.0 - s);
        }
    }
    return 0.0;
}

}  // namespace

std::pair<Vector, ForwardTrace> forward(const DenseNetwork& net, std::span<const double> input,
                                        Mode mode, Rng* rng) {
    if (input.size() != net.input_dim)
        throw ContractError("forward: input length " + std::to_string(input.size()) +
                            " does not match network input_dim " + std::to_string(net.input_dim));
    for (double v : input)
        if (!std::isfinite(v)) throw NumericError("forward: non-finite input");
    if (mode == Mode::Train && rng == nullptr)
        throw ContractError("forward: Train mode requires an rng for dropout masks");

    ForwardTrace trace;
    trace.mode = mode;
    trace.input.assign(input.begin(), input.end());
    trace.pre_activations.resize(net.layers.size());
    trace.outputs.resize(net.layers.size());
    if (mode == Mode::Train) trace.dropout_masks.resize(net.layers.size());

    const Vector* current = &trace.input;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const DenseLayer& layer = net.layers[l];
        Vector& pre = trace.pre_activations[l];
        pre.assign(layer.out_dim(), 0.0);
        for (std::size_t r = 0; r < layer.out_dim(); ++r) {
            const double* wrow = layer.weights.row(r);
            double acc = layer.bias[r];
            for (std::size_t c = 0; c < layer.in_dim(); ++c) acc += wrow[c] * (*current)[c];
            pre[r] = acc;
        }
        Vector& out = trace.outputs[l];
        apply_activation(layer.activation, pre, out);
        if (mode == Mode::Train) {
            Vector& mask = trace.dropout_masks[l];
            mask.assign(out.size(), 1.0);
            if (layer.dropout_rate > 0.0) {
                const double keep_scale = 1.0 / (1.0 - layer.dropout_rate);
                for (std::size_t i = 0; i < out.size(); ++i) {
                    mask[i] = rng->uniform() < layer.dropout_rate ? 0.0 : keep_scale;
                    out[i] *= mask[i];
                }
            }
        }
        current = &out;
    }
    Vector output = net.layers.empty() ? trace.input : trace.outputs.back();
    return {std::move(output), std::move(trace)};
}

Vector evaluate(const DenseNetwork& net, std::span<const double> input) {
    return forward(net, input, Mode::Eval, nullptr).first;
}

BackwardResult backward(const DenseNetwork& net, const ForwardTrace& trace,
                        std::span<const double> upstream_grad) {
    const std::size_t n_layers = net.layers.size();
    if (trace.pre_activations.size() != n_layers || trace.outputs.size() != n_layers)
        throw ContractError("backward: trace does not match network depth");
    if (trace.input.size() != net.input_dim)
        throw ContractError("backward: trace input does not match network input_dim");
    for (std::size_t l = 0; l < n_layers; ++l)
        if (trace.pre_activations[l].size() != net.layers[l].out_dim())
            throw ContractError("backward: trace layer width does not match network");
    if (upstream_grad.size() != net.output_dim())
        throw ContractError("backward: upstream gradient length does not match output_dim");

    BackwardResult result;
    result.param_grads = zero_grads_like(net);

    Vector grad(upstream_grad.begin(), upstream_grad.end());
    for (std::size_t li = n_layers; li-- > 0;) {
        const DenseLayer& layer = net.layers[li];
        // Through dropout: d(out)/d(act) is the stored mask.
        if (trace.mode == Mode::Train && !trace.dropout_masks[li].empty()) {
            const Vector& mask = trace.dropout_masks[li];
            for (std::size_t i = 0; i < grad.size(); ++i) grad[i] *= mask[i];
        }
        // Through the activation.
        const Vector& pre = trace.pre_activations[li];
        for (std::size_t i = 0; i < grad.size(); ++i)
            grad[i] *= activation_derivative(layer.activation, pre[i]);

        const Vector& layer_input = li == 0 ? trace.input : trace.outputs[li - 1];
        Matrix& wgrad = result.param_grads.weights[li];
        Vector& bgrad = result.param_grads.bias[li];
        for (std::size_t r = 0; r < layer.out_dim(); ++r) {
            double g = grad[r];
            bgrad[r] = g;
            double* wrow = wgrad.row(r);
            for (std::size_t c = 0; c < layer.in_dim(); ++c) wrow[c] = g * layer_input[c];
        }

        Vector downstream(layer.in_dim(), 0.0);
        for (std::size_t r = 0; r < layer.out_dim(); ++r) {
            const double g = grad[r];
            const double* wrow = layer.weights.row(r);
            for (std::size_t c = 0; c < layer.in_dim(); ++c) downstream[c] += g * wrow[c];
        }
        grad = std::move(downstream);
    }
    result.input_grad = std::move(grad);
    return result;
}

std::size_t param_count(const DenseNetwork& net) {
    std::size_t n = 0;
    for (const auto& layer : net.layers) n += layer.weights.size() + layer.bias.size();
    return n;
}

void copy_params(const DenseNetwork& net, std::span<double> out) {
    if (out.size() != param_count(net)) throw ContractError("copy_params: size mismatch");
    std::size_t off = 0;
    for (const auto& layer : net.layers) {
        std::memcpy(out.data() + off, layer.weights.data().data(), layer.weights.size() * sizeof(double));
        off += layer.weights.size();
        std::memcpy(out.data() + off, layer.bias.data(), layer.bias.size() * sizeof(double));
        off += layer.bias.size();
    }
}

void set_params(DenseNetwork& net, std::span<const double> in) {
    if (in.size() != param_count(net)) throw ContractError("set_params: size mismatch");
    std::size_t off = 0;
    for (auto& layer : net.layers) {
        std::memcpy(layer.weights.data().data(), in.data() + off, layer.weights.size() * sizeof(double));
        off += layer.weights.size();
        std::memcpy(layer.bias.data(), in.data() + off, layer.bias.size() * sizeof(double));
        off += layer.bias.size();
    }
}

void copy_grads(const NetworkGrads& grads, std::span<double> out) {
    std::size_t total = 0;
    for (std::size_t l = 0; l < grads.weights.size(); ++l)
        total += grads.weights[l].size() + grads.bias[l].size();
    if (out.size() != total) throw ContractError("copy_grads: size mismatch");
    std::size_t off = 0;
    for (std::size_t l = 0; l < grads.weights.size(); ++l) {
        std::memcpy(out.data() + off, grads.weights[l].data().data(),
                    grads.weights[l].size() * sizeof(double));
        off += grads.weights[l].size();
        std::memcpy(out.data() + off, grads.bias[l].data(), grads.bias[l].size() * sizeof(double));
        off += grads.bias[l].size();
    }
}

}  // namespace inner::nn
