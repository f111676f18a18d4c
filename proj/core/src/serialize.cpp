#include "inner/serialize.hpp"

#include <fstream>
#include <sstream>

#include "inner/errors.hpp"
#include "json.hpp"

namespace inner::serialize {

using nlohmann::json;

namespace {

json network_to_json_obj(const nn::DenseNetwork& net) {
    json j;
    j["dims"] = net.dims();
    std::vector<std::string> acts;
    std::vector<double> rates;
    for (const auto& layer : net.layers) {
        acts.push_back(nn::to_string(layer.activation));
        rates.push_back(layer.dropout_rate);
    }
    j["activations"] = acts;
    j["dropout_rates"] = rates;
    json layers = json::array();
    for (const auto& layer : net.layers) {
        json jl;
        jl["weights"] = layer.weights.data();
        jl["bias"] = layer.bias;
        layers.push_back(std::move(jl));
    }
    j["layers"] = std::move(layers);
    return j;
}

nn::DenseNetwork network_from_json_obj(const json& j) {
    const auto dims = j.at("dims").get<std::vector<std::size_t>>();
    const auto act_names = j.at("activations").get<std::vector<std::string>>();
    const auto rates = j.at("dropout_rates").get<std::vector<double>>();
    if (dims.size() < 2 || act_names.size() != dims.size() - 1 || rates.size() != dims.size() - 1)
        throw ValidationError("network json: inconsistent architecture arrays");

    nn::DenseNetwork net;
    net.input_dim = dims.front();
    const json& layers = j.at("layers");
    if (layers.size() != dims.size() - 1)
        throw ValidationError("network json: layer count does not match dims");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        nn::DenseLayer layer;
        layer.activation = nn::activation_from_string(act_names[l]);
        layer.dropout_rate = rates[l];
        layer.weights = Matrix(dims[l + 1], dims[l]);
        auto w = layers[l].at("weights").get<std::vector<double>>();
        if (w.size() != layer.weights.size())
            throw ValidationError("network json: weight array size mismatch");
        layer.weights.data() = std::move(w);
        layer.bias = layers[l].at("bias").get<std::vector<double>>();
        if (layer.bias.size() != dims[l + 1])
            throw ValidationError("network json: bias array size mismatch");
        net.layers.push_back(std::move(layer));
    }
    return net;
}

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("json parse error: ") + e.what());
    }
}

// Missing keys and wrong value types surface as validation errors.
template <typename F>
auto guarded(F f) -> decltype(f()) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("json structure error: ") + e.what());
    }
}

}  // namespace

std::string network_to_json(const nn::DenseNetwork& net) {
    return network_to_json_obj(net).dump(2);
}

nn::DenseNetwork network_from_json(const std::string& json_text) {
    return guarded([&] { return network_from_json_obj(parse(json_text)); });
}

std::string model_to_json(const InnerModel& model, const std::string& covariate_schema_hash) {
    json j;
    json arch;
    arch["dims"] = model.net_alpha.dims();
    std::vector<std::string> acts;
    std::vector<double> rates;
    for (const auto& layer : model.net_alpha.layers) {
        acts.push_back(nn::to_string(layer.activation));
        rates.push_back(layer.dropout_rate);
    }
    arch["activations"] = acts;
    arch["dropout_rates"] = rates;
    j["architecture"] = std::move(arch);
    j["net_alpha"] = network_to_json_obj(model.net_alpha);
    j["net_beta"] = network_to_json_obj(model.net_beta);
    j["covariate_schema_hash"] = covariate_schema_hash;
    return j.dump(2);
}

ModelEnvelope model_from_json(const std::string& json_text) {
    return guarded([&] {
    const json j = parse(json_text);
    ModelEnvelope env;
    env.model.net_alpha = network_from_json_obj(j.at("net_alpha"));
    env.model.net_beta = network_from_json_obj(j.at("net_beta"));
    env.covariate_schema_hash = j.at("covariate_schema_hash").get<std::string>();
    validate_inner_architecture(env.model);
    return env;
    });
}

std::string ensemble_to_json(const dataio::BalancedEnsemble& ensemble,
                             const std::string& covariate_schema_hash) {
    json j;
    json models = json::array();
    for (const auto& model : ensemble.models) {
        json jm;
        jm["net_alpha"] = network_to_json_obj(model.net_alpha);
        jm["net_beta"] = network_to_json_obj(model.net_beta);
        models.push_back(std::move(jm));
    }
    j["models"] = std::move(models);
    j["subsample_indices"] = ensemble.subsample_indices;
    j["covariate_schema_hash"] = covariate_schema_hash;
    return j.dump(2);
}

dataio::BalancedEnsemble ensemble_from_json(const std::string& json_text,
                                            std::string* covariate_schema_hash) {
    return guarded([&] {
    const json j = parse(json_text);
    dataio::BalancedEnsemble ensemble;
    for (const auto& jm : j.at("models")) {
        InnerModel model;
        model.net_alpha = network_from_json_obj(jm.at("net_alpha"));
        model.net_beta = network_from_json_obj(jm.at("net_beta"));
        validate_inner_architecture(model);
        ensemble.models.push_back(std::move(model));
    }
    if (j.contains("subsample_indices"))
        ensemble.subsample_indices =
            j.at("subsample_indices").get<std::vector<std::vector<std::size_t>>>();
    if (covariate_schema_hash)
        *covariate_schema_hash = j.at("covariate_schema_hash").get<std::string>();
    return ensemble;
    });
}

std::string schema_to_json(const dataio::CovariateSchema& schema) {
    json j;
    json covs = json::array();
    for (const auto& spec : schema.covariates) {
        json jc;
        jc["name"] = spec.name;
        jc["kind"] = spec.kind == dataio::CovariateKind::Continuous ? "continuous" : "categorical";
        if (!spec.levels.empty()) jc["levels"] = spec.levels;
        covs.push_back(std::move(jc));
    }
    j["covariates"] = std::move(covs);
    j["pain_column"] = schema.pain_column;
    j["label_column"] = schema.label_column;
    return j.dump(2);
}

dataio::CovariateSchema schema_from_json(const std::string& json_text) {
    return guarded([&] {
    const json j = parse(json_text);
    dataio::CovariateSchema schema;
    schema.pain_column = j.at("pain_column").get<std::string>();
    schema.label_column = j.at("label_column").get<std::string>();
    for (const auto& jc : j.at("covariates")) {
        dataio::CovariateSpec spec;
        spec.name = jc.at("name").get<std::string>();
        const std::string kind = jc.at("kind").get<std::string>();
        if (kind == "continuous")
            spec.kind = dataio::CovariateKind::Continuous;
        else if (kind == "categorical")
            spec.kind = dataio::CovariateKind::Categorical;
        else
            throw ValidationError("schema json: unknown covariate kind " + kind);
        if (jc.contains("levels")) spec.levels = jc.at("levels").get<std::vector<std::string>>();
        schema.covariates.push_back(std::move(spec));
    }
    schema.validate();
    return schema;
    });
}

std::string transform_to_json(const dataio::FittedTransform& transform) {
    json j;
    j["schema"] = json::parse(schema_to_json(transform.schema));
    j["column_names"] = transform.column_names;
    json cont = json::array();
    for (const auto& ct : transform.continuous) {
        cont.push_back({{"impute_value", ct.impute_value},
                        {"center", ct.center},
                        {"scale", ct.scale}});
    }
    j["continuous"] = std::move(cont);
    json cats = json::array();
    for (const auto& ct : transform.categorical) {
        cats.push_back({{"impute_level", ct.impute_level}, {"levels", ct.levels}});
    }
    j["categorical"] = std::move(cats);
    return j.dump(2);
}

dataio::FittedTransform transform_from_json(const std::string& json_text) {
    return guarded([&] {
    const json j = parse(json_text);
    dataio::FittedTransform t;
    t.schema = schema_from_json(j.at("schema").dump());
    t.column_names = j.at("column_names").get<std::vector<std::string>>();
    for (const auto& jc : j.at("continuous")) {
        dataio::ContinuousTransform ct;
        ct.impute_value = jc.at("impute_value").get<double>();
        ct.center = jc.at("center").get<double>();
        ct.scale = jc.at("scale").get<double>();
        t.continuous.push_back(ct);
    }
    for (const auto& jc : j.at("categorical")) {
        dataio::CategoricalTransform ct;
        ct.impute_level = jc.at("impute_level").get<std::string>();
        ct.levels = jc.at("levels").get<std::vector<std::string>>();
        t.categorical.push_back(std::move(ct));
    }
    if (t.continuous.size() != t.schema.covariates.size() ||
        t.categorical.size() != t.schema.covariates.size())
        throw ValidationError("transform json: per-covariate arrays do not match schema");
    return t;
    });
}

namespace {

json metric_report_obj(const metrics::MetricReport& r) {
    return {{"c_statistic", r.c_statistic},
            {"accuracy", r.accuracy},
            {"sensitivity", r.sensitivity},
            {"specificity", r.specificity},
            {"balance_accuracy", r.balance_accuracy},
            {"threshold", r.threshold},
            {"n_pos", r.n_pos},
            {"n_neg", r.n_neg}};
}

}  // namespace

std::string metric_report_to_json(const metrics::MetricReport& report) {
    return metric_report_obj(report).dump(2);
}

std::string aggregate_report_to_json(const metrics::AggregateReport& report) {
    auto summary = [](const metrics::MetricSummary& s) {
        return json{{"mean", s.mean}, {"se", s.standard_error}};
    };
    json j{{"c_statistic", summary(report.c_statistic)},
           {"accuracy", summary(report.accuracy)},
           {"sensitivity", summary(report.sensitivity)},
           {"specificity", summary(report.specificity)},
           {"balance_accuracy", summary(report.balance_accuracy)},
           {"threshold", report.threshold},
           {"repetitions", report.repetitions}};
    return j.dump(2);
}

std::string sim_truth_to_json(const simgen::SimDataset& dataset) {
    json j;
    j["scenario"] = simgen::to_string(dataset.config.scenario);
    j["n_samples"] = dataset.config.n_samples;
    j["p_signal"] = dataset.config.p_signal;
    j["p_noise"] = dataset.config.p_noise;
    j["snr_target"] = dataset.config.snr_target;
    j["seed"] = dataset.config.seed;
    j["alpha"] = dataset.truth.alpha;
    j["beta"] = dataset.truth.beta;
    j["scale_c"] = dataset.truth.scale_c;
    j["achieved_snr"] = dataset.truth.achieved_snr;
    return j.dump(2);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << contents;
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace inner::serialize
