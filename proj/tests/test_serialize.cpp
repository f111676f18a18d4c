#include <cmath>
#include <cstring>
#include <limits>

#include "doctest.h"
#include "inner/errors.hpp"
#include "inner/metrics.hpp"
#include "inner/report.hpp"
#include "inner/serialize.hpp"
#include "json.hpp"

using namespace inner;
using nn::Activation;

TEST_CASE("network json round trip is bit exact") {
    auto net = nn::init_network({4, 8, 1}, {Activation::ReLU, Activation::Linear}, {0.25, 0.0},
                                {}, 31);
    // Salt the parameters with awkward magnitudes.
    net.layers[0].weights(0, 0) = 1e-308;
    net.layers[0].weights(0, 1) = -3.141592653589793e200;
    net.layers[0].weights(0, 2) = 5e-324;  // subnormal
    net.layers[0].bias[3] = 0.1;           // not exactly representable

    auto text = serialize::network_to_json(net);
    auto back = serialize::network_from_json(text);
    REQUIRE(back.layers.size() == net.layers.size());
    CHECK(back.input_dim == net.input_dim);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        CHECK(back.layers[l].weights.data() == net.layers[l].weights.data());
        CHECK(back.layers[l].bias == net.layers[l].bias);
        CHECK(back.layers[l].activation == net.layers[l].activation);
        CHECK(back.layers[l].dropout_rate == net.layers[l].dropout_rate);
    }
}

TEST_CASE("random finite doubles survive the json round trip") {
    Rng rng(71);
    auto net = nn::init_network({16, 16, 1}, {Activation::Sigmoid, Activation::Linear},
                                {0.0, 0.0}, {}, 1);
    for (auto& w : net.layers[0].weights.data()) {
        // Random bit patterns filtered to finite values.
        double v;
        do {
            const std::uint64_t bits = rng.next_u64();
            static_assert(sizeof bits == sizeof v);
            std::memcpy(&v, &bits, sizeof v);
        } while (!std::isfinite(v));
        w = v;
    }
    auto back = serialize::network_from_json(serialize::network_to_json(net));
    CHECK(back.layers[0].weights.data() == net.layers[0].weights.data());
}

TEST_CASE("model envelope carries both networks and the schema hash") {
    auto model = init_inner_model({3, 5, 1}, {Activation::ReLU, Activation::Linear}, {0.0, 0.0},
                                  {}, 12);
    auto text = serialize::model_to_json(model, "abc123");
    auto env = serialize::model_from_json(text);
    CHECK(env.covariate_schema_hash == "abc123");
    CHECK(get_params(env.model) == get_params(model));

    Subject s{3.0, {0.1, -0.4, 1.2}, std::nullopt};
    CHECK(predict(env.model, s) == predict(model, s));
}

TEST_CASE("ensemble json round trip") {
    dataio::BalancedEnsemble ensemble;
    ensemble.models.push_back(make_logistic_baseline(2));
    ensemble.models.push_back(make_logistic_baseline(2));
    ensemble.models[0].net_alpha.layers[0].bias[0] = 0.5;
    ensemble.subsample_indices = {{0, 1, 2}, {1, 2, 3}};
    auto text = serialize::ensemble_to_json(ensemble, "h1");
    std::string hash;
    auto back = serialize::ensemble_from_json(text, &hash);
    CHECK(hash == "h1");
    REQUIRE(back.models.size() == 2);
    CHECK(get_params(back.models[0]) == get_params(ensemble.models[0]));
    CHECK(back.subsample_indices == ensemble.subsample_indices);
}

TEST_CASE("transform json round trip") {
    dataio::CovariateSchema schema;
    schema.pain_column = "x";
    schema.label_column = "y";
    schema.covariates = {{"age", dataio::CovariateKind::Continuous, {}},
                         {"site", dataio::CovariateKind::Categorical, {}}};
    dataio::FittedTransform t;
    t.schema = schema;
    t.continuous.resize(2);
    t.categorical.resize(2);
    t.continuous[0] = {52.3, 52.3, 16.119999999999997};
    t.categorical[1] = {"A", {"A", "B", "C"}};
    t.column_names = {"age", "site=B", "site=C"};
    auto back = serialize::transform_from_json(serialize::transform_to_json(t));
    CHECK(back.continuous[0].scale == t.continuous[0].scale);
    CHECK(back.categorical[1].levels == t.categorical[1].levels);
    CHECK(back.column_names == t.column_names);
}

TEST_CASE("malformed json raises a validation error") {
    CHECK_THROWS_AS(serialize::network_from_json("{not json"), ValidationError);
    CHECK_THROWS_AS(serialize::network_from_json("{\"dims\": [2]}"), ValidationError);
}

TEST_CASE("format_double round trips through parsing") {
    Rng rng(72);
    for (int i = 0; i < 200; ++i) {
        double v;
        do {
            const std::uint64_t bits = rng.next_u64();
            std::memcpy(&v, &bits, sizeof v);
        } while (!std::isfinite(v));
        const std::string s = report::format_double(v);
        CHECK(std::stod(s) == v);
    }
}

TEST_CASE("mean-se formatting uses two and four decimals") {
    metrics::MetricSummary s{0.9612, 0.00031};
    CHECK(report::format_mean_se(s) == "0.96 (0.0003)");
}

TEST_CASE("aggregate report renders as json and an aligned table") {
    metrics::MetricReport a, b;
    a.c_statistic = 0.78;
    b.c_statistic = 0.76;
    a.accuracy = b.accuracy = 0.72;
    a.sensitivity = b.sensitivity = 0.69;
    a.specificity = b.specificity = 0.73;
    a.balance_accuracy = b.balance_accuracy = 0.71;
    std::vector<metrics::MetricReport> reports{a, b};
    const auto agg = metrics::aggregate(reports);

    const std::string text = report::aggregate_table_text(agg);
    CHECK(text.find("c_statistic") != std::string::npos);
    CHECK(text.find("0.77 (0.0100)") != std::string::npos);

    const auto j = nlohmann::json::parse(serialize::aggregate_report_to_json(agg));
    CHECK(j.at("c_statistic").at("mean").get<double>() == doctest::Approx(0.77));
    CHECK(j.at("repetitions").get<std::size_t>() == 2);
}
