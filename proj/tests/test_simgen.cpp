#include <cmath>

#include "doctest.h"
#include "inner/errors.hpp"
#include "inner/report.hpp"
#include "inner/simgen.hpp"

using namespace inner;
using namespace inner::simgen;

TEST_CASE("snr of constant probabilities is zero") {
    Vector p(50, 0.5);
    CHECK(estimate_snr(p) == 0.0);
}

TEST_CASE("snr of the two-point distribution matches hand arithmetic") {
    // Var(P) = 0.16, mean P(1-P) = 0.09 -> 16/9.
    Vector p{0.9, 0.1};
    CHECK(estimate_snr(p) == doctest::Approx(16.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("snr errors on saturated probabilities") {
    Vector p{0.0, 1.0, 1.0, 0.0};
    CHECK_THROWS_AS(estimate_snr(p), DegenerateDataError);
    Vector bad{0.5, 1.5};
    CHECK_THROWS_AS(estimate_snr(bad), ContractError);
}

TEST_CASE("correct-model logits reproduce the formula per row") {
    SimConfig cfg;
    cfg.n_samples = 500;
    cfg.p_signal = 6;
    cfg.p_noise = 0;
    cfg.snr_target = 0.8;
    cfg.scenario = Scenario::CorrectModel;
    cfg.seed = 42;
    const SimDataset ds = generate(cfg);
    REQUIRE(ds.subjects.size() == 500);
    for (std::size_t i = 0; i < ds.subjects.size(); i += 29) {
        const auto& s = ds.subjects[i];
        double za = 0.0, zb = 0.0;
        for (std::size_t j = 0; j < cfg.p_signal; ++j) {
            za += s.covariates[j] * ds.truth.alpha[j];
            zb += s.covariates[j] * ds.truth.beta[j];
        }
        const double logit = ds.truth.scale_c * (std::sin(za) + std::cos(zb) * s.pain);
        CHECK(ds.true_prob[i] == doctest::Approx(nn::sigmoid(logit)).epsilon(1e-12));
    }
}

TEST_CASE("misspecified logits reproduce the formula per row") {
    SimConfig cfg;
    cfg.n_samples = 400;
    cfg.p_signal = 5;
    cfg.p_noise = 3;
    cfg.snr_target = 0.8;
    cfg.scenario = Scenario::Misspecified;
    cfg.seed = 7;
    const SimDataset ds = generate(cfg);
    for (std::size_t i = 0; i < ds.subjects.size(); i += 17) {
        const auto& s = ds.subjects[i];
        double za = 0.0, zb = 0.0;
        for (std::size_t j = 0; j < cfg.p_signal; ++j) {
            za += s.covariates[j] * ds.truth.alpha[j];
            zb += s.covariates[j] * ds.truth.beta[j];
        }
        const double logit = ds.truth.scale_c *
                             (-s.pain * std::sin(za) + std::sqrt(std::abs(std::cos(zb) * s.pain)));
        CHECK(std::abs(logit - std::log(ds.true_prob[i] / (1.0 - ds.true_prob[i]))) < 1e-9);
    }
}

TEST_CASE("zero coefficients give a logit proportional to pain") {
    // sin(0) + cos(0) * x = x.
    Vector z{0.4, -0.2};
    Vector zero{0.0, 0.0};
    CHECK(generator_value(Scenario::CorrectModel, z, zero, zero, 3.5) == doctest::Approx(3.5));
    CHECK(generator_value(Scenario::CorrectModel, z, zero, zero, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("noise covariates never enter the truth") {
    SimConfig cfg;
    cfg.n_samples = 300;
    cfg.p_signal = 4;
    cfg.p_noise = 4;
    cfg.snr_target = 0.8;
    cfg.seed = 9;
    const SimDataset ds = generate(cfg);
    // Recompute true probabilities with noise columns permuted; unchanged.
    for (std::size_t i = 0; i < ds.subjects.size(); ++i) {
        auto scrambled = ds.subjects[i].covariates;
        std::swap(scrambled[4], scrambled[7]);
        scrambled[5] = -scrambled[5];
        const std::span<const double> z_signal(scrambled.data(), cfg.p_signal);
        const double logit = ds.truth.scale_c * generator_value(cfg.scenario, z_signal,
                                                                ds.truth.alpha, ds.truth.beta,
                                                                ds.subjects[i].pain);
        CHECK(ds.true_prob[i] == doctest::Approx(nn::sigmoid(logit)).epsilon(1e-14));
    }
}

TEST_CASE("labels track the true probabilities") {
    SimConfig cfg;
    cfg.n_samples = 20000;
    cfg.p_signal = 8;
    cfg.snr_target = 0.8;
    cfg.seed = 13;
    const SimDataset ds = generate(cfg);
    double mean_y = 0.0, mean_p = 0.0, var_y = 0.0;
    for (std::size_t i = 0; i < ds.subjects.size(); ++i) {
        mean_y += static_cast<double>(*ds.subjects[i].label);
        mean_p += ds.true_prob[i];
    }
    mean_y /= static_cast<double>(cfg.n_samples);
    mean_p /= static_cast<double>(cfg.n_samples);
    for (std::size_t i = 0; i < ds.subjects.size(); ++i)
        var_y += (static_cast<double>(*ds.subjects[i].label) - mean_y) *
                 (static_cast<double>(*ds.subjects[i].label) - mean_y);
    var_y /= static_cast<double>(cfg.n_samples);
    const double tolerance = 3.0 * std::sqrt(var_y / static_cast<double>(cfg.n_samples));
    CHECK(std::abs(mean_y - mean_p) < tolerance);
}

TEST_CASE("generation is deterministic per seed") {
    SimConfig cfg;
    cfg.n_samples = 250;
    cfg.p_signal = 3;
    cfg.snr_target = 0.5;
    cfg.seed = 77;
    const SimDataset a = generate(cfg);
    const SimDataset b = generate(cfg);
    CHECK(report::dataset_csv(a.subjects) == report::dataset_csv(b.subjects));
    CHECK(a.truth.scale_c == b.truth.scale_c);
    cfg.seed = 78;
    const SimDataset c = generate(cfg);
    CHECK(report::dataset_csv(a.subjects) != report::dataset_csv(c.subjects));
}

TEST_CASE("calibration hits small targets near the low bracket edge") {
    SimConfig cfg;
    cfg.p_signal = 4;
    cfg.snr_target = 1e-3;
    cfg.seed = 5;
    cfg.n_samples = 1000;
    Rng rng(2);
    Vector alpha(4), beta(4);
    for (auto& v : alpha) v = rng.uniform();
    for (auto& v : beta) v = rng.uniform();
    const double c = calibrate_scale(cfg, alpha, beta, 20000);
    CHECK(c < 0.1);
}

TEST_CASE("calibrated scale is monotone in the target") {
    SimConfig cfg;
    cfg.p_signal = 6;
    cfg.seed = 11;
    cfg.n_samples = 1000;
    Rng rng(3);
    Vector alpha(6), beta(6);
    for (auto& v : alpha) v = rng.uniform();
    for (auto& v : beta) v = rng.uniform();
    double prev = 0.0;
    for (double target : {0.2, 0.8, 3.2}) {
        cfg.snr_target = target;
        const double c = calibrate_scale(cfg, alpha, beta, 20000);
        CHECK(c > prev);
        prev = c;
    }
}

TEST_CASE("unreachable calibration targets raise a calibration error") {
    SimConfig cfg;
    cfg.p_signal = 2;
    cfg.snr_target = 1e9;
    cfg.seed = 1;
    cfg.n_samples = 1000;
    Vector alpha{0.5, 0.5}, beta{0.5, 0.5};
    CHECK_THROWS_AS(calibrate_scale(cfg, alpha, beta, 2000), CalibrationError);
}

TEST_CASE("achieved snr lands close to the requested target") {
    for (double target : {0.2, 3.2}) {
        SimConfig cfg;
        cfg.n_samples = 40000;
        cfg.p_signal = 8;
        cfg.snr_target = target;
        cfg.seed = 100 + static_cast<std::uint64_t>(target * 10);
        const SimDataset ds = generate(cfg);
        CHECK(std::abs(ds.truth.achieved_snr - target) / target < 0.05);
    }
}

TEST_CASE("experiment grid expands the axes with defaults") {
    ExperimentAxes snr_axis;
    snr_axis.snr_targets = {0.2, 0.8, 3.2};
    auto grid = experiment_grid(snr_axis);
    REQUIRE(grid.size() == 3);
    for (const auto& cfg : grid) {
        CHECK(cfg.n_samples == 40000);
        CHECK(cfg.p_signal == 16);
        CHECK(cfg.p_noise == 0);
    }
    CHECK(grid[0].seed != grid[1].seed);

    ExperimentAxes noise_axis;
    noise_axis.noise_counts = {8, 12, 16};
    auto noise_grid = experiment_grid(noise_axis);
    REQUIRE(noise_grid.size() == 3);
    for (const auto& cfg : noise_grid) CHECK(cfg.snr_target == 3.2);

    ExperimentAxes empty;
    empty.snr_targets = {};
    CHECK(experiment_grid(empty).empty());
}

TEST_CASE("generate validates its configuration") {
    SimConfig cfg;
    cfg.n_samples = 50;  // below the Monte Carlo floor
    cfg.p_signal = 4;
    cfg.snr_target = 1.0;
    CHECK_THROWS_AS(generate(cfg), ConfigError);
    cfg.n_samples = 500;
    cfg.p_signal = 0;
    CHECK_THROWS_AS(generate(cfg), ConfigError);
    cfg.p_signal = 4;
    cfg.snr_target = -1.0;
    CHECK_THROWS_AS(generate(cfg), ConfigError);
}
