#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "inner/model.hpp"

namespace inner::simgen {

enum class Scenario { CorrectModel, Misspecified };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& name);

struct SimConfig {
    std::size_t n_samples = 0;
    std::size_t p_signal = 0;
    std::size_t p_noise = 0;
    double snr_target = 1.0;
    Scenario scenario = Scenario::CorrectModel;
    std::uint64_t seed = 0;
};

// Ground truth behind a generated cohort: the coefficient vectors of the
// varying-coefficient generator, the calibrated logit scale, and the Monte
// Carlo signal-to-noise ratio achieved on the cohort itself.
struct SimTruth {
    Vector alpha;
    Vector beta;
    double scale_c = 1.0;
    double achieved_snr = 0.0;
};

struct SimDataset {
    SimConfig config;
    std::vector<Subject> subjects;
    Vector true_prob;
    SimTruth truth;
};

// Raw generator value g(z, x) before scaling, over the signal covariates
// only. CorrectModel: sin(z.a) + cos(z.b) * x. Misspecified:
// -x * sin(z.a) + sqrt(|cos(z.b) * x|).
double generator_value(Scenario scenario, std::span<const double> z_signal,
                       std::span<const double> alpha, std::span<const double> beta, double x);

// Var(P) / mean(P(1-P)): the variance of the true conditional probability
// over the residual Bernoulli variance, with 1/n-normalized variance.
double estimate_snr(std::span<const double> true_prob);

// Bisection on the logit scale c over [1e-4, 1e4] so the Monte Carlo SNR on
// a fresh calibration sample lands within 2% of the target. SNR grows with c
// for these generators, which makes the bracket valid.
double calibrate_scale(const SimConfig& cfg, std::span<const double> alpha,
                       std::span<const double> beta, std::size_t calib_sample_size = 40000);

// Draws the cohort: covariates iid standard normal (signal then noise
// columns), pain uniform on (0, 10), labels Bernoulli(sigmoid(c * g)).
SimDataset generate(const SimConfig& cfg);

// Axes for a simulation experiment table; expanded as a Cartesian product
// with one derived seed per cell. An empty axis yields an empty grid.
struct ExperimentAxes {
    std::vector<double> snr_targets{3.2};
    std::vector<std::size_t> noise_counts{0};
    // (number of signal covariates, sample size) cells.
    std::vector<std::pair<std::size_t, std::size_t>> size_cells{{16, 40000}};
    Scenario scenario = Scenario::CorrectModel;
    std::uint64_t seed = 0;
};

std::vector<SimConfig> experiment_grid(const ExperimentAxes& axes);

}  // namespace inner::simgen
