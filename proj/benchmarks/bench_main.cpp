// Micro benchmarks for the hot paths: forward evaluation, batch gradients,
// a full training epoch, the rank-sum c-statistic and the local-fdr fit.
// Hand-rolled timing harness; run with an optional repetition multiplier:
//   inner_benchmarks [multiplier]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "inner/metrics.hpp"
#include "inner/model.hpp"
#include "inner/optim.hpp"
#include "inner/simgen.hpp"
#include "inner/subgroup.hpp"

using namespace inner;
using Clock = std::chrono::steady_clock;

namespace {

volatile double g_sink = 0.0;

template <typename F>
void bench(const char* name, std::size_t iterations, F body) {
    // One warmup pass, then the timed loop.
    body();
    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < iterations; ++i) body();
    const double total = std::chrono::duration<double>(Clock::now() - t0).count();
    const double per_iter = total / static_cast<double>(iterations);
    const char* unit = "s";
    double value = per_iter;
    if (value < 1e-3) {
        value *= 1e6;
        unit = "us";
    } else if (value < 1.0) {
        value *= 1e3;
        unit = "ms";
    }
    std::printf("%-36s %8zu iters   %10.2f %s/iter\n", name, iterations, value, unit);
    std::fflush(stdout);
}

std::vector<Subject> make_cohort(std::size_t n, std::size_t p, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Subject> cohort(n);
    for (auto& s : cohort) {
        s.covariates.resize(p);
        for (auto& v : s.covariates) v = rng.normal();
        s.pain = rng.uniform(0.0, 10.0);
        s.label = rng.below(2) == 0 ? 0 : 1;
    }
    return cohort;
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t mult = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;

    const auto model = init_inner_model(
        {16, 250, 125, 1},
        {nn::Activation::ReLU, nn::Activation::ReLU, nn::Activation::Linear}, {0.0, 0.0, 0.0},
        {}, 1);
    const auto small_model = init_inner_model(
        {16, 32, 16, 1}, {nn::Activation::ReLU, nn::Activation::ReLU, nn::Activation::Linear},
        {0.0, 0.0, 0.0}, {}, 1);
    const auto cohort = make_cohort(4096, 16, 2);

    bench("predict, 250x125 nets", 2000 * mult, [&] {
        g_sink = predict(model, cohort[0]);
    });
    bench("predict, 32x16 nets", 20000 * mult, [&] {
        g_sink = predict(small_model, cohort[0]);
    });

    const std::vector<Subject> batch(cohort.begin(), cohort.begin() + 64);
    bench("batch gradients (64), 250x125", 50 * mult, [&] {
        g_sink = flatten_grads(model, batch_gradients(model, batch))[0];
    });
    bench("batch gradients (64), 32x16", 500 * mult, [&] {
        g_sink = flatten_grads(small_model, batch_gradients(small_model, batch))[0];
    });

    bench("training epoch, n=4096, 32x16", 5 * mult, [&] {
        optim::TrainConfig cfg;
        cfg.optimizer = optim::Optimizer::Adam;
        cfg.learning_rate = 0.01;
        cfg.batch_size = 64;
        cfg.max_epochs = 1;
        cfg.gap_delta = 1e9;
        auto result = optim::train(small_model, cohort, batch, cfg);
        g_sink = result.log.epochs.back().train_loss;
    });

    {
        Rng rng(3);
        Vector scores(200000);
        std::vector<int> labels(scores.size());
        for (std::size_t i = 0; i < scores.size(); ++i) {
            scores[i] = rng.uniform();
            labels[i] = rng.below(2) == 0 ? 0 : 1;
        }
        bench("c-statistic, n=200k", 20 * mult, [&] {
            g_sink = metrics::c_statistic(scores, labels);
        });
    }

    {
        Rng rng(4);
        Vector z(10000);
        for (auto& v : z) v = rng.normal();
        bench("local-fdr fit, n=10k", 20 * mult, [&] {
            g_sink = subgroup::fit_lfdr(z).null_sd();
        });
    }

    {
        simgen::SimConfig cfg{40000, 16, 0, 3.2, simgen::Scenario::CorrectModel, 5};
        bench("generate cohort, n=40k p=16", 3 * mult, [&] {
            g_sink = simgen::generate(cfg).truth.achieved_snr;
        });
    }
    return 0;
}
