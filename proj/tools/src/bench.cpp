#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "inner/dataio.hpp"
#include "inner/errors.hpp"
#include "inner/metrics.hpp"
#include "inner_cli/cli.hpp"

namespace inner::cli {

InnerModel ArchSpec::build(std::size_t input_dim, std::uint64_t seed) const {
    std::vector<std::size_t> dims{input_dim};
    dims.insert(dims.end(), layer_widths.begin(), layer_widths.end());
    std::vector<nn::Activation> acts(layer_widths.size(), nn::Activation::ReLU);
    acts.back() = nn::Activation::Linear;
    std::vector<double> rates = dropout_rates;
    if (rates.empty()) rates.assign(layer_widths.size(), 0.0);
    return init_inner_model(dims, acts, rates, init, seed);
}

namespace {

std::vector<double> parse_double_list(const std::string& csv, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("cannot parse " + what + " entry '" + item + "'");
        }
    }
    return out;
}

}  // namespace

ArchSpec parse_arch(const std::string& widths_csv, const std::string& dropout_csv,
                    const std::string& weight_init, const std::string& bias_init) {
    ArchSpec spec;
    spec.layer_widths.clear();
    for (double w : parse_double_list(widths_csv, "architecture")) {
        if (w < 1.0 || w != static_cast<double>(static_cast<std::size_t>(w)))
            throw ConfigError("architecture widths must be positive integers");
        spec.layer_widths.push_back(static_cast<std::size_t>(w));
    }
    if (spec.layer_widths.empty() || spec.layer_widths.back() != 1)
        throw ConfigError("architecture must end in a single output unit, e.g. 250,125,1");
    if (!dropout_csv.empty()) {
        spec.dropout_rates = parse_double_list(dropout_csv, "dropout");
        if (spec.dropout_rates.size() != spec.layer_widths.size())
            throw ConfigError("need one dropout rate per layer");
    }
    spec.init.weights = nn::weight_init_from_string(weight_init);
    spec.init.bias = nn::bias_init_from_string(bias_init);
    return spec;
}

CellRun run_cell_once(const simgen::SimConfig& cell, std::uint64_t replication,
                      const BenchmarkOptions& options) {
    simgen::SimConfig cfg = cell;
    cfg.seed = derive_seed(cell.seed, "replication", replication);
    const simgen::SimDataset ds = simgen::generate(cfg);
    auto [train_set, test_set] =
        dataio::split_rows(ds.subjects, options.split_fraction, derive_seed(cfg.seed, "bench:split"));

    std::vector<int> labels;
    labels.reserve(test_set.size());
    for (const auto& s : test_set) labels.push_back(*s.label);
    std::vector<double> scores(test_set.size());

    CellRun run;
    const std::size_t p_total = cfg.p_signal + cfg.p_noise;
    {
        optim::TrainConfig tc = options.train;
        tc.seed = derive_seed(cfg.seed, "bench:baseline");
        auto fitted = optim::train(make_logistic_baseline(p_total), train_set, test_set, tc);
        for (std::size_t i = 0; i < test_set.size(); ++i)
            scores[i] = predict(fitted.model, test_set[i]);
        run.baseline_c_statistic = metrics::c_statistic(scores, labels);
    }
    if (options.include_model) {
        optim::TrainConfig tc = options.train;
        tc.seed = derive_seed(cfg.seed, "bench:model");
        InnerModel model = options.arch.build(p_total, derive_seed(cfg.seed, "bench:init"));
        auto fitted = optim::train(model, train_set, test_set, tc);
        for (std::size_t i = 0; i < test_set.size(); ++i)
            scores[i] = predict(fitted.model, test_set[i]);
        run.model_c_statistic = metrics::c_statistic(scores, labels);
    }
    return run;
}

std::vector<report::BenchmarkCell> run_benchmark(const BenchmarkOptions& options) {
    if (options.repetitions < 2)
        throw ConfigError("benchmark needs at least two repetitions for standard errors");
    const std::vector<simgen::SimConfig> cells = simgen::experiment_grid(options.axes);

    struct Job {
        std::size_t cell;
        std::uint64_t rep;
    };
    std::vector<Job> jobs;
    for (std::size_t c = 0; c < cells.size(); ++c)
        for (std::uint64_t r = 0; r < options.repetitions; ++r) jobs.push_back({c, r});

    struct JobResult {
        CellRun run;
        bool failed = false;
        std::string error;
    };
    std::vector<JobResult> results(jobs.size());

    // Workers pull jobs off a shared counter; every job owns its seeds, so
    // the result set does not depend on scheduling.
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t j = next.fetch_add(1);
            if (j >= jobs.size()) return;
            try {
                results[j].run = run_cell_once(cells[jobs[j].cell], jobs[j].rep, options);
            } catch (const std::exception& e) {
                results[j].failed = true;
                results[j].error = e.what();
            }
        }
    };
    const std::size_t n_threads = std::max<std::size_t>(1, options.threads);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::vector<report::BenchmarkCell> table(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        report::BenchmarkCell& cell = table[c];
        cell.config = cells[c];
        cell.repetitions = options.repetitions;
        std::vector<double> model_c, baseline_c;
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            if (jobs[j].cell != c) continue;
            if (results[j].failed) {
                cell.failed = true;
                if (cell.failure.empty()) cell.failure = results[j].error;
                continue;
            }
            model_c.push_back(results[j].run.model_c_statistic);
            baseline_c.push_back(results[j].run.baseline_c_statistic);
        }
        if (cell.failed || model_c.size() < 2) {
            cell.failed = true;
            if (cell.failure.empty()) cell.failure = "insufficient successful replications";
            continue;
        }
        auto summarize = [](const std::vector<double>& v) {
            double mean = 0.0;
            for (double x : v) mean += x;
            mean /= static_cast<double>(v.size());
            double ss = 0.0;
            for (double x : v) ss += (x - mean) * (x - mean);
            const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
            return metrics::MetricSummary{mean, sd / std::sqrt(static_cast<double>(v.size()))};
        };
        cell.model_c_statistic = summarize(model_c);
        cell.baseline_c_statistic = summarize(baseline_c);
    }
    return table;
}

}  // namespace inner::cli
