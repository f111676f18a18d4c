#include "inner_cli/cli.hpp"

#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "inner/errors.hpp"
#include "inner/serialize.hpp"
#include "json.hpp"

namespace inner::cli {

namespace {

// Expands --config file.json into equivalent command-line tokens appended
// after the user's flags; with take-last semantics the file overrides them.
std::vector<std::string> apply_config_file(const std::vector<std::string>& args) {
    std::string config_path;
    std::vector<std::string> out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw ConfigError("--config expects a file path");
            config_path = args[++i];
        } else if (args[i].starts_with("--config=")) {
            config_path = args[i].substr(9);
        } else {
            out.push_back(args[i]);
        }
    }
    if (config_path.empty()) return out;

    const auto j = nlohmann::json::parse(serialize::read_file(config_path), nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw ValidationError(config_path + ": config must be a json object");
    const nlohmann::json& flags = j.contains("flags") ? j.at("flags") : j;
    for (const auto& [key, value] : flags.items()) {
        if (key == "out" || key == "config") continue;  // never redirect output via config
        if (value.is_boolean()) {
            if (value.get<bool>()) out.push_back("--" + key);
        } else if (value.is_string()) {
            if (!value.get<std::string>().empty()) {
                out.push_back("--" + key);
                out.push_back(value.get<std::string>());
            }
        } else if (value.is_number() || value.is_number_integer()) {
            out.push_back("--" + key);
            out.push_back(value.dump());
        }
    }
    return out;
}

void add_common(CLI::App* cmd, CommonOptions& common) {
    cmd->add_option("--seed", common.seed, "Global seed for all derived random streams");
    cmd->add_option("--out", common.out_dir, "Output directory (created if missing)");
    cmd->add_option("--threads", common.threads, "Worker threads for independent jobs");
    // Consumed before parsing; registered here so it shows in --help.
    cmd->add_option_function<std::string>(
        "--config", [](const std::string&) {},
        "JSON file of flag values; entries override command-line flags");
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Varying-coefficient logistic regression with neural-network coefficients"};
    app.require_subcommand(1);

    SimulateOptions sim;
    auto* c_sim = app.add_subcommand("simulate", "Generate a synthetic cohort");
    c_sim->add_option("--scenario", sim.scenario, "correct | misspec")->default_val("correct");
    c_sim->add_option("--n", sim.n_samples, "Sample size");
    c_sim->add_option("--p", sim.p_signal, "Signal covariates");
    c_sim->add_option("--noise", sim.p_noise, "Noise covariates");
    c_sim->add_option("--snr", sim.snr, "Signal-to-noise target");
    add_common(c_sim, sim.common);

    TrainOptions tr;
    auto* c_train = app.add_subcommand("train", "Fit the model on a cohort CSV");
    c_train->add_option("--data", tr.data_path, "Cohort CSV");
    c_train->add_option("--schema", tr.schema_path, "Covariate schema JSON");
    c_train->add_option("--val-frac", tr.val_fraction, "Validation fraction");
    c_train->add_option("--arch", tr.arch, "Layer widths, e.g. 250,125,1");
    c_train->add_option("--dropout", tr.dropout, "Per-layer dropout rates");
    c_train->add_option("--init", tr.weight_init, "glorot-uniform | glorot-normal | he-uniform");
    c_train->add_option("--bias-init", tr.bias_init, "zeros | ones");
    c_train->add_option("--optimizer", tr.optimizer, "sgd | adagrad | adadelta | adam");
    c_train->add_option("--lr", tr.learning_rate, "Learning rate");
    c_train->add_option("--batch", tr.batch_size, "Minibatch size");
    c_train->add_option("--epochs", tr.max_epochs, "Epoch budget");
    c_train->add_option("--delta", tr.gap_delta, "Validation-train loss gap stop");
    std::string baseline_family;
    c_train->add_option("--baseline", baseline_family,
                        "Train a baseline instead: logistic (the one-layer linear special case)");
    c_train->add_option("--balanced", tr.balanced,
                        "Train K models on balanced subsamples (0 = off)");
    add_common(c_train, tr.common);

    EvaluateOptions ev;
    auto* c_eval = app.add_subcommand("evaluate", "Score a cohort with a trained model");
    c_eval->add_option("--data", ev.data_path, "Cohort CSV");
    c_eval->add_option("--schema", ev.schema_path, "Covariate schema JSON");
    c_eval->add_option("--model", ev.model_path, "model.json or ensemble.json");
    c_eval->add_option("--transform", ev.transform_path, "transform.json from training");
    c_eval->add_option("--impute-mode", ev.impute_mode,
                       "train (use stored transform) | split (refit on this data)");
    c_eval->add_option("--threshold", ev.threshold, "Positive-call probability threshold");
    add_common(c_eval, ev.common);

    TuneOptions tu;
    auto* c_tune = app.add_subcommand("tune", "Grid-search the learning rate");
    c_tune->add_option("--data", tu.data_path, "Cohort CSV");
    c_tune->add_option("--schema", tu.schema_path, "Covariate schema JSON");
    c_tune->add_option("--val-frac", tu.val_fraction, "Validation fraction");
    c_tune->add_option("--arch", tu.arch, "Layer widths");
    c_tune->add_option("--dropout", tu.dropout, "Per-layer dropout rates");
    c_tune->add_option("--init", tu.weight_init, "Weight initialization");
    c_tune->add_option("--bias-init", tu.bias_init, "Bias initialization");
    c_tune->add_option("--optimizer", tu.optimizer, "Update rule");
    c_tune->add_option("--batch", tu.batch_size, "Minibatch size");
    c_tune->add_option("--epochs", tu.max_epochs, "Epoch budget");
    c_tune->add_option("--delta", tu.gap_delta, "Gap stop");
    c_tune->add_option("--grid-min", tu.grid_min, "Smallest learning rate");
    c_tune->add_option("--grid-max", tu.grid_max, "Largest learning rate");
    c_tune->add_option("--grid-points", tu.grid_points, "Grid resolution");
    add_common(c_tune, tu.common);

    BenchmarkFlags bm;
    auto* c_bench = app.add_subcommand("benchmark", "Replicated simulation benchmark table");
    c_bench->add_option("--scenario", bm.scenario, "correct | misspec");
    c_bench->add_option("--snr", bm.snr_list, "Comma list of snr targets");
    c_bench->add_option("--noise", bm.noise_list, "Comma list of noise covariate counts");
    c_bench->add_option("--cells", bm.cells, "Comma list of p:n pairs");
    c_bench->add_option("--reps", bm.repetitions, "Replications per cell");
    c_bench->add_option("--arch", bm.arch, "Model layer widths");
    c_bench->add_option("--optimizer", bm.optimizer, "Update rule");
    c_bench->add_option("--lr", bm.learning_rate, "Learning rate");
    c_bench->add_option("--batch", bm.batch_size, "Minibatch size");
    c_bench->add_option("--epochs", bm.max_epochs, "Epoch budget");
    c_bench->add_option("--delta", bm.gap_delta, "Gap stop");
    c_bench->add_option("--split", bm.split_fraction, "Training fraction per replication");
    add_common(c_bench, bm.common);

    SubgroupOptions sg;
    auto* c_sub = app.add_subcommand("subgroup", "Tendency scores, local-fdr classes, risk curves");
    c_sub->add_option("--data", sg.data_path, "Cohort CSV");
    c_sub->add_option("--schema", sg.schema_path, "Covariate schema JSON");
    c_sub->add_option("--model", sg.model_path, "model.json");
    c_sub->add_option("--transform", sg.transform_path, "transform.json from training");
    c_sub->add_option("--q", sg.q, "Local false discovery rate cutoff");
    add_common(c_sub, sg.common);

    // Later occurrences win, which is what lets --config overrides land.
    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        for (CLI::Option* option : sub->get_options())
            option->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    try {
        const std::vector<std::string> expanded = apply_config_file(args);
        // CLI11 parses reversed argv.
        std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
        app.parse(reversed);

        if (c_sim->parsed()) return cmd_simulate(sim);
        if (c_train->parsed()) {
            if (!baseline_family.empty()) {
                if (baseline_family != "logistic")
                    throw ConfigError("--baseline supports only: logistic");
                tr.logistic_baseline = true;
            }
            return cmd_train(tr);
        }
        if (c_eval->parsed()) return cmd_evaluate(ev);
        if (c_tune->parsed()) return cmd_tune(tu);
        if (c_bench->parsed()) return cmd_benchmark(bm);
        if (c_sub->parsed()) return cmd_subgroup(sg);
        return 1;
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace inner::cli
