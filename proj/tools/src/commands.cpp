#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "inner/dataio.hpp"
#include "inner/errors.hpp"
#include "inner/metrics.hpp"
#include "inner/serialize.hpp"
#include "inner/subgroup.hpp"
#include "json.hpp"

namespace inner::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path prepare_out_dir(const CommonOptions& common) {
    if (common.out_dir.empty()) throw ConfigError("--out directory is required");
    const fs::path dir(common.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

void write_out(const fs::path& dir, const std::string& name, const std::string& contents) {
    serialize::write_file((dir / name).string(), contents);
}

void write_runconfig(const fs::path& dir, const std::string& command, const json& flags) {
    json j;
    j["command"] = command;
    j["flags"] = flags;
    write_out(dir, "runconfig.json", j.dump(2));
}

// Header-derived schema: the label column y, the pain column x, every other
// column a continuous covariate.
dataio::CovariateSchema infer_schema(const std::string& data_path) {
    std::ifstream in(data_path);
    if (!in) throw IoError("cannot open " + data_path);
    std::string header;
    if (!std::getline(in, header)) throw ValidationError(data_path + ": empty file");
    dataio::CovariateSchema schema;
    schema.pain_column = "x";
    schema.label_column = "y";
    bool saw_label = false, saw_pain = false;
    std::stringstream ss(header);
    std::string col;
    while (std::getline(ss, col, ',')) {
        while (!col.empty() && (col.back() == '\r' || col.back() == ' ')) col.pop_back();
        if (col == "y") {
            saw_label = true;
        } else if (col == "x") {
            saw_pain = true;
        } else {
            schema.covariates.push_back({col, dataio::CovariateKind::Continuous, {}});
        }
    }
    if (!saw_label || !saw_pain)
        throw ValidationError(data_path +
                              ": header lacks y/x columns; pass an explicit --schema file");
    return schema;
}

struct LoadedCohort {
    dataio::CovariateSchema schema;
    dataio::RawTable table;
};

LoadedCohort load_data(const std::string& data_path, const std::string& schema_path) {
    if (data_path.empty()) throw ConfigError("--data is required");
    LoadedCohort loaded;
    loaded.schema = schema_path.empty()
                        ? infer_schema(data_path)
                        : serialize::schema_from_json(serialize::read_file(schema_path));
    loaded.table = dataio::load_cohort(data_path, loaded.schema);
    if (loaded.table.rows.empty()) throw ValidationError(data_path + ": no data rows");
    return loaded;
}

optim::TrainConfig make_train_config(const std::string& optimizer, double lr, std::size_t batch,
                                     std::size_t epochs, double delta, std::uint64_t seed) {
    optim::TrainConfig cfg;
    cfg.optimizer = optim::optimizer_from_string(optimizer);
    cfg.learning_rate = lr;
    cfg.batch_size = batch;
    cfg.max_epochs = epochs;
    cfg.gap_delta = delta;
    cfg.seed = seed;
    return cfg;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

struct LoadedModel {
    std::vector<InnerModel> models;
    std::string schema_hash;

    bool is_ensemble() const { return models.size() > 1; }

    double score(const Subject& s) const {
        double acc = 0.0;
        for (const auto& m : models) acc += predict(m, s);
        return acc / static_cast<double>(models.size());
    }
};

LoadedModel load_model_file(const std::string& path) {
    const std::string text = serialize::read_file(path);
    LoadedModel loaded;
    const json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ValidationError(path + ": not valid json");
    if (j.contains("models")) {
        auto ensemble = serialize::ensemble_from_json(text, &loaded.schema_hash);
        loaded.models = std::move(ensemble.models);
        if (loaded.models.empty()) throw ValidationError(path + ": empty ensemble");
    } else {
        auto env = serialize::model_from_json(text);
        loaded.models.push_back(std::move(env.model));
        loaded.schema_hash = env.covariate_schema_hash;
    }
    return loaded;
}

std::vector<subgroup::CovariateBlock> schema_blocks(const dataio::FittedTransform& transform) {
    std::vector<subgroup::CovariateBlock> blocks;
    std::size_t col = 0;
    for (std::size_t j = 0; j < transform.schema.covariates.size(); ++j) {
        const auto& spec = transform.schema.covariates[j];
        subgroup::CovariateBlock block;
        block.name = spec.name;
        if (spec.kind == dataio::CovariateKind::Continuous) {
            block.columns = {col};
            col += 1;
        } else {
            const std::size_t width = transform.categorical[j].levels.size() - 1;
            for (std::size_t k = 0; k < width; ++k) block.columns.push_back(col + k);
            col += width;
        }
        blocks.push_back(std::move(block));
    }
    return blocks;
}

}  // namespace

int cmd_simulate(const SimulateOptions& opt) {
    const fs::path dir = prepare_out_dir(opt.common);
    simgen::SimConfig cfg;
    cfg.scenario = simgen::scenario_from_string(opt.scenario);
    cfg.n_samples = opt.n_samples;
    cfg.p_signal = opt.p_signal;
    cfg.p_noise = opt.p_noise;
    cfg.snr_target = opt.snr;
    cfg.seed = opt.common.seed;

    const simgen::SimDataset ds = simgen::generate(cfg);
    write_out(dir, "dataset.csv", report::dataset_csv(ds.subjects));
    write_out(dir, "truth.json", serialize::sim_truth_to_json(ds));
    write_runconfig(dir, "simulate",
                    json{{"scenario", opt.scenario},
                         {"n", opt.n_samples},
                         {"p", opt.p_signal},
                         {"noise", opt.p_noise},
                         {"snr", opt.snr},
                         {"seed", opt.common.seed}});
    std::cout << "wrote " << (dir / "dataset.csv").string() << " (" << ds.subjects.size()
              << " rows, achieved snr " << ds.truth.achieved_snr << ")\n";
    return 0;
}

int cmd_train(const TrainOptions& opt) {
    const fs::path dir = prepare_out_dir(opt.common);
    const LoadedCohort loaded = load_data(opt.data_path, opt.schema_path);

    const double train_fraction = 1.0 - opt.val_fraction;
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ConfigError("--val-frac must lie strictly inside (0,1)");
    auto [train_table, val_table] =
        dataio::split(loaded.table, train_fraction, derive_seed(opt.common.seed, "train:split"));

    const dataio::FittedTransform transform = dataio::fit_transform(train_table);
    std::vector<std::string> warnings;
    const dataio::DesignMatrix dm_train = dataio::apply_transform(train_table, transform, &warnings);
    const dataio::DesignMatrix dm_val = dataio::apply_transform(val_table, transform, &warnings);
    print_warnings(warnings);

    const std::vector<Subject> train_subjects = dm_train.to_subjects();
    const std::vector<Subject> val_subjects = dm_val.to_subjects();
    const std::size_t input_dim = dm_train.covariates.cols();
    const std::string hash = dataio::schema_hash(loaded.schema);

    const ArchSpec arch = parse_arch(opt.arch, opt.dropout, opt.weight_init, opt.bias_init);
    auto build_model = [&](std::uint64_t seed) {
        return opt.logistic_baseline ? make_logistic_baseline(input_dim)
                                     : arch.build(input_dim, seed);
    };

    const std::size_t n_models = opt.balanced > 0 ? opt.balanced : 1;
    dataio::BalancedEnsemble ensemble;
    optim::TrainLog first_log;
    for (std::size_t k = 0; k < n_models; ++k) {
        std::vector<Subject> fit_set;
        if (opt.balanced > 0) {
            auto idx = dataio::balanced_subsample(dm_train.labels,
                                                  derive_seed(opt.common.seed, "balance", k));
            fit_set.reserve(idx.size());
            for (auto i : idx) fit_set.push_back(train_subjects[i]);
            ensemble.subsample_indices.push_back(std::move(idx));
        } else {
            fit_set = train_subjects;
        }
        optim::TrainConfig cfg =
            make_train_config(opt.optimizer, opt.learning_rate, opt.batch_size, opt.max_epochs,
                              opt.gap_delta, derive_seed(opt.common.seed, "train:run", k));
        if (cfg.batch_size > fit_set.size()) {
            cfg.batch_size = fit_set.size();
            std::cerr << "note: batch size reduced to " << cfg.batch_size
                      << " (training split size)\n";
        }
        auto result = optim::train(build_model(derive_seed(opt.common.seed, "train:init", k)),
                                   fit_set, val_subjects, cfg);
        if (k == 0) first_log = result.log;
        const std::string suffix = n_models > 1 ? "_" + std::to_string(k + 1) : "";
        write_out(dir, "trainlog" + suffix + ".csv", report::train_log_csv(result.log));
        std::cout << "model " << k + 1 << "/" << n_models << ": "
                  << result.log.epochs.size() << " epochs, final validation loss "
                  << result.log.epochs.back().validation_loss << '\n';
        ensemble.models.push_back(std::move(result.model));
    }

    if (n_models > 1) {
        write_out(dir, "ensemble.json", serialize::ensemble_to_json(ensemble, hash));
    } else {
        write_out(dir, "model.json", serialize::model_to_json(ensemble.models.front(), hash));
    }
    write_out(dir, "transform.json", serialize::transform_to_json(transform));
    write_out(dir, "schema.json", serialize::schema_to_json(loaded.schema));
    write_out(dir, "learning_curve.svg", report::learning_curve_svg(first_log));
    write_runconfig(dir, "train",
                    json{{"data", opt.data_path},
                         {"schema", opt.schema_path},
                         {"val-frac", opt.val_fraction},
                         {"arch", opt.arch},
                         {"dropout", opt.dropout},
                         {"init", opt.weight_init},
                         {"bias-init", opt.bias_init},
                         {"optimizer", opt.optimizer},
                         {"lr", opt.learning_rate},
                         {"batch", opt.batch_size},
                         {"epochs", opt.max_epochs},
                         {"delta", opt.gap_delta},
                         {"baseline", opt.logistic_baseline ? "logistic" : ""},
                         {"balanced", opt.balanced},
                         {"seed", opt.common.seed}});
    return 0;
}

int cmd_evaluate(const EvaluateOptions& opt) {
    const fs::path dir = prepare_out_dir(opt.common);
    if (opt.model_path.empty()) throw ConfigError("--model is required");
    const LoadedModel model = load_model_file(opt.model_path);
    const LoadedCohort loaded = load_data(opt.data_path, opt.schema_path);

    dataio::FittedTransform transform;
    if (opt.impute_mode == "split") {
        // Refit imputation and encoding statistics on the scored split
        // itself.
        transform = dataio::fit_transform(loaded.table);
    } else if (opt.impute_mode == "train") {
        if (opt.transform_path.empty())
            throw ConfigError("--transform is required with --impute-mode train");
        transform = serialize::transform_from_json(serialize::read_file(opt.transform_path));
    } else {
        throw ConfigError("--impute-mode must be train or split");
    }
    if (dataio::schema_hash(transform.schema) != model.schema_hash)
        throw ValidationError("model was trained under a different covariate schema");
    if (dataio::schema_hash(loaded.schema) != model.schema_hash)
        throw ValidationError("data schema does not match the model's covariate schema");

    std::vector<std::string> warnings;
    const dataio::DesignMatrix dm = dataio::apply_transform(loaded.table, transform, &warnings);
    print_warnings(warnings);
    const std::vector<Subject> subjects = dm.to_subjects();

    std::vector<double> scores(subjects.size());
    for (std::size_t i = 0; i < subjects.size(); ++i) scores[i] = model.score(subjects[i]);
    const metrics::MetricReport report =
        metrics::classify_and_score(scores, dm.labels, opt.threshold);

    write_out(dir, "metrics.json", serialize::metric_report_to_json(report));
    std::ostringstream text;
    text << "n=" << subjects.size() << " (" << report.n_pos << " positive, " << report.n_neg
         << " negative), threshold=" << report.threshold << '\n';
    char line[256];
    std::snprintf(line, sizeof line,
                  "c_statistic=%.4f accuracy=%.4f sensitivity=%.4f specificity=%.4f "
                  "balance_accuracy=%.4f\n",
                  report.c_statistic, report.accuracy, report.sensitivity, report.specificity,
                  report.balance_accuracy);
    text << line;
    write_out(dir, "metrics.txt", text.str());
    std::cout << text.str();
    write_runconfig(dir, "evaluate",
                    json{{"data", opt.data_path},
                         {"schema", opt.schema_path},
                         {"model", opt.model_path},
                         {"transform", opt.transform_path},
                         {"impute-mode", opt.impute_mode},
                         {"threshold", opt.threshold},
                         {"seed", opt.common.seed}});
    return 0;
}

int cmd_tune(const TuneOptions& opt) {
    const fs::path dir = prepare_out_dir(opt.common);
    const LoadedCohort loaded = load_data(opt.data_path, opt.schema_path);

    const double train_fraction = 1.0 - opt.val_fraction;
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ConfigError("--val-frac must lie strictly inside (0,1)");
    auto [train_table, val_table] =
        dataio::split(loaded.table, train_fraction, derive_seed(opt.common.seed, "tune:split"));
    const dataio::FittedTransform transform = dataio::fit_transform(train_table);
    std::vector<std::string> warnings;
    const std::vector<Subject> train_subjects =
        dataio::apply_transform(train_table, transform, &warnings).to_subjects();
    const std::vector<Subject> val_subjects =
        dataio::apply_transform(val_table, transform, &warnings).to_subjects();
    print_warnings(warnings);

    if (opt.grid_points < 1) throw ConfigError("--grid-points must be positive");
    std::vector<double> grid(opt.grid_points);
    for (std::size_t i = 0; i < grid.size(); ++i)
        grid[i] = opt.grid_points == 1
                      ? opt.grid_min
                      : opt.grid_min + static_cast<double>(i) * (opt.grid_max - opt.grid_min) /
                                           static_cast<double>(opt.grid_points - 1);

    const std::size_t input_dim = train_subjects.front().covariates.size();
    const ArchSpec arch = parse_arch(opt.arch, opt.dropout, opt.weight_init, opt.bias_init);
    optim::ModelFactory factory = [&](std::uint64_t seed) { return arch.build(input_dim, seed); };
    optim::TrainConfig base =
        make_train_config(opt.optimizer, opt.grid_min, opt.batch_size, opt.max_epochs,
                          opt.gap_delta, derive_seed(opt.common.seed, "tune"));
    const optim::GridSearchResult result =
        optim::grid_search_lr(factory, train_subjects, val_subjects, grid, base);

    std::string csv = "learning_rate,validation_loss,diverged\n";
    json points = json::array();
    for (const auto& p : result.points) {
        csv += report::format_double(p.learning_rate);
        csv += ',';
        csv += p.diverged ? "" : report::format_double(p.validation_loss);
        csv += ',';
        csv += p.diverged ? "1" : "0";
        csv += '\n';
        points.push_back(json{{"learning_rate", p.learning_rate},
                              {"validation_loss", p.validation_loss},
                              {"diverged", p.diverged}});
    }
    write_out(dir, "tune.csv", csv);
    write_out(dir, "tune.json",
              json{{"best_learning_rate", result.best_learning_rate}, {"points", points}}.dump(2));
    write_runconfig(dir, "tune",
                    json{{"data", opt.data_path},
                         {"schema", opt.schema_path},
                         {"val-frac", opt.val_fraction},
                         {"arch", opt.arch},
                         {"optimizer", opt.optimizer},
                         {"grid-min", opt.grid_min},
                         {"grid-max", opt.grid_max},
                         {"grid-points", opt.grid_points},
                         {"batch", opt.batch_size},
                         {"epochs", opt.max_epochs},
                         {"delta", opt.gap_delta},
                         {"seed", opt.common.seed}});
    std::cout << "best learning rate: " << result.best_learning_rate << '\n';
    return 0;
}

int cmd_benchmark(const BenchmarkFlags& opt) {
    const fs::path dir = prepare_out_dir(opt.common);

    BenchmarkOptions options;
    options.axes.scenario = simgen::scenario_from_string(opt.scenario);
    options.axes.seed = opt.common.seed;
    options.axes.snr_targets.clear();
    {
        std::stringstream ss(opt.snr_list);
        std::string item;
        while (std::getline(ss, item, ',')) options.axes.snr_targets.push_back(std::stod(item));
    }
    options.axes.noise_counts.clear();
    {
        std::stringstream ss(opt.noise_list);
        std::string item;
        while (std::getline(ss, item, ','))
            options.axes.noise_counts.push_back(static_cast<std::size_t>(std::stoul(item)));
    }
    options.axes.size_cells.clear();
    {
        std::stringstream ss(opt.cells);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto colon = item.find(':');
            if (colon == std::string::npos)
                throw ConfigError("--cells expects p:n pairs, e.g. 8:5000,16:20000");
            options.axes.size_cells.emplace_back(std::stoul(item.substr(0, colon)),
                                                 std::stoul(item.substr(colon + 1)));
        }
    }
    options.repetitions = opt.repetitions;
    options.arch = parse_arch(opt.arch, "", "glorot-uniform", "zeros");
    options.train = make_train_config(opt.optimizer, opt.learning_rate, opt.batch_size,
                                      opt.max_epochs, opt.gap_delta, 0);
    options.split_fraction = opt.split_fraction;
    options.threads = opt.common.threads;

    const auto cells = run_benchmark(options);
    write_out(dir, "benchmark.json", report::benchmark_report_json(cells));
    const std::string text = report::benchmark_table_text(cells);
    write_out(dir, "benchmark.txt", text);
    write_runconfig(dir, "benchmark",
                    json{{"scenario", opt.scenario},
                         {"snr", opt.snr_list},
                         {"noise", opt.noise_list},
                         {"cells", opt.cells},
                         {"reps", opt.repetitions},
                         {"arch", opt.arch},
                         {"optimizer", opt.optimizer},
                         {"lr", opt.learning_rate},
                         {"batch", opt.batch_size},
                         {"epochs", opt.max_epochs},
                         {"delta", opt.gap_delta},
                         {"split", opt.split_fraction},
                         {"threads", opt.common.threads},
                         {"seed", opt.common.seed}});
    std::cout << text;

    for (const auto& cell : cells)
        if (cell.failed) {
            std::cerr << "benchmark: " << cell.failure << '\n';
            return 3;
        }
    return 0;
}

int cmd_subgroup(const SubgroupOptions& opt) {
    const fs::path dir = prepare_out_dir(opt.common);
    if (opt.model_path.empty()) throw ConfigError("--model is required");
    if (opt.transform_path.empty()) throw ConfigError("--transform is required");
    const LoadedModel model = load_model_file(opt.model_path);
    if (model.is_ensemble())
        throw ValidationError(
            "subgroup scoring needs a single model; ensembles do not define one BOT/POT pair");
    const LoadedCohort loaded = load_data(opt.data_path, opt.schema_path);
    const dataio::FittedTransform transform =
        serialize::transform_from_json(serialize::read_file(opt.transform_path));
    if (dataio::schema_hash(transform.schema) != model.schema_hash)
        throw ValidationError("model was trained under a different covariate schema");
    if (dataio::schema_hash(loaded.schema) != model.schema_hash)
        throw ValidationError("data schema does not match the model's covariate schema");

    std::vector<std::string> warnings;
    const dataio::DesignMatrix dm = dataio::apply_transform(loaded.table, transform, &warnings);
    print_warnings(warnings);
    const std::vector<Subject> subjects = dm.to_subjects();

    const auto scores = subgroup::score_cohort(model.models.front(), subjects);
    const auto assignments = subgroup::assign_subgroups(scores, opt.q);
    const auto curves = subgroup::risk_curves(model.models.front(), subjects, assignments);
    const auto r2 = subgroup::covariate_r2(scores, dm.covariates, schema_blocks(transform));

    write_out(dir, "subjects.csv", report::subgroup_csv(scores, assignments));
    write_out(dir, "risk_curves.csv", report::risk_curves_csv(curves));
    write_out(dir, "risk_curves.svg", report::risk_curves_svg(curves));
    write_out(dir, "r2.csv", report::r2_csv(r2));
    write_runconfig(dir, "subgroup",
                    json{{"data", opt.data_path},
                         {"schema", opt.schema_path},
                         {"model", opt.model_path},
                         {"transform", opt.transform_path},
                         {"q", opt.q},
                         {"seed", opt.common.seed}});

    // Occupancy summary, empty cells noted once.
    std::map<std::string, std::size_t> counts;
    for (const auto& a : assignments)
        ++counts[report::subgroup_label(a.bot_class, a.pot_class)];
    for (const auto& [label, count] : counts) std::cout << label << ": " << count << '\n';
    std::cout << "subgroups with no members are omitted from the curves\n";
    return 0;
}

}  // namespace inner::cli
