#include "inner/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "inner/errors.hpp"
#include "json.hpp"

namespace inner::report {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_mean_se(const metrics::MetricSummary& s) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f (%.4f)", s.mean, s.standard_error);
    return buf;
}

std::string train_log_csv(const optim::TrainLog& log) {
    std::string out = "epoch,train_loss,validation_loss\n";
    for (const auto& rec : log.epochs) {
        out += std::to_string(rec.epoch);
        out += ',';
        out += format_double(rec.train_loss);
        out += ',';
        out += format_double(rec.validation_loss);
        out += '\n';
    }
    return out;
}

std::string dataset_csv(std::span<const Subject> subjects) {
    if (subjects.empty()) throw ContractError("dataset_csv: empty cohort");
    const std::size_t p = subjects.front().covariates.size();
    std::string out = "y,x";
    for (std::size_t j = 1; j <= p; ++j) out += ",z" + std::to_string(j);
    out += '\n';
    for (const auto& s : subjects) {
        if (!s.label.has_value()) throw ContractError("dataset_csv: unlabeled subject");
        out += std::to_string(*s.label);
        out += ',';
        out += format_double(s.pain);
        for (double z : s.covariates) {
            out += ',';
            out += format_double(z);
        }
        out += '\n';
    }
    return out;
}

namespace {

struct Frame {
    double width = 720, height = 480;
    double left = 70, right = 24, top = 24, bottom = 52;

    double plot_w() const { return width - left - right; }
    double plot_h() const { return height - top - bottom; }
    double x(double frac) const { return left + frac * plot_w(); }
    double y(double frac) const { return top + (1.0 - frac) * plot_h(); }
};

std::string svg_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

void svg_open(std::string& out, const Frame& f) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" "
                  "viewBox=\"0 0 %g %g\">\n",
                  f.width, f.height, f.width, f.height);
    out += buf;
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

void svg_axes(std::string& out, const Frame& f, const std::string& x_label,
              const std::string& y_label) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%s\" y1=\"%s\" x2=\"%s\" y2=\"%s\" stroke=\"black\"/>\n",
                  svg_number(f.x(0)).c_str(), svg_number(f.y(0)).c_str(),
                  svg_number(f.x(1)).c_str(), svg_number(f.y(0)).c_str());
    out += buf;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%s\" y1=\"%s\" x2=\"%s\" y2=\"%s\" stroke=\"black\"/>\n",
                  svg_number(f.x(0)).c_str(), svg_number(f.y(0)).c_str(),
                  svg_number(f.x(0)).c_str(), svg_number(f.y(1)).c_str());
    out += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%s\" y=\"%s\" text-anchor=\"middle\" font-size=\"13\">%s</text>\n",
                  svg_number(f.x(0.5)).c_str(), svg_number(f.height - 12).c_str(), x_label.c_str());
    out += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"16\" y=\"%s\" text-anchor=\"middle\" font-size=\"13\" "
                  "transform=\"rotate(-90 16 %s)\">%s</text>\n",
                  svg_number(f.y(0.5)).c_str(), svg_number(f.y(0.5)).c_str(), y_label.c_str());
    out += buf;
}

void svg_polyline(std::string& out, const std::vector<std::pair<double, double>>& pts,
                  const std::string& color, const std::string& dash = "") {
    out += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"";
    if (!dash.empty()) out += " stroke-dasharray=\"" + dash + "\"";
    out += " points=\"";
    for (const auto& [x, y] : pts) {
        out += svg_number(x);
        out += ',';
        out += svg_number(y);
        out += ' ';
    }
    out += "\"/>\n";
}

void svg_tick_labels_x(std::string& out, const Frame& f, double lo, double hi, int ticks) {
    char buf[160];
    for (int i = 0; i <= ticks; ++i) {
        const double frac = static_cast<double>(i) / ticks;
        const double v = lo + frac * (hi - lo);
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%s\" y=\"%s\" text-anchor=\"middle\" font-size=\"11\">%g</text>\n",
                      svg_number(f.x(frac)).c_str(), svg_number(f.y(0) + 16).c_str(), v);
        out += buf;
    }
}

void svg_tick_labels_y(std::string& out, const Frame& f, double lo, double hi, int ticks) {
    char buf[160];
    for (int i = 0; i <= ticks; ++i) {
        const double frac = static_cast<double>(i) / ticks;
        const double v = lo + frac * (hi - lo);
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%s\" y=\"%s\" text-anchor=\"end\" font-size=\"11\">%.3g</text>\n",
                      svg_number(f.x(0) - 6).c_str(), svg_number(f.y(frac) + 4).c_str(), v);
        out += buf;
    }
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#8c564b", "#e377c2", "#7f7f7f", "#17becf"};

}  // namespace

std::string learning_curve_svg(const optim::TrainLog& log) {
    if (log.epochs.empty()) throw ContractError("learning_curve_svg: empty log");
    Frame f;
    double lo = log.epochs.front().train_loss, hi = lo;
    for (const auto& rec : log.epochs) {
        lo = std::min({lo, rec.train_loss, rec.validation_loss});
        hi = std::max({hi, rec.train_loss, rec.validation_loss});
    }
    if (hi == lo) hi = lo + 1.0;
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    const double max_epoch = static_cast<double>(log.epochs.back().epoch);

    std::string out;
    svg_open(out, f);
    svg_axes(out, f, "epoch", "mean cross entropy loss");
    svg_tick_labels_x(out, f, 0, max_epoch, 5);
    svg_tick_labels_y(out, f, lo, hi, 5);

    auto series = [&](double optim::EpochRecord::* member) {
        std::vector<std::pair<double, double>> pts;
        pts.reserve(log.epochs.size());
        for (const auto& rec : log.epochs)
            pts.emplace_back(f.x(static_cast<double>(rec.epoch) / max_epoch),
                             f.y((rec.*member - lo) / (hi - lo)));
        return pts;
    };
    svg_polyline(out, series(&optim::EpochRecord::train_loss), kPalette[0]);
    svg_polyline(out, series(&optim::EpochRecord::validation_loss), kPalette[1]);

    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%s\" y=\"%s\" font-size=\"12\" fill=\"%s\">training</text>\n",
                  svg_number(f.x(0.78)).c_str(), svg_number(f.y(0.95)).c_str(), kPalette[0]);
    out += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%s\" y=\"%s\" font-size=\"12\" fill=\"%s\">validation</text>\n",
                  svg_number(f.x(0.78)).c_str(), svg_number(f.y(0.90)).c_str(), kPalette[1]);
    out += buf;
    out += "</svg>\n";
    return out;
}

std::string subgroup_label(subgroup::TailClass bot, subgroup::TailClass pot) {
    return subgroup::to_string(bot) + "_bot_" + subgroup::to_string(pot) + "_pot";
}

std::string subgroup_csv(std::span<const TendencyScore> scores,
                         std::span<const subgroup::SubgroupAssignment> assignments) {
    if (scores.size() != assignments.size())
        throw ContractError("subgroup_csv: scores/assignments length mismatch");
    std::string out = "log_bot,log_pot,lfdr_bot,lfdr_pot,bot_class,pot_class\n";
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out += format_double(scores[i].log_bot);
        out += ',';
        out += format_double(scores[i].log_pot);
        out += ',';
        out += format_double(assignments[i].lfdr_bot);
        out += ',';
        out += format_double(assignments[i].lfdr_pot);
        out += ',';
        out += subgroup::to_string(assignments[i].bot_class);
        out += ',';
        out += subgroup::to_string(assignments[i].pot_class);
        out += '\n';
    }
    return out;
}

std::string risk_curves_csv(std::span<const subgroup::RiskCurve> curves) {
    std::string out = "subgroup,pain,mean_prob\n";
    for (const auto& curve : curves) {
        const std::string label = subgroup_label(curve.bot_class, curve.pot_class);
        for (std::size_t i = 0; i < curve.pain_grid.size(); ++i) {
            out += label;
            out += ',';
            out += format_double(curve.pain_grid[i]);
            out += ',';
            out += format_double(curve.mean_prob[i]);
            out += '\n';
        }
    }
    return out;
}

std::string risk_curves_svg(std::span<const subgroup::RiskCurve> curves) {
    Frame f;
    std::string out;
    svg_open(out, f);
    svg_axes(out, f, "pain score", "mean probability");
    svg_tick_labels_x(out, f, 0, 10, 5);
    svg_tick_labels_y(out, f, 0, 1, 5);

    // 0.5 reference line.
    svg_polyline(out, {{f.x(0.0), f.y(0.5)}, {f.x(1.0), f.y(0.5)}}, "#999999", "4,4");

    char buf[256];
    std::size_t color = 0;
    for (const auto& curve : curves) {
        std::vector<std::pair<double, double>> pts;
        pts.reserve(curve.pain_grid.size());
        for (std::size_t i = 0; i < curve.pain_grid.size(); ++i)
            pts.emplace_back(f.x(curve.pain_grid[i] / 10.0), f.y(curve.mean_prob[i]));
        const char* c = kPalette[color % (sizeof kPalette / sizeof kPalette[0])];
        svg_polyline(out, pts, c);
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%s\" y=\"%s\" font-size=\"11\" fill=\"%s\">%s (n=%zu)</text>\n",
                      svg_number(f.x(0.72)).c_str(),
                      svg_number(f.y(0.97) + 14.0 * static_cast<double>(color)).c_str(), c,
                      subgroup_label(curve.bot_class, curve.pot_class).c_str(),
                      curve.member_count);
        out += buf;
        ++color;
    }
    out += "</svg>\n";
    return out;
}

std::string r2_csv(std::span<const subgroup::R2Entry> entries) {
    std::string out = "covariate,r2_bot,r2_pot\n";
    for (const auto& e : entries) {
        out += e.name;
        out += ',';
        if (e.r2_bot) out += format_double(*e.r2_bot);
        out += ',';
        if (e.r2_pot) out += format_double(*e.r2_pot);
        out += '\n';
    }
    return out;
}

namespace {

std::string cell_spec(const simgen::SimConfig& cfg) {
    std::string s = simgen::to_string(cfg.scenario);
    s += " snr=" + std::to_string(cfg.snr_target).substr(0, 4);
    s += " p=" + std::to_string(cfg.p_signal);
    s += " noise=" + std::to_string(cfg.p_noise);
    s += " n=" + std::to_string(cfg.n_samples);
    return s;
}

}  // namespace

std::string benchmark_table_text(std::span<const BenchmarkCell> cells) {
    std::size_t w = 14;
    for (const auto& cell : cells) w = std::max(w, cell_spec(cell.config).size());
    std::ostringstream out;
    out << "C-statistic, average (SE)\n";
    std::string header = "cell";
    header.resize(w, ' ');
    out << header << "  logistic         model\n";
    for (const auto& cell : cells) {
        std::string spec = cell_spec(cell.config);
        spec.resize(w, ' ');
        out << spec << "  ";
        if (cell.failed) {
            out << "failed: " << cell.failure << '\n';
            continue;
        }
        std::string b = format_mean_se(cell.baseline_c_statistic);
        b.resize(15, ' ');
        out << b << "  " << format_mean_se(cell.model_c_statistic) << '\n';
    }
    return out.str();
}

std::string benchmark_report_json(std::span<const BenchmarkCell> cells) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& cell : cells) {
        nlohmann::json j;
        j["scenario"] = simgen::to_string(cell.config.scenario);
        j["snr_target"] = cell.config.snr_target;
        j["p_signal"] = cell.config.p_signal;
        j["p_noise"] = cell.config.p_noise;
        j["n_samples"] = cell.config.n_samples;
        j["seed"] = cell.config.seed;
        j["repetitions"] = cell.repetitions;
        if (cell.failed) {
            j["failed"] = true;
            j["error"] = cell.failure;
        } else {
            j["model_c_statistic"] = {{"mean", cell.model_c_statistic.mean},
                                      {"se", cell.model_c_statistic.standard_error}};
            j["baseline_c_statistic"] = {{"mean", cell.baseline_c_statistic.mean},
                                         {"se", cell.baseline_c_statistic.standard_error}};
        }
        rows.push_back(std::move(j));
    }
    return nlohmann::json{{"cells", rows}}.dump(2);
}

std::string aggregate_table_text(const metrics::AggregateReport& report) {
    std::ostringstream out;
    auto row = [&](const char* name, const metrics::MetricSummary& s) {
        std::string label = name;
        label.resize(18, ' ');
        out << label << format_mean_se(s) << '\n';
    };
    out << "metric            average (SE), R=" << report.repetitions
        << ", threshold=" << report.threshold << '\n';
    row("c_statistic", report.c_statistic);
    row("accuracy", report.accuracy);
    row("sensitivity", report.sensitivity);
    row("specificity", report.specificity);
    row("balance_accuracy", report.balance_accuracy);
    return out.str();
}

}  // namespace inner::report
