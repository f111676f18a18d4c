#include "inner/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "inner/errors.hpp"

namespace inner::dataio {

void CovariateSchema::validate() const {
    std::unordered_set<std::string> names;
    for (const auto& spec : covariates) {
        if (spec.name.empty()) throw ConfigError("schema: empty covariate name");
        if (!names.insert(spec.name).second)
            throw ConfigError("schema: duplicate covariate name " + spec.name);
    }
    if (names.contains(pain_column) || names.contains(label_column))
        throw ConfigError("schema: pain/label columns must not appear among covariates");
    if (pain_column.empty() || label_column.empty() || pain_column == label_column)
        throw ConfigError("schema: pain and label columns must be distinct and named");
}

std::string schema_hash(const CovariateSchema& schema) {
    std::string canon = schema.label_column + "\x1f" + schema.pain_column;
    for (const auto& spec : schema.covariates) {
        canon += "\x1e" + spec.name + "\x1f";
        canon += spec.kind == CovariateKind::Continuous ? "continuous" : "categorical";
        for (const auto& level : spec.levels) canon += "\x1f" + level;
    }
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

CovariateSchema implicit_schema(std::size_t p) {
    CovariateSchema schema;
    schema.pain_column = "x";
    schema.label_column = "y";
    schema.covariates.reserve(p);
    for (std::size_t j = 1; j <= p; ++j)
        schema.covariates.push_back({"z" + std::to_string(j), CovariateKind::Continuous, {}});
    return schema;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool is_missing(const std::string& field) { return field.empty() || field == "NA"; }

double parse_number(const std::string& field, std::size_t line_no, const std::string& column) {
    try {
        std::size_t pos = 0;
        double v = std::stod(field, &pos);
        if (pos != field.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ValidationError("line " + std::to_string(line_no) + ": cannot parse '" + field +
                              "' in column " + column);
    }
}

}  // namespace

RawTable load_cohort(const std::string& path, const CovariateSchema& schema) {
    schema.validate();
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);

    std::string header_line;
    if (!std::getline(in, header_line)) throw ValidationError(path + ": empty file");
    std::vector<std::string> header = split_csv_line(header_line);
    for (auto& h : header) h = trim(h);

    auto column_of = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw ValidationError(path + ": header is missing column " + name);
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t pain_col = column_of(schema.pain_column);
    const std::size_t label_col = column_of(schema.label_column);
    std::vector<std::size_t> cov_cols;
    cov_cols.reserve(schema.covariates.size());
    for (const auto& spec : schema.covariates) cov_cols.push_back(column_of(spec.name));

    RawTable table;
    table.schema = schema;
    std::vector<std::size_t> bad_pain_lines;

    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw ValidationError("line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(header.size()) + " fields, found " +
                                  std::to_string(fields.size()));
        for (auto& f : fields) f = trim(f);

        RawRow row;
        row.line = line_no;
        const std::string& label_field = fields[label_col];
        if (is_missing(label_field) || (label_field != "0" && label_field != "1"))
            throw ValidationError("line " + std::to_string(line_no) + ": label must be 0 or 1, got '" +
                                  label_field + "'");
        row.label = label_field == "1" ? 1 : 0;

        const std::string& pain_field = fields[pain_col];
        if (is_missing(pain_field))
            throw ValidationError("line " + std::to_string(line_no) + ": missing pain value");
        row.pain = parse_number(pain_field, line_no, schema.pain_column);
        if (row.pain < 0.0 || row.pain > 10.0) {
            bad_pain_lines.push_back(line_no);
        }

        row.cells.resize(schema.covariates.size());
        for (std::size_t j = 0; j < schema.covariates.size(); ++j) {
            const std::string& field = fields[cov_cols[j]];
            RawCell& cell = row.cells[j];
            if (is_missing(field)) continue;
            cell.missing = false;
            if (schema.covariates[j].kind == CovariateKind::Continuous) {
                cell.number = parse_number(field, line_no, schema.covariates[j].name);
                if (!std::isfinite(cell.number))
                    throw ValidationError("line " + std::to_string(line_no) + ": non-finite value in " +
                                          schema.covariates[j].name);
            } else {
                cell.category = field;
            }
        }
        table.rows.push_back(std::move(row));
    }

    if (!bad_pain_lines.empty()) {
        std::string msg = "pain scores outside [0,10] on line(s):";
        const std::size_t shown = std::min<std::size_t>(bad_pain_lines.size(), 10);
        for (std::size_t i = 0; i < shown; ++i) msg += " " + std::to_string(bad_pain_lines[i]);
        if (bad_pain_lines.size() > shown)
            msg += " (+" + std::to_string(bad_pain_lines.size() - shown) + " more)";
        throw ValidationError(msg);
    }
    return table;
}

RawTable table_from_rows(const CovariateSchema& schema, std::vector<RawRow> rows) {
    schema.validate();
    for (const auto& row : rows)
        if (row.cells.size() != schema.covariates.size())
            throw ContractError("table_from_rows: row width does not match schema");
    return {schema, std::move(rows)};
}

FittedTransform fit_transform(const RawTable& table) {
    if (table.rows.empty()) throw ConfigError("fit_transform: empty table");
    const auto& schema = table.schema;
    FittedTransform t;
    t.schema = schema;
    t.continuous.resize(schema.covariates.size());
    t.categorical.resize(schema.covariates.size());

    for (std::size_t j = 0; j < schema.covariates.size(); ++j) {
        const auto& spec = schema.covariates[j];
        if (spec.kind == CovariateKind::Continuous) {
            double sum = 0.0;
            std::size_t observed = 0;
            for (const auto& row : table.rows) {
                if (!row.cells[j].missing) {
                    sum += row.cells[j].number;
                    ++observed;
                }
            }
            if (observed == 0)
                throw ConfigError("fit_transform: covariate " + spec.name + " entirely missing");
            ContinuousTransform& ct = t.continuous[j];
            ct.impute_value = sum / static_cast<double>(observed);
            // Standardization statistics over the imputed column: imputing the
            // mean leaves the mean unchanged but shrinks the spread.
            const double n = static_cast<double>(table.rows.size());
            ct.center = ct.impute_value;
            double ss = 0.0;
            for (const auto& row : table.rows) {
                const double v = row.cells[j].missing ? ct.impute_value : row.cells[j].number;
                ss += (v - ct.center) * (v - ct.center);
            }
            const double sd = n > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
            if (sd <= 0.0)
                throw ConfigError("fit_transform: covariate " + spec.name + " has zero variance");
            ct.scale = sd;
            t.column_names.push_back(spec.name);
        } else {
            std::map<std::string, std::size_t> counts;
            for (const auto& row : table.rows)
                if (!row.cells[j].missing) ++counts[row.cells[j].category];
            if (counts.empty())
                throw ConfigError("fit_transform: covariate " + spec.name + " entirely missing");
            CategoricalTransform& ct = t.categorical[j];
            if (!spec.levels.empty()) {
                ct.levels = spec.levels;
                for (const auto& [level, _] : counts)
                    if (std::find(ct.levels.begin(), ct.levels.end(), level) == ct.levels.end())
                        throw ValidationError("fit_transform: level '" + level +
                                              "' of " + spec.name + " not in declared levels");
            } else {
                for (const auto& [level, _] : counts) ct.levels.push_back(level);
            }
            // Mode of observed values; ties resolved toward the earlier level.
            std::size_t best = 0;
            for (const auto& level : ct.levels) {
                auto it = counts.find(level);
                const std::size_t c = it == counts.end() ? 0 : it->second;
                if (c > best) {
                    best = c;
                    ct.impute_level = level;
                }
            }
            for (std::size_t k = 1; k < ct.levels.size(); ++k)
                t.column_names.push_back(spec.name + "=" + ct.levels[k]);
        }
    }
    return t;
}

DesignMatrix apply_transform(const RawTable& table, const FittedTransform& transform,
                             std::vector<std::string>* warnings) {
    if (schema_hash(table.schema) != schema_hash(transform.schema))
        throw ContractError("apply_transform: table schema does not match fitted transform");
    const auto& schema = table.schema;
    DesignMatrix dm;
    dm.column_names = transform.column_names;
    dm.covariates = Matrix(table.rows.size(), transform.column_names.size());
    dm.pain.resize(table.rows.size());
    dm.labels.resize(table.rows.size());

    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const RawRow& row = table.rows[i];
        dm.pain[i] = row.pain;
        dm.labels[i] = row.label;
        std::size_t col = 0;
        for (std::size_t j = 0; j < schema.covariates.size(); ++j) {
            const auto& spec = schema.covariates[j];
            if (spec.kind == CovariateKind::Continuous) {
                const auto& ct = transform.continuous[j];
                const double v = row.cells[j].missing ? ct.impute_value : row.cells[j].number;
                dm.covariates(i, col) = (v - ct.center) / ct.scale;
                ++col;
            } else {
                const auto& ct = transform.categorical[j];
                const std::string& level =
                    row.cells[j].missing ? ct.impute_level : row.cells[j].category;
                auto it = std::find(ct.levels.begin(), ct.levels.end(), level);
                if (it == ct.levels.end()) {
                    if (warnings)
                        warnings->push_back("line " + std::to_string(row.line) + ": unseen level '" +
                                            level + "' of " + spec.name + " encoded as all zeros");
                } else {
                    const std::size_t k = static_cast<std::size_t>(it - ct.levels.begin());
                    if (k > 0) dm.covariates(i, col + k - 1) = 1.0;
                }
                col += ct.levels.size() - 1;
            }
        }
    }
    return dm;
}

std::vector<Subject> DesignMatrix::to_subjects() const {
    std::vector<Subject> subjects(covariates.rows());
    for (std::size_t i = 0; i < subjects.size(); ++i) {
        subjects[i].pain = pain[i];
        subjects[i].label = labels[i];
        subjects[i].covariates.assign(covariates.row(i), covariates.row(i) + covariates.cols());
    }
    return subjects;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw ConfigError("split: fraction must lie strictly inside (0,1)");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(seed, "split"));
    rng.shuffle(order);
    const std::size_t first_size =
        static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
    std::vector<std::size_t> first(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(first_size));
    std::vector<std::size_t> second(order.begin() + static_cast<std::ptrdiff_t>(first_size), order.end());
    std::sort(first.begin(), first.end());
    std::sort(second.begin(), second.end());
    return {std::move(first), std::move(second)};
}

std::pair<RawTable, RawTable> split(const RawTable& table, double fraction, std::uint64_t seed) {
    auto [first, second] = split_indices(table.rows.size(), fraction, seed);
    RawTable a{table.schema, {}}, b{table.schema, {}};
    a.rows.reserve(first.size());
    b.rows.reserve(second.size());
    for (auto i : first) a.rows.push_back(table.rows[i]);
    for (auto i : second) b.rows.push_back(table.rows[i]);
    return {std::move(a), std::move(b)};
}

std::vector<std::size_t> balanced_subsample(std::span<const int> labels, std::uint64_t seed) {
    std::vector<std::size_t> cases, controls;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 1)
            cases.push_back(i);
        else if (labels[i] == 0)
            controls.push_back(i);
        else
            throw ContractError("balanced_subsample: labels must be 0 or 1");
    }
    if (cases.empty() || controls.empty())
        throw ConfigError("balanced_subsample: both classes must be present");
    if (cases.size() > controls.size())
        throw ConfigError("balanced_subsample: more cases than controls");

    Rng rng(derive_seed(seed, "balance"));
    rng.shuffle(controls);
    std::vector<std::size_t> out = cases;
    out.insert(out.end(), controls.begin(), controls.begin() + static_cast<std::ptrdiff_t>(cases.size()));
    std::sort(out.begin(), out.end());
    return out;
}

double ensemble_predict(const BalancedEnsemble& ensemble, const Subject& subject) {
    if (ensemble.models.empty()) throw ConfigError("ensemble_predict: empty ensemble");
    double acc = 0.0;
    for (const auto& model : ensemble.models) acc += predict(model, subject);
    return acc / static_cast<double>(ensemble.models.size());
}

}  // namespace inner::dataio
