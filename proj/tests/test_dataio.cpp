#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "inner/dataio.hpp"
#include "inner/errors.hpp"
#include "inner/serialize.hpp"

using namespace inner;
using namespace inner::dataio;

namespace {

struct TempFile {
    std::filesystem::path path;
    explicit TempFile(const std::string& contents) {
        static int counter = 0;
        path = std::filesystem::temp_directory_path() /
               ("inner_test_" + std::to_string(++counter) + ".csv");
        std::ofstream out(path);
        out << contents;
    }
    ~TempFile() { std::filesystem::remove(path); }
};

CovariateSchema mixed_schema() {
    CovariateSchema schema;
    schema.pain_column = "pain";
    schema.label_column = "opioid";
    schema.covariates = {
        {"bmi", CovariateKind::Continuous, {}},
        {"smoker", CovariateKind::Categorical, {}},
    };
    return schema;
}

}  // namespace

TEST_CASE("a well-formed file loads every row") {
    TempFile f("opioid,pain,bmi,smoker\n1,5,27.1,yes\n0,0,31.4,no\n0,10,22.0,no\n");
    auto table = load_cohort(f.path.string(), mixed_schema());
    CHECK(table.rows.size() == 3);
    CHECK(table.rows[0].label == 1);
    CHECK(table.rows[0].pain == 5.0);
    CHECK(table.rows[0].cells[0].number == doctest::Approx(27.1));
    CHECK(table.rows[0].cells[1].category == "yes");
}

TEST_CASE("column order in the file does not matter") {
    TempFile f("smoker,bmi,opioid,pain\nyes,27.1,1,5\n");
    auto table = load_cohort(f.path.string(), mixed_schema());
    CHECK(table.rows[0].cells[0].number == doctest::Approx(27.1));
    CHECK(table.rows[0].cells[1].category == "yes");
}

TEST_CASE("out-of-range pain is rejected with the offending line") {
    TempFile f("opioid,pain,bmi,smoker\n1,5,27.1,yes\n0,12,31.4,no\n");
    try {
        load_cohort(f.path.string(), mixed_schema());
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("3") != std::string::npos);
    }
}

TEST_CASE("malformed rows carry their line number") {
    TempFile f("opioid,pain,bmi,smoker\n1,5,27.1,yes\n0,3,oops,no\n");
    try {
        load_cohort(f.path.string(), mixed_schema());
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("line 3") != std::string::npos);
    }
}

TEST_CASE("field-count mismatches and bad labels are rejected") {
    TempFile short_row("opioid,pain,bmi,smoker\n1,5,27.1\n");
    CHECK_THROWS_AS(load_cohort(short_row.path.string(), mixed_schema()), ValidationError);
    TempFile bad_label("opioid,pain,bmi,smoker\n2,5,27.1,yes\n");
    CHECK_THROWS_AS(load_cohort(bad_label.path.string(), mixed_schema()), ValidationError);
}

TEST_CASE("missing files and missing columns are distinct errors") {
    CHECK_THROWS_AS(load_cohort("/nonexistent/cohort.csv", mixed_schema()), IoError);
    TempFile f("opioid,pain,bmi\n1,5,27.1\n");
    CHECK_THROWS_AS(load_cohort(f.path.string(), mixed_schema()), ValidationError);
}

TEST_CASE("empty cells and NA mark missing values") {
    TempFile f("opioid,pain,bmi,smoker\n1,5,,yes\n0,2,NA,no\n1,8,30.0,NA\n");
    auto table = load_cohort(f.path.string(), mixed_schema());
    CHECK(table.rows[0].cells[0].missing);
    CHECK(table.rows[1].cells[0].missing);
    CHECK(table.rows[2].cells[1].missing);
}

TEST_CASE("continuous imputation uses the mean of observed values") {
    // values (1, 2, missing, 3) -> impute 2
    TempFile f("opioid,pain,bmi,smoker\n1,5,1,a\n0,2,2,a\n1,8,,a\n0,1,3,b\n");
    auto table = load_cohort(f.path.string(), mixed_schema());
    auto t = fit_transform(table);
    CHECK(t.continuous[0].impute_value == doctest::Approx(2.0));
}

TEST_CASE("categorical imputation uses the mode") {
    TempFile f("opioid,pain,bmi,smoker\n1,5,1,A\n0,2,2,A\n1,8,3,B\n0,1,4,NA\n");
    auto table = load_cohort(f.path.string(), mixed_schema());
    auto t = fit_transform(table);
    CHECK(t.categorical[1].impute_level == "A");
}

TEST_CASE("applied continuous columns are standardized on the fitting split") {
    Rng rng(64);
    std::string contents = "opioid,pain,bmi,smoker\n";
    for (int i = 0; i < 200; ++i) {
        contents += std::to_string(i % 2) + "," + std::to_string(i % 11) + "," +
                    std::to_string(20.0 + 8.0 * rng.uniform()) + "," +
                    (rng.below(2) ? "yes" : "no") + "\n";
    }
    TempFile f(contents);
    auto table = load_cohort(f.path.string(), mixed_schema());
    auto t = fit_transform(table);
    auto dm = apply_transform(table, t);

    double mean = 0.0, ss = 0.0;
    const std::size_t n = dm.covariates.rows();
    for (std::size_t i = 0; i < n; ++i) mean += dm.covariates(i, 0);
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        ss += (dm.covariates(i, 0) - mean) * (dm.covariates(i, 0) - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    CHECK(std::abs(mean) < 1e-10);
    CHECK(std::abs(sd - 1.0) < 1e-10);

    // Pain passes through untouched.
    CHECK(dm.pain[0] == table.rows[0].pain);
}

TEST_CASE("one-hot encoding drops the reference level and keeps a stable width") {
    TempFile f(
        "opioid,pain,bmi,smoker\n1,5,20,A\n0,2,21,B\n1,8,22,C\n0,1,23,A\n1,4,24,B\n0,2,25,C\n");
    auto table = load_cohort(f.path.string(), mixed_schema());
    auto t = fit_transform(table);
    auto dm = apply_transform(table, t);
    // 1 continuous + (3 levels - 1)
    CHECK(dm.covariates.cols() == 3);
    CHECK(dm.column_names == std::vector<std::string>{"bmi", "smoker=B", "smoker=C"});
    // Level A encodes as all zeros.
    CHECK(dm.covariates(0, 1) == 0.0);
    CHECK(dm.covariates(0, 2) == 0.0);
    CHECK(dm.covariates(1, 1) == 1.0);
    CHECK(dm.covariates(2, 2) == 1.0);
}

TEST_CASE("unseen categorical levels map to zeros with a warning") {
    TempFile train_f("opioid,pain,bmi,smoker\n1,5,20,A\n0,2,21,B\n1,3,22,A\n");
    auto train_table = load_cohort(train_f.path.string(), mixed_schema());
    auto t = fit_transform(train_table);

    TempFile test_f("opioid,pain,bmi,smoker\n1,5,20,C\n");
    auto test_table = load_cohort(test_f.path.string(), mixed_schema());
    std::vector<std::string> warnings;
    auto dm = apply_transform(test_table, t, &warnings);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("unseen level") != std::string::npos);
    CHECK(dm.covariates(0, 1) == 0.0);
}

TEST_CASE("test-set rows never influence the fitted transform") {
    TempFile f("opioid,pain,bmi,smoker\n1,5,20,A\n0,2,24,B\n1,3,28,A\n0,7,30,B\n1,1,26,A\n");
    auto table = load_cohort(f.path.string(), mixed_schema());
    auto [train_t, test_t] = split(table, 0.6, 9);
    auto fitted = fit_transform(train_t);

    // Perturb the held-out rows; refitting on the same training rows gives
    // identical statistics.
    auto perturbed = test_t;
    for (auto& row : perturbed.rows) row.cells[0].number += 1000.0;
    auto refit = fit_transform(train_t);
    CHECK(refit.continuous[0].impute_value == fitted.continuous[0].impute_value);
    CHECK(refit.continuous[0].center == fitted.continuous[0].center);
    CHECK(refit.continuous[0].scale == fitted.continuous[0].scale);
}

TEST_CASE("apply refuses a mismatched schema") {
    TempFile f("opioid,pain,bmi,smoker\n1,5,20,A\n0,2,24,B\n");
    auto table = load_cohort(f.path.string(), mixed_schema());
    auto t = fit_transform(table);
    auto other = table;
    other.schema.covariates[0].name = "weight";
    for (auto& spec : other.schema.covariates) (void)spec;
    CHECK_THROWS_AS(apply_transform(other, t), ContractError);
}

TEST_CASE("split sizes follow the ceiling rule and partition the index set") {
    auto [a, b] = split_indices(10, 0.7, 1);
    CHECK(a.size() == 7);
    CHECK(b.size() == 3);
    std::vector<bool> seen(10, false);
    for (auto i : a) seen[i] = true;
    for (auto i : b) {
        CHECK_FALSE(seen[i]);
        seen[i] = true;
    }
    for (bool s : seen) CHECK(s);

    auto [a2, b2] = split_indices(10, 0.7, 1);
    CHECK(a == a2);
    auto [a3, b3] = split_indices(10, 0.7, 2);
    CHECK(a != a3);

    CHECK_THROWS_AS(split_indices(10, 0.0, 1), ConfigError);
    CHECK_THROWS_AS(split_indices(10, 1.0, 1), ConfigError);
}

TEST_CASE("balanced subsample keeps all cases and exactly as many controls") {
    std::vector<int> labels;
    for (int i = 0; i < 100; ++i) labels.push_back(1);
    for (int i = 0; i < 300; ++i) labels.push_back(0);
    auto idx = balanced_subsample(labels, 5);
    CHECK(idx.size() == 200);
    std::size_t cases = 0;
    for (auto i : idx)
        if (labels[i] == 1) ++cases;
    CHECK(cases == 100);

    // Two seeds share the case set but generally differ on controls.
    auto idx2 = balanced_subsample(labels, 6);
    CHECK(idx != idx2);
    std::vector<std::size_t> cases1, cases2;
    for (auto i : idx)
        if (labels[i] == 1) cases1.push_back(i);
    for (auto i : idx2)
        if (labels[i] == 1) cases2.push_back(i);
    CHECK(cases1 == cases2);
}

TEST_CASE("balanced subsample boundary and error cases") {
    std::vector<int> pair{1, 0};
    auto idx = balanced_subsample(pair, 1);
    CHECK(idx == std::vector<std::size_t>{0, 1});

    std::vector<int> inverted{1, 1, 0};
    CHECK_THROWS_AS(balanced_subsample(inverted, 1), ConfigError);
    std::vector<int> single{1, 1};
    CHECK_THROWS_AS(balanced_subsample(single, 1), ConfigError);
}

TEST_CASE("ensemble prediction averages member probabilities") {
    BalancedEnsemble ensemble;
    auto m = make_logistic_baseline(1);
    m.net_alpha.layers[0].bias[0] = std::log(0.2 / 0.8);  // p = 0.2 at pain 0
    auto m2 = make_logistic_baseline(1);
    m2.net_alpha.layers[0].bias[0] = std::log(0.6 / 0.4);  // p = 0.6
    ensemble.models = {m, m2};
    Subject s{0.0, {0.0}, std::nullopt};
    CHECK(ensemble_predict(ensemble, s) == doctest::Approx(0.4).epsilon(1e-12));

    BalancedEnsemble same;
    same.models = {m, m, m};
    CHECK(ensemble_predict(same, s) == doctest::Approx(predict(m, s)).epsilon(1e-15));

    BalancedEnsemble empty;
    CHECK_THROWS_AS(ensemble_predict(empty, s), ConfigError);
}

TEST_CASE("schema json round trip") {
    auto schema = mixed_schema();
    schema.covariates[1].levels = {"no", "yes"};
    auto text = serialize::schema_to_json(schema);
    auto back = serialize::schema_from_json(text);
    CHECK(back.pain_column == schema.pain_column);
    CHECK(back.label_column == schema.label_column);
    CHECK(back.covariates.size() == 2);
    CHECK(back.covariates[1].levels == schema.covariates[1].levels);
    CHECK(schema_hash(back) == schema_hash(schema));
}

TEST_CASE("design matrix converts to subjects") {
    TempFile f("opioid,pain,bmi,smoker\n1,5,20,A\n0,2,24,B\n1,3,28,A\n");
    auto table = load_cohort(f.path.string(), mixed_schema());
    auto t = fit_transform(table);
    auto dm = apply_transform(table, t);
    auto subjects = dm.to_subjects();
    REQUIRE(subjects.size() == 3);
    CHECK(subjects[0].pain == 5.0);
    CHECK(*subjects[0].label == 1);
    CHECK(subjects[0].covariates.size() == dm.covariates.cols());
}
