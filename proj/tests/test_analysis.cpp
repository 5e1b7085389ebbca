#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "blockplan/analysis.hpp"
#include "blockplan/errors.hpp"
#include "blockplan/rng.hpp"

using namespace blockplan;

namespace {

HumanDataset make_dataset(std::vector<std::vector<double>> rows) {
    HumanDataset ds;
    ds.name = "synthetic";
    const std::size_t trials = rows.front().size();
    for (std::size_t t = 0; t < trials; ++t) ds.trials.push_back("T" + std::to_string(t));
    for (std::size_t p = 0; p < rows.size(); ++p)
        ds.participants.push_back("p" + std::to_string(p));
    ds.responses = std::move(rows);
    return ds;
}

std::string write_temp_csv(const std::string& name, const std::string& body) {
    std::string path = "/tmp/blockplan_test_" + name + ".csv";
    std::ofstream out(path);
    out << body;
    return path;
}

}  // namespace

TEST_CASE("zscore: single participant row standardizes to unit variance") {
    HumanDataset ds = make_dataset({{1, 2, 3}, {1, 2, 3}});
    ZscoreResult z = zscore_dataset(ds);
    REQUIRE(z.zrows.size() == 2);
    CHECK(z.zrows[0][0] == doctest::Approx(-1.2247448713915890));
    CHECK(z.zrows[0][1] == doctest::Approx(0.0));
    CHECK(z.zrows[0][2] == doctest::Approx(1.2247448713915890));
    CHECK(z.trial_means[0] == doctest::Approx(-1.2247448713915890));
}

TEST_CASE("zscore: constant responders are dropped") {
    HumanDataset ds = make_dataset({{5, 5, 5}, {1, 2, 3}});
    ZscoreResult z = zscore_dataset(ds);
    CHECK(z.dropped_constant == std::vector<std::string>{"p0"});
    CHECK(z.zrows.size() == 1);

    HumanDataset all_constant = make_dataset({{5, 5, 5}, {2, 2, 2}});
    CHECK_THROWS_AS(zscore_dataset(all_constant), ValidationError);
}

TEST_CASE("zscore: affine rescaling of a participant changes nothing") {
    HumanDataset a = make_dataset({{1, 2, 5}, {4, 0, 2}});
    HumanDataset b = make_dataset({{10, 20, 50}, {4.5, 2.5, 3.5}});  // 10x and 0.5x+2.5
    std::vector<double> ma = zscore_and_average(a);
    std::vector<double> mb = zscore_and_average(b);
    for (std::size_t i = 0; i < ma.size(); ++i) CHECK(ma[i] == doctest::Approx(mb[i]).epsilon(1e-12));
}

TEST_CASE("fit_full: recovers noiseless synthetic coefficients") {
    Rng rng(6);
    std::vector<double> E, R, y;
    for (int i = 0; i < 24; ++i) {
        E.push_back(rng.uniform(0.5, 10));
        R.push_back(rng.uniform01());
        y.push_back(0.5 + 2.0 * E.back() * (1 - R.back()) + 7.0 * E.back() * R.back());
    }
    ModelFit fit = fit_full(E, R, y);
    REQUIRE(fit.beta.size() == 3);
    CHECK(std::abs(fit.beta[0] - 0.5) < 1e-8);
    CHECK(std::abs(fit.beta[1] - 2.0) < 1e-8);
    CHECK(std::abs(fit.beta[2] - 7.0) < 1e-8);
    CHECK(fit.rmse < 1e-8);
    CHECK(fit.pearson_r == doctest::Approx(1.0));
}

TEST_CASE("fit_full: all-zero risk makes the design singular") {
    std::vector<double> E{1, 2, 3, 4}, R{0, 0, 0, 0}, y{1, 2, 3, 4};
    CHECK_THROWS_AS(fit_full(E, R, y), SingularFitError);
}

TEST_CASE("fit_full: permutation invariance of coefficients") {
    Rng rng(77);
    std::vector<double> E, R, y;
    for (int i = 0; i < 12; ++i) {
        E.push_back(rng.uniform(0.5, 10));
        R.push_back(rng.uniform01());
        y.push_back(1 + E.back() * R.back() + rng.normal(0, 0.1));
    }
    ModelFit fit = fit_full(E, R, y);
    // Rotate the trials.
    std::vector<double> E2(E.begin() + 3, E.end()), R2(R.begin() + 3, R.end()),
        y2(y.begin() + 3, y.end());
    E2.insert(E2.end(), E.begin(), E.begin() + 3);
    R2.insert(R2.end(), R.begin(), R.begin() + 3);
    y2.insert(y2.end(), y.begin(), y.begin() + 3);
    ModelFit fit2 = fit_full(E2, R2, y2);
    for (int j = 0; j < 3; ++j) CHECK(fit.beta[j] == doctest::Approx(fit2.beta[j]).epsilon(1e-10));
    CHECK(fit.rmse == doctest::Approx(fit2.rmse).epsilon(1e-10));
}

TEST_CASE("lesioned fits: noiseless recovery and sign-carrying correlation") {
    std::vector<double> E{1, 3, 2, 5, 4}, y;
    for (double e : E) y.push_back(3.0 * e + 1.0);
    ModelFit fit = fit_effort_only(E, y);
    CHECK(fit.beta[0] == doctest::Approx(1.0));
    CHECK(fit.beta[1] == doctest::Approx(3.0));
    CHECK(fit.pearson_r == doctest::Approx(1.0));

    std::vector<double> R{0.9, 0.1, 0.5, 0.3, 0.6}, y2;
    for (double r : R) y2.push_back(-2.0 * r + 4.0);
    ModelFit rf = fit_risk_only(R, y2);
    CHECK(std::abs(rf.pearson_r) == doctest::Approx(1.0));
    CHECK(pearson(R, y2) == doctest::Approx(-1.0));

    std::vector<double> Rconst{0.5, 0.5, 0.5, 0.5, 0.5};
    CHECK_THROWS_AS(fit_risk_only(Rconst, y2), SingularFitError);
}

TEST_CASE("ols: residuals orthogonal to the regressors") {
    Rng rng(4);
    std::vector<double> E, R, y;
    for (int i = 0; i < 30; ++i) {
        E.push_back(rng.uniform(0, 5));
        R.push_back(rng.uniform01());
        y.push_back(rng.normal(0, 1) + E.back());
    }
    ModelFit fit = fit_full(E, R, y);
    std::vector<std::vector<double>> cols(3, std::vector<double>(y.size(), 1.0));
    for (std::size_t i = 0; i < y.size(); ++i) {
        cols[1][i] = E[i] * (1 - R[i]);
        cols[2][i] = E[i] * R[i];
    }
    for (const auto& col : cols) {
        double dot = 0.0, res_norm = 0.0, col_norm = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            double res = y[i] - fit.predictions[i];
            dot += res * col[i];
            res_norm += res * res;
            col_norm += col[i] * col[i];
        }
        CHECK(std::abs(dot) <= 1e-8 * std::sqrt(res_norm * col_norm) + 1e-12);
    }
}

TEST_CASE("ols: full model rmse never exceeds lesioned rmse") {
    Rng rng(11);
    for (int round = 0; round < 25; ++round) {
        std::vector<double> E, R, y;
        for (int i = 0; i < 16; ++i) {
            E.push_back(rng.uniform(0.1, 8));
            R.push_back(rng.uniform01());
            y.push_back(rng.normal(0, 1) + 0.3 * E.back() + 0.8 * R.back());
        }
        ModelFit full = fit_full(E, R, y);
        ModelFit eff = fit_effort_only(E, y);
        ModelFit rsk = fit_risk_only(R, y);
        CHECK(full.rmse <= eff.rmse + 1e-12);
        CHECK(full.rmse <= rsk.rmse + 1e-12);
    }
}

TEST_CASE("default sigma grid enumerates the eleven canonical values") {
    std::vector<double> grid = default_sigma_grid();
    REQUIRE(grid.size() == 11);
    for (int k = 0; k < 11; ++k) CHECK(grid[k] == doctest::Approx(0.05 + 0.005 * k).epsilon(1e-12));
    CHECK(std::find_if(grid.begin(), grid.end(),
                       [](double s) { return std::abs(s - 0.065) < 1e-12; }) != grid.end());
}

TEST_CASE("human csv: loads, drops incomplete rows, validates header") {
    std::string path = write_temp_csv("ok", R"(participant,trial,response
p1,a,1.0
p1,b,2.0
p2,a,4.0
p2,b,5.0
p3,a,9.0
)");
    std::vector<std::string> dropped;
    HumanDataset ds = load_human_csv(path, "d", &dropped);
    CHECK(ds.participants == std::vector<std::string>{"p1", "p2"});
    CHECK(dropped == std::vector<std::string>{"p3"});
    CHECK(ds.trials == std::vector<std::string>{"a", "b"});

    std::string bad = write_temp_csv("bad_header", "participant,trial,value\np,a,1\n");
    CHECK_THROWS_AS(load_human_csv(bad), ParseError);

    std::string dup = write_temp_csv("dup", "participant,trial,response\np,a,1\np,a,2\n");
    CHECK_THROWS_AS(load_human_csv(dup), ParseError);
}

TEST_CASE("bootstrap: identity resample reproduces the plain correlation") {
    HumanDataset ds = make_dataset({{1, 2, 3, 5}, {2, 1, 4, 6}});
    ZscoreResult z = zscore_dataset(ds);
    std::map<std::string, std::vector<double>> preds;
    preds["m"] = {0.1, 0.3, 0.5, 0.9};
    double plain = pearson(preds["m"], z.trial_means);

    // Find a seed whose single resample is the identity multiset {0,1}.
    std::uint64_t seed = 0;
    bool found = false;
    for (; seed < 1000; ++seed) {
        auto idx = bootstrap_resample_indices(seed, 0, 0, 2);
        if ((idx[0] == 0 && idx[1] == 1) || (idx[0] == 1 && idx[1] == 0)) {
            found = true;
            break;
        }
    }
    REQUIRE(found);
    BootstrapReport report = bootstrap_compare(ds, preds, 1, seed);
    CHECK(report.models[0].median_r == doctest::Approx(plain).epsilon(1e-12));
}

TEST_CASE("bootstrap: identical predictions tie at exceedance one half") {
    HumanDataset ds = make_dataset({{1, 2, 3, 5}, {2, 1, 4, 6}, {0, 2, 3, 4}});
    std::map<std::string, std::vector<double>> preds;
    preds["a"] = {0.1, 0.3, 0.5, 0.9};
    preds["b"] = {0.1, 0.3, 0.5, 0.9};
    BootstrapReport report = bootstrap_compare(ds, preds, 200, 5);
    CHECK(report.exceedance.at({"a", "b"}) == doctest::Approx(0.5));
    CHECK(report.exceedance.at({"b", "a"}) == doctest::Approx(0.5));
}

TEST_CASE("bootstrap: reproducible bit for bit and ordered percentiles") {
    Rng rng(3);
    std::vector<std::vector<double>> rows;
    for (int p = 0; p < 12; ++p) {
        std::vector<double> row;
        for (int t = 0; t < 8; ++t) row.push_back(rng.normal(t * 0.5, 1.0));
        rows.push_back(row);
    }
    HumanDataset ds = make_dataset(rows);
    std::map<std::string, std::vector<double>> preds;
    preds["up"] = {0, 1, 2, 3, 4, 5, 6, 7};
    preds["noise"] = {0.3, -1, 2, 0.1, 4, -0.5, 1, 0.2};

    BootstrapReport r1 = bootstrap_compare(ds, preds, 300, 9, 2);
    BootstrapReport r2 = bootstrap_compare(ds, preds, 300, 9, 1);
    for (std::size_t m = 0; m < r1.models.size(); ++m) {
        CHECK(r1.models[m].median_r == r2.models[m].median_r);
        CHECK(r1.models[m].lo_r == r2.models[m].lo_r);
        CHECK(r1.models[m].hi_r == r2.models[m].hi_r);
        CHECK(r1.models[m].lo_r <= r1.models[m].median_r);
        CHECK(r1.models[m].median_r <= r1.models[m].hi_r);
    }
    CHECK(r1.exceedance == r2.exceedance);
    CHECK(r1.exceedance.at({"up", "noise"}) > 0.9);  // up matches the generating trend
}
