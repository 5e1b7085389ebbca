#include "blockplan/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "blockplan/errors.hpp"
#include "blockplan/parallel.hpp"
#include "blockplan/risk.hpp"
#include "blockplan/seeds.hpp"

namespace blockplan {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

HumanDataset load_human_csv(const std::string& path, const std::string& name,
                            std::vector<std::string>* dropped_incomplete) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw ParseError("'" + path + "': empty file");
    {
        auto header = split_csv_line(trim(line));
        if (header.size() != 3 || trim(header[0]) != "participant" || trim(header[1]) != "trial" ||
            trim(header[2]) != "response")
            throw ParseError("'" + path + "': expected header participant,trial,response");
    }

    std::map<std::string, std::map<std::string, double>> rows;
    std::vector<std::string> participant_order, trial_order;
    std::set<std::string> seen_participants, seen_trials;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty()) continue;
        auto fields = split_csv_line(t);
        if (fields.size() != 3)
            throw ParseError("'" + path + "' line " + std::to_string(line_no) +
                             ": expected participant,trial,response");
        std::string participant = trim(fields[0]);
        std::string trial = trim(fields[1]);
        double response = 0.0;
        try {
            std::size_t used = 0;
            response = std::stod(trim(fields[2]), &used);
            if (used != trim(fields[2]).size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ParseError("'" + path + "' line " + std::to_string(line_no) +
                             ": response is not a number");
        }
        if (rows[participant].count(trial))
            throw ParseError("'" + path + "' line " + std::to_string(line_no) + ": duplicate (" +
                             participant + ", " + trial + ")");
        rows[participant][trial] = response;
        if (seen_participants.insert(participant).second) participant_order.push_back(participant);
        if (seen_trials.insert(trial).second) trial_order.push_back(trial);
    }

    HumanDataset ds;
    ds.name = name.empty() ? path : name;
    ds.trials = trial_order;
    for (const std::string& p : participant_order) {
        const auto& row = rows[p];
        bool complete = true;
        for (const std::string& t : trial_order)
            if (!row.count(t)) complete = false;
        if (!complete) {
            if (dropped_incomplete) dropped_incomplete->push_back(p);
            continue;
        }
        ds.participants.push_back(p);
        std::vector<double> values;
        values.reserve(trial_order.size());
        for (const std::string& t : trial_order) values.push_back(row.at(t));
        ds.responses.push_back(std::move(values));
    }

    if (ds.trials.size() < 2)
        throw ValidationError("'" + path + "': needs at least 2 trials");
    if (ds.participants.size() < 2)
        throw ValidationError("'" + path + "': needs at least 2 complete participants");
    return ds;
}

ZscoreResult zscore_dataset(const HumanDataset& dataset) {
    ZscoreResult r;
    r.trials = dataset.trials;
    const std::size_t t = dataset.trials.size();
    for (std::size_t p = 0; p < dataset.participants.size(); ++p) {
        const auto& row = dataset.responses[p];
        double mean = std::accumulate(row.begin(), row.end(), 0.0) / t;
        double var = 0.0;
        for (double v : row) var += (v - mean) * (v - mean);
        var /= t;  // population variance
        if (var <= 0.0) {
            r.dropped_constant.push_back(dataset.participants[p]);
            continue;
        }
        double std_dev = std::sqrt(var);
        std::vector<double> z(t);
        for (std::size_t i = 0; i < t; ++i) z[i] = (row[i] - mean) / std_dev;
        r.zrows.push_back(std::move(z));
    }
    if (r.zrows.empty())
        throw ValidationError("dataset '" + dataset.name +
                              "': all participants dropped (constant responses)");
    r.trial_means.assign(t, 0.0);
    for (const auto& z : r.zrows)
        for (std::size_t i = 0; i < t; ++i) r.trial_means[i] += z[i];
    for (double& m : r.trial_means) m /= static_cast<double>(r.zrows.size());
    return r;
}

std::vector<double> zscore_and_average(const HumanDataset& dataset) {
    return zscore_dataset(dataset).trial_means;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw ValidationError("pearson: vectors must have equal length >= 2");
    const std::size_t n = a.size();
    double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double num = 0.0, da = 0.0, db = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (a[i] - ma) * (b[i] - mb);
        da += (a[i] - ma) * (a[i] - ma);
        db += (b[i] - mb) * (b[i] - mb);
    }
    if (da <= 0.0 || db <= 0.0)
        throw ValidationError("pearson: zero variance input");
    return num / std::sqrt(da * db);
}

namespace {

// Singular values of a small matrix via one-sided Jacobi (columns of R from
// the QR of the design; avoids the precision loss of forming A^T A).
std::vector<double> singular_values(std::vector<std::vector<double>> a, std::size_t rows,
                                    std::size_t cols) {
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool converged = true;
        for (std::size_t p = 0; p < cols; ++p) {
            for (std::size_t q = p + 1; q < cols; ++q) {
                double app = 0.0, aqq = 0.0, apq = 0.0;
                for (std::size_t i = 0; i < rows; ++i) {
                    app += a[i][p] * a[i][p];
                    aqq += a[i][q] * a[i][q];
                    apq += a[i][p] * a[i][q];
                }
                if (std::abs(apq) <= 1e-30 + 1e-15 * std::sqrt(app * aqq)) continue;
                converged = false;
                double tau = (aqq - app) / (2.0 * apq);
                double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = c * t;
                for (std::size_t i = 0; i < rows; ++i) {
                    double aip = a[i][p];
                    double aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
            }
        }
        if (converged) break;
    }
    std::vector<double> sv(cols, 0.0);
    for (std::size_t j = 0; j < cols; ++j) {
        double norm2 = 0.0;
        for (std::size_t i = 0; i < rows; ++i) norm2 += a[i][j] * a[i][j];
        sv[j] = std::sqrt(norm2);
    }
    std::sort(sv.rbegin(), sv.rend());
    return sv;
}

// Least squares via Householder QR; columns are the design regressors.
std::vector<double> solve_ols(const std::vector<std::vector<double>>& columns,
                              const std::vector<double>& y) {
    const std::size_t n = y.size();
    const std::size_t k = columns.size();
    if (n < k + 1)
        throw ValidationError("fit: needs at least " + std::to_string(k + 1) + " observations");

    // Working copy, row-major n x k, plus rhs.
    std::vector<std::vector<double>> a(n, std::vector<double>(k, 0.0));
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < n; ++i) a[i][j] = columns[j][i];

    {
        auto sv = singular_values(a, n, k);
        if (sv.front() <= 0.0 || sv.back() < 1e-10 * sv.front())
            throw SingularFitError("fit: design matrix is rank deficient");
    }

    std::vector<double> rhs = y;
    for (std::size_t j = 0; j < k; ++j) {
        double norm2 = 0.0;
        for (std::size_t i = j; i < n; ++i) norm2 += a[i][j] * a[i][j];
        double alpha = std::sqrt(norm2);
        if (a[j][j] > 0.0) alpha = -alpha;
        std::vector<double> v(n, 0.0);
        double vnorm2 = 0.0;
        for (std::size_t i = j; i < n; ++i) {
            v[i] = a[i][j] - (i == j ? alpha : 0.0);
            vnorm2 += v[i] * v[i];
        }
        if (vnorm2 <= 0.0) continue;
        for (std::size_t c = j; c < k; ++c) {
            double dot = 0.0;
            for (std::size_t i = j; i < n; ++i) dot += v[i] * a[i][c];
            double f = 2.0 * dot / vnorm2;
            for (std::size_t i = j; i < n; ++i) a[i][c] -= f * v[i];
        }
        double dot = 0.0;
        for (std::size_t i = j; i < n; ++i) dot += v[i] * rhs[i];
        double f = 2.0 * dot / vnorm2;
        for (std::size_t i = j; i < n; ++i) rhs[i] -= f * v[i];
    }

    std::vector<double> beta(k, 0.0);
    for (std::size_t j = k; j-- > 0;) {
        double s = rhs[j];
        for (std::size_t c = j + 1; c < k; ++c) s -= a[j][c] * beta[c];
        beta[j] = s / a[j][j];
    }
    return beta;
}

ModelFit fit_columns(const std::vector<std::vector<double>>& columns, const std::vector<double>& y) {
    std::vector<double> beta = solve_ols(columns, y);
    ModelFit fit;
    fit.beta = beta;
    fit.predictions.assign(y.size(), 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        double p = 0.0;
        for (std::size_t j = 0; j < beta.size(); ++j) p += beta[j] * columns[j][i];
        fit.predictions[i] = p;
    }
    double sse = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        double r = y[i] - fit.predictions[i];
        sse += r * r;
    }
    fit.rmse = std::sqrt(sse / y.size());
    // Perfectly flat predictions have no defined correlation; report 0.
    double var_p = 0.0, mean_p = std::accumulate(fit.predictions.begin(), fit.predictions.end(), 0.0) /
                                     fit.predictions.size();
    for (double p : fit.predictions) var_p += (p - mean_p) * (p - mean_p);
    fit.pearson_r = var_p > 0.0 ? pearson(fit.predictions, y) : 0.0;
    return fit;
}

void check_lengths(std::initializer_list<const std::vector<double>*> vecs) {
    std::size_t n = (*vecs.begin())->size();
    for (const auto* v : vecs)
        if (v->size() != n) throw ValidationError("fit: input vectors differ in length");
    if (n < 3) throw ValidationError("fit: needs at least 3 trials");
}

}  // namespace

ModelFit fit_full(const std::vector<double>& E, const std::vector<double>& R,
                  const std::vector<double>& y) {
    check_lengths({&E, &R, &y});
    const std::size_t n = y.size();
    std::vector<std::vector<double>> cols(3, std::vector<double>(n, 1.0));
    for (std::size_t i = 0; i < n; ++i) {
        cols[1][i] = E[i] * (1.0 - R[i]);
        cols[2][i] = E[i] * R[i];
    }
    return fit_columns(cols, y);
}

ModelFit fit_effort_only(const std::vector<double>& E, const std::vector<double>& y) {
    check_lengths({&E, &y});
    std::vector<std::vector<double>> cols(2, std::vector<double>(y.size(), 1.0));
    cols[1] = E;
    return fit_columns(cols, y);
}

ModelFit fit_risk_only(const std::vector<double>& R, const std::vector<double>& y) {
    check_lengths({&R, &y});
    std::vector<std::vector<double>> cols(2, std::vector<double>(y.size(), 1.0));
    cols[1] = R;
    return fit_columns(cols, y);
}

std::vector<double> default_sigma_grid() {
    std::vector<double> grid;
    for (int k = 0; k <= 10; ++k) grid.push_back(0.05 + 0.005 * k);
    return grid;
}

SigmaGridResult grid_search_sigma(const std::vector<TrialSpec>& trials, const HumanDataset& dataset,
                                  const std::vector<double>& grid, const GridSearchParams& params) {
    if (grid.empty()) throw ValidationError("grid search: empty sigma grid");
    if (trials.empty()) throw ValidationError("grid search: no trials");

    // Align the dataset's trial means with the trial list.
    std::vector<double> means = zscore_and_average(dataset);
    std::vector<double> y;
    for (const TrialSpec& t : trials) {
        auto it = std::find(dataset.trials.begin(), dataset.trials.end(), t.id);
        if (it == dataset.trials.end())
            throw ValidationError("grid search: dataset '" + dataset.name + "' has no trial '" +
                                  t.id + "'");
        y.push_back(means[it - dataset.trials.begin()]);
    }

    // E does not depend on sigma; compute once.
    std::vector<double> E(trials.size(), 0.0);
    for (std::size_t i = 0; i < trials.size(); ++i) {
        EffortParams ep = params.effort;
        ep.jobs = params.jobs;
        E[i] = estimate_effort(trials[i], params.M, effort_seed_for(params.seed, i), ep).sample_mean;
    }

    SigmaGridResult result;
    result.entries.resize(grid.size());
    std::vector<std::string> errors(grid.size());
    parallel_for(grid.size(), params.jobs, [&](std::size_t g) {
        double sigma = grid[g];
        std::vector<double> R(trials.size(), 0.0);
        for (std::size_t i = 0; i < trials.size(); ++i) {
            R[i] = estimate_risk(trials[i].stateB, sigma, params.N,
                                 risk_seed_for(params.seed, i, sigma), params.sim, 1)
                       .risk;
        }
        try {
            SigmaGridEntry entry;
            entry.sigma = sigma;
            entry.fit = fit_full(E, R, y);
            entry.fit.sigma = sigma;
            entry.rmse = entry.fit.rmse;
            result.entries[g] = std::move(entry);
        } catch (const Error& e) {
            errors[g] = e.what();
        }
    });
    for (std::size_t g = 0; g < grid.size(); ++g)
        if (!errors[g].empty())
            throw ValidationError("grid search at sigma=" + std::to_string(grid[g]) + ": " +
                                  errors[g]);

    std::size_t best = 0;
    for (std::size_t g = 1; g < grid.size(); ++g)
        if (result.entries[g].rmse < result.entries[best].rmse) best = g;
    result.best_sigma = result.entries[best].sigma;
    return result;
}

std::vector<std::size_t> bootstrap_resample_indices(std::uint64_t seed, int b, int attempt,
                                                    std::size_t n) {
    Rng rng(derive_seed(seed, 0xB007000000000000ULL ^ (static_cast<std::uint64_t>(b) * 1000003ULL +
                                                       static_cast<std::uint64_t>(attempt))));
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = rng.uniform_index(n);
    return idx;
}

BootstrapReport bootstrap_compare(const HumanDataset& dataset,
                                  const std::map<std::string, std::vector<double>>& predictions,
                                  int B, std::uint64_t seed, int jobs) {
    if (B < 1) throw ValidationError("bootstrap: B must be >= 1");
    if (predictions.empty()) throw ValidationError("bootstrap: no model predictions");

    ZscoreResult z = zscore_dataset(dataset);
    const std::size_t n_participants = z.zrows.size();
    const std::size_t n_trials = z.trials.size();
    for (const auto& [name, pred] : predictions)
        if (pred.size() != n_trials)
            throw ValidationError("bootstrap: predictions for '" + name +
                                  "' not aligned with trials");

    std::vector<std::string> model_names;
    for (const auto& [name, pred] : predictions) model_names.push_back(name);

    std::vector<std::vector<double>> rs(model_names.size(), std::vector<double>(B, 0.0));
    std::vector<int> redraws(B, 0);

    parallel_for(B, jobs, [&](std::size_t b) {
        std::vector<double> means(n_trials, 0.0);
        for (int attempt = 0;; ++attempt) {
            if (attempt >= 1000)
                throw ValidationError("bootstrap: could not draw a non-degenerate resample");
            auto idx = bootstrap_resample_indices(seed, static_cast<int>(b), attempt, n_participants);
            std::fill(means.begin(), means.end(), 0.0);
            for (std::size_t i : idx)
                for (std::size_t t = 0; t < n_trials; ++t) means[t] += z.zrows[i][t];
            for (double& m : means) m /= static_cast<double>(n_participants);
            double mu = std::accumulate(means.begin(), means.end(), 0.0) / n_trials;
            double var = 0.0;
            for (double m : means) var += (m - mu) * (m - mu);
            if (var > 0.0) break;
            ++redraws[b];
        }
        for (std::size_t m = 0; m < model_names.size(); ++m)
            rs[m][b] = pearson(predictions.at(model_names[m]), means);
    });

    auto percentile = [](std::vector<double> v, double p) {
        std::sort(v.begin(), v.end());
        if (v.size() == 1) return v[0];
        double pos = p * (v.size() - 1);
        std::size_t lo = static_cast<std::size_t>(pos);
        std::size_t hi = std::min(lo + 1, v.size() - 1);
        double frac = pos - lo;
        return v[lo] * (1.0 - frac) + v[hi] * frac;
    };

    BootstrapReport report;
    report.B = B;
    report.redrawn = std::accumulate(redraws.begin(), redraws.end(), 0);
    for (std::size_t m = 0; m < model_names.size(); ++m) {
        BootstrapModelSummary s;
        s.name = model_names[m];
        s.median_r = percentile(rs[m], 0.5);
        s.lo_r = percentile(rs[m], 0.025);
        s.hi_r = percentile(rs[m], 0.975);
        s.correlations = rs[m];
        report.models.push_back(std::move(s));
    }
    for (std::size_t a = 0; a < model_names.size(); ++a) {
        for (std::size_t c = 0; c < model_names.size(); ++c) {
            if (a == c) continue;
            double wins = 0.0;
            for (int b = 0; b < B; ++b) {
                if (rs[a][b] > rs[c][b])
                    wins += 1.0;
                else if (rs[a][b] == rs[c][b])
                    wins += 0.5;
            }
            report.exceedance[{model_names[a], model_names[c]}] = wins / B;
        }
    }
    return report;
}

std::string fits_to_json(const std::vector<std::pair<std::string, ModelFit>>& fits,
                         const std::vector<std::string>& trials) {
    nlohmann::json j;
    for (const auto& [name, fit] : fits) {
        nlohmann::json jf;
        jf["beta"] = fit.beta;
        if (fit.sigma > 0.0) jf["sigma"] = fit.sigma;
        jf["rmse"] = fit.rmse;
        jf["pearson_r"] = fit.pearson_r;
        nlohmann::json preds;
        for (std::size_t i = 0; i < trials.size(); ++i) preds[trials[i]] = fit.predictions[i];
        jf["predictions"] = preds;
        j[name] = jf;
    }
    return j.dump(2) + "\n";
}

std::string fits_to_csv(const std::vector<std::pair<std::string, ModelFit>>& fits,
                        const std::vector<std::string>& trials,
                        const std::vector<double>& trial_means) {
    std::ostringstream os;
    os << "trial,human_mean";
    for (const auto& [name, fit] : fits) os << "," << name;
    os << "\n";
    char buf[64];
    for (std::size_t i = 0; i < trials.size(); ++i) {
        os << trials[i];
        std::snprintf(buf, sizeof(buf), ",%.17g", trial_means[i]);
        os << buf;
        for (const auto& [name, fit] : fits) {
            std::snprintf(buf, sizeof(buf), ",%.17g", fit.predictions[i]);
            os << buf;
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace blockplan
