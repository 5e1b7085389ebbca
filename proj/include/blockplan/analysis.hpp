#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "blockplan/physics.hpp"
#include "blockplan/scene.hpp"
#include "blockplan/trajectory.hpp"

namespace blockplan {

struct HumanDataset {
    std::string name;
    std::vector<std::string> participants;
    std::vector<std::string> trials;
    std::vector<std::vector<double>> responses;  // participant x trial
};

// CSV with header `participant,trial,response`. Participants missing any
// trial are dropped (reported in *dropped_incomplete when non-null). At
// least 2 trials and 2 participants must survive.
HumanDataset load_human_csv(const std::string& path, const std::string& name = "",
                            std::vector<std::string>* dropped_incomplete = nullptr);

struct ZscoreResult {
    std::vector<std::string> trials;
    std::vector<std::vector<double>> zrows;  // per kept participant
    std::vector<double> trial_means;
    std::vector<std::string> dropped_constant;
};

// Per-participant standardization (population std), then per-trial means.
// Constant responders are dropped; dropping everyone is an error.
ZscoreResult zscore_dataset(const HumanDataset& dataset);
std::vector<double> zscore_and_average(const HumanDataset& dataset);

struct ModelFit {
    std::vector<double> beta;  // intercept first
    double sigma = 0.0;        // noise level used for R, when applicable
    double rmse = 0.0;
    double pearson_r = 0.0;
    std::vector<double> predictions;
};

double pearson(const std::vector<double>& a, const std::vector<double>& b);

// Ordinary least squares for y ~ 1 + E(1-R) + E*R. Rank deficiency (smallest
// singular value < 1e-10 x largest) raises SingularFitError.
ModelFit fit_full(const std::vector<double>& E, const std::vector<double>& R,
                  const std::vector<double>& y);
ModelFit fit_effort_only(const std::vector<double>& E, const std::vector<double>& y);
ModelFit fit_risk_only(const std::vector<double>& R, const std::vector<double>& y);

std::vector<double> default_sigma_grid();  // 0.05, 0.055, ..., 0.1

struct SigmaGridEntry {
    double sigma = 0.0;
    double rmse = 0.0;
    ModelFit fit;
};

struct SigmaGridResult {
    std::vector<SigmaGridEntry> entries;  // grid order
    double best_sigma = 0.0;              // argmin rmse, ties to smaller sigma
};

struct GridSearchParams {
    int N = 100;
    int M = 30;
    std::uint64_t seed = 0;
    SimConfig sim;
    EffortParams effort;
    int jobs = 1;
};

// Recomputes R per sigma (E once; it does not depend on sigma), fits the
// full model against the dataset's z-scored trial means, reports the rmse
// table and the arg-min sigma.
SigmaGridResult grid_search_sigma(const std::vector<TrialSpec>& trials,
                                  const HumanDataset& dataset, const std::vector<double>& grid,
                                  const GridSearchParams& params);

struct BootstrapModelSummary {
    std::string name;
    double median_r = 0.0;
    double lo_r = 0.0;  // 2.5 percentile
    double hi_r = 0.0;  // 97.5 percentile
    std::vector<double> correlations;  // per resample
};

struct BootstrapReport {
    int B = 0;
    int redrawn = 0;  // degenerate resamples redrawn
    std::vector<BootstrapModelSummary> models;
    // P(correlation of a > correlation of b) across resamples, ties at 0.5.
    std::map<std::pair<std::string, std::string>, double> exceedance;
};

// Resample participant indices for bootstrap draw (b, attempt).
std::vector<std::size_t> bootstrap_resample_indices(std::uint64_t seed, int b, int attempt,
                                                    std::size_t n);

// B participant resamples; per resample re-averages z-rows and correlates
// each model's predictions with the resampled trial means.
BootstrapReport bootstrap_compare(const HumanDataset& dataset,
                                  const std::map<std::string, std::vector<double>>& predictions,
                                  int B, std::uint64_t seed, int jobs = 1);

std::string fits_to_json(const std::vector<std::pair<std::string, ModelFit>>& fits,
                         const std::vector<std::string>& trials);
std::string fits_to_csv(const std::vector<std::pair<std::string, ModelFit>>& fits,
                        const std::vector<std::string>& trials,
                        const std::vector<double>& trial_means);

}  // namespace blockplan
