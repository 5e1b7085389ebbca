#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "blockplan/analysis.hpp"
#include "blockplan/risk.hpp"
#include "blockplan/scene.hpp"
#include "blockplan/trajectory.hpp"

namespace blockplan {

struct PipelineParams {
    double sigma = 0.065;
    int N = 100;
    int M = 30;
    std::uint64_t seed = 0;
    SimConfig sim;
    EffortParams effort;
    int jobs = 1;
};

struct TrialResult {
    std::string trial_id;
    EffortEstimate effort;
    RiskEstimate risk;
    long plan_length = 0;             // of the first effort sample
    double assignment_distance = 0.0; // likewise
};

// Full per-trial pipeline: effort over M scatter samples, risk over N
// perturbed simulations of state B. Deterministic given (params.seed,
// trial_index); run_suite passes each trial's position as trial_index.
TrialResult run_trial(const TrialSpec& trial, const PipelineParams& params,
                      std::size_t trial_index = 0);

struct SuiteFailure {
    std::string trial_id;
    std::string message;
};

struct SuiteResult {
    std::vector<TrialResult> results;  // successful trials, input order
    std::vector<SuiteFailure> failures;
};

SuiteResult run_suite(const std::vector<TrialSpec>& trials, const PipelineParams& params);

// E/R table: trial,effort_mean,effort_std,risk,plan_length,assignment_distance
std::string suite_table_csv(const SuiteResult& suite);

// The bundled 24-trial stimulus set (12 easy/hard pairs).
std::vector<TrialSpec> bundled_trials();

}  // namespace blockplan
