#include "blockplan/pipeline.hpp"

#include <cstdio>
#include <sstream>

#include "blockplan/assign.hpp"
#include "blockplan/errors.hpp"
#include "blockplan/parallel.hpp"
#include "blockplan/seeds.hpp"
#include "blockplan/symplan.hpp"

namespace blockplan {

TrialResult run_trial(const TrialSpec& trial, const PipelineParams& params,
                      std::size_t trial_index) {
    trial.check_feasible();
    TrialResult result;
    result.trial_id = trial.id;

    const std::uint64_t effort_seed = effort_seed_for(params.seed, trial_index);
    EffortParams ep = params.effort;
    ep.jobs = params.jobs;
    result.effort = estimate_effort(trial, params.M, effort_seed, ep);

    // Plan shape metrics from the first sample's state A.
    Scene sample0 = trial.has_scatter() ? sample_scattered_state(*trial.stateA_scatter, effort_seed)
                                        : *trial.stateA_scene;
    Assignment assignment = assign_blocks(sample0, trial.stateB);
    SymbolicPlan plan = plan_symbolic(sample0, trial.stateB, assignment);
    result.plan_length = static_cast<long>(plan.actions.size());
    result.assignment_distance = assignment.total_distance;

    result.risk = estimate_risk(trial.stateB, params.sigma, params.N,
                                risk_seed_for(params.seed, trial_index, params.sigma), params.sim,
                                params.jobs);
    return result;
}

SuiteResult run_suite(const std::vector<TrialSpec>& trials, const PipelineParams& params) {
    {
        std::set<std::string> ids;
        for (const TrialSpec& t : trials)
            if (!ids.insert(t.id).second)
                throw ValidationError("suite: duplicate trial id '" + t.id + "'");
    }

    std::vector<TrialResult> slots(trials.size());
    std::vector<std::string> errors(trials.size());
    PipelineParams inner = params;
    inner.jobs = 1;
    parallel_for(trials.size(), params.jobs, [&](std::size_t i) {
        try {
            slots[i] = run_trial(trials[i], inner, i);
        } catch (const Error& e) {
            errors[i] = e.what();
        }
    });

    SuiteResult suite;
    for (std::size_t i = 0; i < trials.size(); ++i) {
        if (errors[i].empty())
            suite.results.push_back(std::move(slots[i]));
        else
            suite.failures.push_back({trials[i].id, errors[i]});
    }
    return suite;
}

std::string suite_table_csv(const SuiteResult& suite) {
    std::ostringstream os;
    os << "trial,effort_mean,effort_std,risk,plan_length,assignment_distance\n";
    char buf[256];
    for (const TrialResult& r : suite.results) {
        std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g,%ld,%.17g\n", r.trial_id.c_str(),
                      r.effort.sample_mean, r.effort.sample_std, r.risk.risk, r.plan_length,
                      r.assignment_distance);
        os << buf;
    }
    return os.str();
}

}  // namespace blockplan
