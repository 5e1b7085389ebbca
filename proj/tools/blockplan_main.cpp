#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "blockplan/analysis.hpp"
#include "blockplan/assign.hpp"
#include "blockplan/errors.hpp"
#include "blockplan/parallel.hpp"
#include "blockplan/pipeline.hpp"
#include "blockplan/risk.hpp"
#include "blockplan/seeds.hpp"
#include "blockplan/symplan.hpp"

namespace {

using namespace blockplan;

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << text;
}

void emit(const std::string& output_path, const std::string& text) {
    if (output_path.empty())
        std::cout << text;
    else
        write_file(output_path, text);
}

int default_jobs() {
    if (const char* env = std::getenv("BLOCKPLAN_JOBS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return hardware_jobs();
}

std::vector<double> parse_grid(const std::string& spec) {
    double lo = 0.0, hi = 0.0, step = 0.0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0.0 || hi < lo)
        throw ValidationError("--grid expects lo:hi:step with step > 0");
    std::vector<double> grid;
    long k_max = std::lround((hi - lo) / step);
    if (std::abs(lo + k_max * step - hi) > step * 1e-6) k_max = static_cast<long>((hi - lo) / step);
    for (long k = 0; k <= k_max; ++k) grid.push_back(lo + k * step);
    return grid;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct CommonOpts {
    double sigma = 0.065;
    int N = 100;
    int M = 30;
    std::uint64_t seed = 0;
    int steps = 128;
    double duration = 2.0;
    int jobs = default_jobs();
    std::string output;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_model_params = true) {
    if (with_model_params) {
        cmd->add_option("--sigma", opts.sigma, "Perturbation noise level (fraction of block length)")
            ->check(CLI::Range(1e-9, 0.4999));
        cmd->add_option("--n,-n", opts.N, "Perturbed simulations per risk estimate")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--m,-m", opts.M, "Scatter samples per effort estimate")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--steps", opts.steps, "Trajectory discretization steps per transport")
            ->check(CLI::Range(8, 1 << 20));
        cmd->add_option("--duration", opts.duration, "Transport duration (time units)")
            ->check(CLI::PositiveNumber);
    }
    cmd->add_option("--seed", opts.seed, "Random seed");
    cmd->add_option("--jobs,-j", opts.jobs, "Worker parallelism (BLOCKPLAN_JOBS fallback)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--output,-o", opts.output, "Output file (default: stdout)");
}

PipelineParams to_params(const CommonOpts& opts) {
    PipelineParams p;
    p.sigma = opts.sigma;
    p.N = opts.N;
    p.M = opts.M;
    p.seed = opts.seed;
    p.effort.steps = opts.steps;
    p.effort.duration = opts.duration;
    p.jobs = opts.jobs;
    return p;
}

int cmd_estimate(const std::string& trials_path, const CommonOpts& opts) {
    std::vector<TrialSpec> trials = load_trials(trials_path);
    SuiteResult suite = run_suite(trials, to_params(opts));
    emit(opts.output, suite_table_csv(suite));
    for (const SuiteFailure& f : suite.failures)
        std::cerr << "trial " << f.trial_id << " failed: " << f.message << "\n";
    return suite.failures.empty() ? 0 : 1;
}

int cmd_risk(const std::string& scene_path, const CommonOpts& opts, const std::string& trials_csv) {
    Scene scene = load_scene(scene_path);
    RiskEstimate est = estimate_risk(scene, opts.sigma, opts.N, opts.seed, SimConfig{}, opts.jobs);
    if (!trials_csv.empty()) write_file(trials_csv, risk_trials_to_csv(est));
    nlohmann::json j;
    j["risk"] = est.risk;
    j["fell_count"] = est.fell_count;
    j["N"] = est.N;
    j["sigma"] = est.sigma;
    j["seed"] = est.seed;
    emit(opts.output, j.dump(2) + "\n");
    return 0;
}

int cmd_plan(const std::string& trial_path, const CommonOpts& opts, const std::string& trial_id,
             const std::string& trace_dir) {
    std::vector<TrialSpec> trials = load_trials(trial_path);
    const TrialSpec* trial = nullptr;
    if (trial_id.empty()) {
        trial = &trials.front();
    } else {
        for (const TrialSpec& t : trials)
            if (t.id == trial_id) trial = &t;
        if (!trial) throw ValidationError("no trial '" + trial_id + "' in " + trial_path);
    }

    Scene stateA = trial->has_scatter()
                       ? sample_scattered_state(*trial->stateA_scatter,
                                                effort_seed_for(opts.seed, 0))
                       : *trial->stateA_scene;
    Assignment assignment = assign_blocks(stateA, trial->stateB);
    SymbolicPlan plan = plan_symbolic(stateA, trial->stateB, assignment);
    emit(opts.output, plan_to_json_text(plan));

    if (!trace_dir.empty()) {
        std::filesystem::create_directories(trace_dir);
        double clearance = transport_clearance(trial->stateB);
        int index = 0;
        for (const Action& action : plan.actions) {
            if (action.kind != Action::Kind::place) continue;
            const Block& a = stateA.at(stateA.index_of(action.subject));
            const Block& b = trial->stateB.at(trial->stateB.index_of(assignment.pairs.at(action.subject)));
            Trajectory traj = plan_transport(a.pos, b.pos, clearance, opts.duration, opts.steps);
            char name[64];
            std::snprintf(name, sizeof(name), "action_%03d_%s.csv", index++, action.subject.c_str());
            write_file((std::filesystem::path(trace_dir) / name).string(), trajectory_to_csv(traj));
        }
        std::cerr << "wrote " << index << " trajectory traces to " << trace_dir << "\n";
    }
    return 0;
}

int cmd_simulate(const std::string& scene_path, const CommonOpts& opts, const std::string& trace_csv) {
    Scene scene = load_scene(scene_path);
    SimConfig config;
    SimOutcome outcome;
    if (!trace_csv.empty()) {
        std::ostringstream trace;
        trace << "step,block,x,y,z,yaw\n";
        outcome = simulate(scene, config, [&](long step, const std::vector<BodyState>& states) {
            for (std::size_t i = 0; i < states.size(); ++i) {
                trace << step << "," << scene.at(i).id << "," << format_double(states[i].pos.x)
                      << "," << format_double(states[i].pos.y) << ","
                      << format_double(states[i].pos.z) << ","
                      << format_double(states[i].orient.yaw()) << "\n";
            }
        });
        write_file(trace_csv, trace.str());
    } else {
        outcome = simulate(scene, config);
    }
    nlohmann::json j;
    j["fell"] = outcome.fell;
    j["max_displacement"] = outcome.max_displacement;
    j["elapsed"] = outcome.elapsed;
    j["settled"] = outcome.settled;
    emit(opts.output, j.dump(2) + "\n");
    return 0;
}

std::vector<double> table_column(const std::string& table_csv, const std::vector<std::string>& ids,
                                 const std::string& column) {
    std::ifstream in(table_csv);
    if (!in) throw ParseError("cannot open '" + table_csv + "'");
    std::string line;
    if (!std::getline(in, line)) throw ParseError("'" + table_csv + "': empty file");
    std::vector<std::string> header;
    {
        std::istringstream hs(line);
        std::string f;
        while (std::getline(hs, f, ',')) header.push_back(f);
    }
    long col = -1, id_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == column) col = static_cast<long>(i);
        if (header[i] == "trial") id_col = static_cast<long>(i);
    }
    if (col < 0 || id_col < 0)
        throw ParseError("'" + table_csv + "': missing column 'trial' or '" + column + "'");
    std::map<std::string, double> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string f;
        std::vector<std::string> fields;
        while (std::getline(ls, f, ',')) fields.push_back(f);
        if (fields.size() != header.size())
            throw ParseError("'" + table_csv + "': ragged row");
        values[fields[id_col]] = std::stod(fields[col]);
    }
    std::vector<double> out;
    for (const std::string& id : ids) {
        auto it = values.find(id);
        if (it == values.end())
            throw ValidationError("'" + table_csv + "': no row for trial '" + id + "'");
        out.push_back(it->second);
    }
    return out;
}

int cmd_fit(const std::string& table_csv, const std::vector<std::string>& human_csvs,
            const CommonOpts& opts, const std::string& grid_spec, const std::string& trials_path,
            bool csv_report) {
    nlohmann::json report;
    // Summed rmse across datasets per sigma, for the pooled arg-min.
    std::map<double, double> pooled_rmse;

    for (const std::string& human_csv : human_csvs) {
        std::vector<std::string> dropped;
        HumanDataset dataset = load_human_csv(human_csv, "", &dropped);
        for (const std::string& p : dropped)
            std::cerr << "warning: participant '" << p << "' dropped (incomplete rows)\n";

        ZscoreResult z = zscore_dataset(dataset);
        for (const std::string& p : z.dropped_constant)
            std::cerr << "warning: participant '" << p << "' dropped (identical responses)\n";

        std::vector<double> E = table_column(table_csv, z.trials, "effort_mean");
        std::vector<double> R = table_column(table_csv, z.trials, "risk");
        const std::vector<double>& y = z.trial_means;

        std::vector<std::pair<std::string, ModelFit>> fits;
        fits.emplace_back("full", fit_full(E, R, y));
        fits.emplace_back("effort_only", fit_effort_only(E, y));
        fits.emplace_back("risk_only", fit_risk_only(R, y));

        nlohmann::json jd = nlohmann::json::parse(fits_to_json(fits, z.trials));

        if (!grid_spec.empty()) {
            if (trials_path.empty())
                throw ValidationError(
                    "--grid requires --trials <trials.json> to recompute risk per sigma");
            std::vector<TrialSpec> trials = load_trials(trials_path);
            GridSearchParams gp;
            gp.N = opts.N;
            gp.M = opts.M;
            gp.seed = opts.seed;
            gp.jobs = opts.jobs;
            gp.effort.steps = opts.steps;
            gp.effort.duration = opts.duration;
            SigmaGridResult grid = grid_search_sigma(trials, dataset, parse_grid(grid_spec), gp);
            nlohmann::json jgrid = nlohmann::json::array();
            for (const SigmaGridEntry& e : grid.entries) {
                jgrid.push_back({{"sigma", e.sigma}, {"rmse", e.rmse}});
                pooled_rmse[e.sigma] += e.rmse;
                std::cerr << dataset.name << ": sigma=" << e.sigma << " rmse=" << e.rmse << "\n";
            }
            jd["sigma_grid"] = jgrid;
            jd["best_sigma"] = grid.best_sigma;
            std::cerr << dataset.name << ": best sigma " << grid.best_sigma << "\n";
        }

        if (csv_report) {
            emit(opts.output, fits_to_csv(fits, z.trials, y));
            return 0;  // CSV mode reports the first dataset only
        }
        report[dataset.name] = jd;
    }

    if (!pooled_rmse.empty() && human_csvs.size() > 1) {
        double best_sigma = pooled_rmse.begin()->first;
        for (const auto& [sigma, rmse] : pooled_rmse)
            if (rmse < pooled_rmse.at(best_sigma)) best_sigma = sigma;
        report["pooled_best_sigma"] = best_sigma;
        std::cerr << "pooled best sigma: " << best_sigma << "\n";
    }

    if (human_csvs.size() == 1)
        emit(opts.output, report[report.begin().key()].dump(2) + "\n");
    else
        emit(opts.output, report.dump(2) + "\n");
    return 0;
}

int cmd_compare(const std::string& table_csv, const std::vector<std::string>& human_csvs,
                const CommonOpts& opts, int B) {
    nlohmann::json out;
    for (const std::string& human_csv : human_csvs) {
        HumanDataset dataset = load_human_csv(human_csv);
        ZscoreResult z = zscore_dataset(dataset);
        std::vector<double> E = table_column(table_csv, z.trials, "effort_mean");
        std::vector<double> R = table_column(table_csv, z.trials, "risk");
        const std::vector<double>& y = z.trial_means;

        std::map<std::string, std::vector<double>> predictions;
        predictions["full"] = fit_full(E, R, y).predictions;
        predictions["effort_only"] = fit_effort_only(E, y).predictions;
        predictions["risk_only"] = fit_risk_only(R, y).predictions;

        BootstrapReport report = bootstrap_compare(dataset, predictions, B, opts.seed, opts.jobs);
        nlohmann::json jd;
        jd["B"] = report.B;
        jd["redrawn"] = report.redrawn;
        for (const BootstrapModelSummary& m : report.models) {
            jd["models"][m.name] = {{"median_r", m.median_r},
                                    {"ci_2.5", m.lo_r},
                                    {"ci_97.5", m.hi_r}};
        }
        for (const auto& [pair, p] : report.exceedance)
            jd["exceedance"][pair.first + ">" + pair.second] = p;
        out[dataset.name] = jd;
    }
    emit(opts.output, out.dump(2) + "\n");
    return 0;
}

int cmd_gen_stimuli(const std::string& outdir) {
    std::filesystem::create_directories(outdir);
    std::vector<TrialSpec> trials = bundled_trials();
    save_trials(trials, (std::filesystem::path(outdir) / "trials.json").string());
    for (const TrialSpec& t : trials)
        write_file((std::filesystem::path(outdir) / (t.id + ".json")).string(),
                   trial_to_json_text(t));
    std::cerr << "wrote " << trials.size() << " trials to " << outdir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Block reconfiguration difficulty: effort/risk estimation and model fitting"};
    app.require_subcommand(1);

    CommonOpts opts;

    std::string trials_path, scene_path, table_csv, outdir;
    std::vector<std::string> human_csvs;
    std::string grid_spec, trial_id, trace_dir, trace_csv, trials_for_grid, risk_trials_csv;
    bool csv_report = false;
    int B = 1000;

    CLI::App* estimate = app.add_subcommand("estimate", "Emit the E/R table for a trial set");
    estimate->add_option("trials", trials_path, "Trial set JSON")->required();
    add_common(estimate, opts);

    CLI::App* risk = app.add_subcommand("risk", "Risk of a single scene");
    risk->add_option("scene", scene_path, "Scene JSON")->required();
    risk->add_option("--trials-csv", risk_trials_csv, "Per-trial outcome dump (CSV)");
    add_common(risk, opts);

    CLI::App* plan = app.add_subcommand("plan", "Symbolic plan (and trajectory traces) for a trial");
    plan->add_option("trials", trials_path, "Trial JSON (object or array)")->required();
    plan->add_option("--trial", trial_id, "Trial id to select from an array");
    plan->add_option("--trace-dir", trace_dir, "Write per-transport trajectory CSVs here");
    add_common(plan, opts);

    CLI::App* simulate_cmd = app.add_subcommand("simulate", "Settle a scene and report the outcome");
    simulate_cmd->add_option("scene", scene_path, "Scene JSON")->required();
    simulate_cmd->add_option("--trace-csv", trace_csv, "Per-step pose trace (CSV)");
    add_common(simulate_cmd, opts, /*with_model_params=*/false);

    CLI::App* fit = app.add_subcommand("fit", "Fit full and lesioned models to human data");
    fit->add_option("table", table_csv, "E/R table CSV")->required();
    fit->add_option("human", human_csvs, "Human responses CSV(s)")->required()->expected(-1);
    fit->add_option("--grid", grid_spec, "Sigma grid lo:hi:step (recompute risk per sigma)");
    fit->add_option("--trials", trials_for_grid, "Trial set JSON (required with --grid)");
    fit->add_flag("--csv", csv_report, "Emit the per-trial prediction table as CSV");
    add_common(fit, opts);

    CLI::App* compare = app.add_subcommand("compare", "Bootstrap model comparison across datasets");
    compare->add_option("table", table_csv, "E/R table CSV")->required();
    compare->add_option("human", human_csvs, "Human responses CSVs")->required()->expected(-1);
    compare->add_option("--bootstrap", B, "Bootstrap resamples")->check(CLI::PositiveNumber);
    add_common(compare, opts);

    CLI::App* gen = app.add_subcommand("gen-stimuli", "Write the bundled trial set");
    gen->add_option("outdir", outdir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::ostringstream os;
        app.exit(e, os, os);
        std::cerr << os.str();
        return 1;
    }

    try {
        if (app.got_subcommand(estimate)) return cmd_estimate(trials_path, opts);
        if (app.got_subcommand(risk)) return cmd_risk(scene_path, opts, risk_trials_csv);
        if (app.got_subcommand(plan)) return cmd_plan(trials_path, opts, trial_id, trace_dir);
        if (app.got_subcommand(simulate_cmd)) return cmd_simulate(scene_path, opts, trace_csv);
        if (app.got_subcommand(fit))
            return cmd_fit(table_csv, human_csvs, opts, grid_spec, trials_for_grid, csv_report);
        if (app.got_subcommand(compare)) return cmd_compare(table_csv, human_csvs, opts, B);
        if (app.got_subcommand(gen)) return cmd_gen_stimuli(outdir);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == Error::Kind::validation ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
