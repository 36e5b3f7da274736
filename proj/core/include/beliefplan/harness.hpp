#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "beliefplan/planner.hpp"
#include "beliefplan/pomdp.hpp"

namespace beliefplan {

/// Where the model comes from: a file path or a named builtin generator.
struct FileModelSource {
    std::string path;
};
struct BuiltinModelSource {
    std::string name = "drone-probing";
    DroneProbingParams drone;
};
using ModelSource = std::variant<FileModelSource, BuiltinModelSource>;

ModelBundle resolve_model(const ModelSource& source);

struct ExperimentConfig {
    ModelSource model;
    int runs = 100;
    int horizon = 100;
    PlannerConfig planner;
    std::string out_dir;           // empty: no CSV output
    std::uint64_t master_seed = 0;
    /// max-belief values are held constant once they exceed this threshold.
    double belief_fix_threshold = 0.9;
    int jobs = 1;

    void validate() const;
};

enum class TerminationCause { Accepted, DeadAutomaton, HorizonExceeded };

const char* to_string(TerminationCause cause);

struct EpisodeResult {
    bool success = false;
    int steps = 0;
    TerminationCause cause = TerminationCause::HorizonExceeded;
    /// max-belief component per step, entry 0 for the initial belief, held
    /// constant once it crosses the fix threshold.
    std::vector<double> belief_inf_trace;
};

/// Per-step episode log line: step, action name, observation name, automaton
/// state after the step, reward, max-belief component.
using EpisodeLogger = std::function<void(int step, const std::string& action,
                                         const std::string& observation, int q,
                                         double reward, double belief_inf)>;

/// Plays one episode: the true hidden state is sampled from the initial
/// distribution, each move comes from a fresh MCTS search, the sampled
/// observation drives both the belief and the automaton. Terminates on
/// acceptance, on the dead automaton state, or at the horizon.
EpisodeResult run_episode(const ModelBundle& bundle, const Dfa& dfa,
                          const ExperimentConfig& cfg, Rng& rng,
                          const EpisodeLogger& logger = nullptr);

struct ExperimentSummary {
    int runs = 0;
    int successes = 0;
    double success_rate = 0.0;
    double mean_steps_success = 0.0;     // NaN when there are no successes
    std::map<TerminationCause, int> cause_counts;
    std::vector<int> success_steps_histogram;        // (steps -> count), sparse via map? kept dense to horizon
    std::vector<double> mean_belief_inf;             // per step, successful runs
    std::vector<int> active_runs;                    // successful runs alive at step
    std::vector<EpisodeResult> episodes;
};

/// Runs cfg.runs episodes with rng streams derived from (master_seed, run
/// index), aggregates statistics and, when cfg.out_dir is set, writes
/// episodes.csv, steps_hist.csv, belief_inf.csv and summary.csv there.
/// Episodes may execute on cfg.jobs threads; results do not depend on jobs.
ExperimentSummary run_experiment(const ExperimentConfig& cfg);

void write_experiment_csv(const ExperimentSummary& summary, const std::string& out_dir);

/// Command-line front end (compile/plan/episode/experiment/validate).
/// Returns 0 on success, 1 on runtime errors, 2 on usage errors.
int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

} // namespace beliefplan
