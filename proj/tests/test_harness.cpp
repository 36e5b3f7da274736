#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "beliefplan/automata.hpp"
#include "beliefplan/harness.hpp"
#include "oracles.hpp"
#include "toy_models.hpp"

using namespace beliefplan;
using namespace testsupport;

namespace {

namespace fs = std::filesystem;

Dfa objective_dfa(const ModelBundle& bundle) {
    return compile(parse_formula(bundle.objective, bundle.atoms));
}

// deterministic two-state swap with a single silent observation
ModelBundle silent_swap_model(std::string objective) {
    ModelBundle bundle{Pomdp(2, {"swap"}, {"u"}, {1.0, 0.0}), {},
                       std::move(objective)};
    Pomdp& m = bundle.pomdp;
    m.set_transition(0, 0, 1, 1.0);
    m.set_transition(1, 0, 0, 1.0);
    m.set_observation(0, 0, 1.0);
    m.set_observation(1, 0, 1.0);
    m.validate();
    bundle.atoms["a"] = indicator_atom("a", 1);
    auto never = std::make_shared<AtomDef>();
    never->name = "never";
    LinearAtom member;
    member.coeffs = {{0, 1.0}};
    member.threshold = 2.0;
    member.strict = true;
    never->members.push_back(member);
    bundle.atoms["never"] = never;
    return bundle;
}

// dynamics that smear the belief while the single observation reveals nothing
ModelBundle blurring_model() {
    ModelBundle bundle{Pomdp(2, {"mix"}, {"u"}, {1.0, 0.0}), {}, "F never"};
    Pomdp& m = bundle.pomdp;
    for (int s = 0; s < 2; ++s) {
        m.set_transition(s, 0, 0, 0.5);
        m.set_transition(s, 0, 1, 0.5);
    }
    m.set_observation(0, 0, 1.0);
    m.set_observation(1, 0, 1.0);
    m.validate();
    auto never = std::make_shared<AtomDef>();
    never->name = "never";
    LinearAtom member;
    member.coeffs = {{0, 1.0}};
    member.threshold = 2.0;
    member.strict = true;
    never->members.push_back(member);
    bundle.atoms["never"] = never;
    return bundle;
}

ExperimentConfig small_planner_config() {
    ExperimentConfig cfg;
    cfg.planner.simulations = 100;
    cfg.planner.max_depth = 4;
    return cfg;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const char* name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void check_same_summary(const ExperimentSummary& a, const ExperimentSummary& b) {
    CHECK(a.successes == b.successes);
    CHECK(a.success_rate == b.success_rate);
    CHECK(a.cause_counts == b.cause_counts);
    CHECK(a.success_steps_histogram == b.success_steps_histogram);
    REQUIRE(a.episodes.size() == b.episodes.size());
    for (std::size_t i = 0; i < a.episodes.size(); ++i) {
        CHECK(a.episodes[i].success == b.episodes[i].success);
        CHECK(a.episodes[i].steps == b.episodes[i].steps);
        CHECK(a.episodes[i].cause == b.episodes[i].cause);
        CHECK(a.episodes[i].belief_inf_trace == b.episodes[i].belief_inf_trace);
    }
}

} // namespace

TEST_CASE("resolve_model dispatches to files and builtin generators") {
    CHECK(resolve_model(BuiltinModelSource{}).pomdp.state_count() == 256);

    BuiltinModelSource small;
    small.drone.width = 2;
    small.drone.height = 2;
    small.drone.goal_x = 1;
    small.drone.goal_y = 1;
    CHECK(resolve_model(small).pomdp.state_count() == 16);

    BuiltinModelSource unknown;
    unknown.name = "teleport-maze";
    CHECK_THROWS_WITH_AS(resolve_model(unknown),
                         doctest::Contains("unknown builtin model"), ModelError);

    const std::string path = "/tmp/beliefplan_resolve_model.txt";
    save_model_file(swap_mix_model(), path);
    const ModelBundle loaded = resolve_model(FileModelSource{path});
    CHECK(loaded.pomdp.state_count() == 2);
    CHECK(loaded.objective == "F a");
    std::remove(path.c_str());
}

TEST_CASE("experiment configuration bounds are enforced") {
    ExperimentConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.runs = 0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("runs >= 1"), PlanError);
    cfg = {};
    cfg.horizon = 0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("horizon >= 1"), PlanError);
    cfg = {};
    cfg.jobs = 0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("jobs >= 1"), PlanError);
    cfg = {};
    cfg.planner.simulations = 0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("simulations >= 1"),
                         PlanError);
    cfg = {};
    cfg.planner.max_depth = 0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("depth >= 1"), PlanError);
    cfg = {};
    cfg.planner.ucb_c = -1.0;
    CHECK_THROWS_AS(cfg.validate(), PlanError);
    cfg = {};
    cfg.belief_fix_threshold = 0.0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("must be positive"),
                         PlanError);

    CHECK(std::string(to_string(TerminationCause::Accepted)) == "accepted");
    CHECK(std::string(to_string(TerminationCause::DeadAutomaton)) ==
          "dead-automaton");
    CHECK(std::string(to_string(TerminationCause::HorizonExceeded)) ==
          "horizon-exceeded");
}

TEST_CASE("an immediately satisfiable objective succeeds on the first step") {
    const ModelBundle bundle = instant_model();
    const Dfa dfa = objective_dfa(bundle);
    ExperimentConfig cfg = small_planner_config();
    Rng rng(4);

    int log_calls = 0;
    EpisodeLogger logger = [&](int step, const std::string& action,
                               const std::string& observation, int q,
                               double reward, double belief_inf) {
        ++log_calls;
        CHECK(step == 1);
        CHECK(action == "idle");
        CHECK(observation == "u");
        CHECK(dfa.is_final(q));
        CHECK(reward == 1.0);
        CHECK(belief_inf == 1.0);
    };
    const EpisodeResult result = run_episode(bundle, dfa, cfg, rng, logger);
    CHECK(result.success);
    CHECK(result.steps == 1);
    CHECK(result.cause == TerminationCause::Accepted);
    CHECK(result.belief_inf_trace == std::vector<double>{1.0, 1.0});
    CHECK(log_calls == 1);
}

TEST_CASE("an objective that is already true ends before any action") {
    ModelBundle bundle = instant_model();
    bundle.objective = "true";
    const Dfa dfa = objective_dfa(bundle);
    REQUIRE(dfa.is_final(dfa.initial()));

    ExperimentConfig cfg = small_planner_config();
    Rng rng(4);
    const EpisodeResult result = run_episode(bundle, dfa, cfg, rng);
    CHECK(result.success);
    CHECK(result.steps == 0);
    CHECK(result.cause == TerminationCause::Accepted);
    CHECK(result.belief_inf_trace.size() == 1);
}

TEST_CASE("episodes stop when the automaton dies") {
    const ModelBundle bundle = silent_swap_model("X !a");
    const Dfa dfa = objective_dfa(bundle);
    ExperimentConfig cfg = small_planner_config();
    Rng rng(11);
    const EpisodeResult result = run_episode(bundle, dfa, cfg, rng);
    // the swap makes `a` true on the second step, violating X !a
    CHECK_FALSE(result.success);
    CHECK(result.steps == 2);
    CHECK(result.cause == TerminationCause::DeadAutomaton);
}

TEST_CASE("episodes stop at the horizon when nothing is reachable") {
    const ModelBundle bundle = silent_swap_model("F never");
    const Dfa dfa = objective_dfa(bundle);
    ExperimentConfig cfg = small_planner_config();
    cfg.horizon = 5;
    Rng rng(11);
    const EpisodeResult result = run_episode(bundle, dfa, cfg, rng);
    CHECK_FALSE(result.success);
    CHECK(result.steps == 5);
    CHECK(result.cause == TerminationCause::HorizonExceeded);
    CHECK(result.belief_inf_trace.size() == 6);
}

TEST_CASE("the max-belief trace freezes once it crosses the fix threshold") {
    const ModelBundle bundle = blurring_model();
    const Dfa dfa = objective_dfa(bundle);

    // the initial point mass crosses the default threshold immediately, so
    // the recorded curve stays flat even though the true belief smears out
    ExperimentConfig cfg = small_planner_config();
    cfg.horizon = 3;
    Rng rng(8);
    const EpisodeResult frozen = run_episode(bundle, dfa, cfg, rng);
    CHECK(frozen.belief_inf_trace ==
          std::vector<double>{1.0, 1.0, 1.0, 1.0});

    cfg.belief_fix_threshold = 2.0; // unreachable: never freeze
    Rng rng2(8);
    const EpisodeResult raw = run_episode(bundle, dfa, cfg, rng2);
    CHECK(raw.belief_inf_trace == std::vector<double>{1.0, 0.5, 0.5, 0.5});
}

TEST_CASE("experiments aggregate their episodes consistently") {
    const std::string path = "/tmp/beliefplan_experiment_model.txt";
    save_model_file(swap_mix_model(), path);

    ExperimentConfig cfg = small_planner_config();
    cfg.model = FileModelSource{path};
    cfg.runs = 40;
    cfg.horizon = 10;
    cfg.planner.simulations = 150;
    cfg.master_seed = 5;

    const ExperimentSummary summary = run_experiment(cfg);
    CHECK(summary.runs == 40);
    CHECK(summary.episodes.size() == 40);
    CHECK(summary.success_rate ==
          summary.successes / static_cast<double>(summary.runs));
    CHECK(summary.success_steps_histogram.size() ==
          static_cast<std::size_t>(cfg.horizon) + 1);

    int cause_total = 0;
    for (const auto& [cause, count] : summary.cause_counts) cause_total += count;
    CHECK(cause_total == summary.runs);
    CHECK(summary.cause_counts.at(TerminationCause::Accepted) ==
          summary.successes);

    int hist_total = 0;
    double hist_weighted = 0.0;
    for (std::size_t k = 0; k < summary.success_steps_histogram.size(); ++k) {
        hist_total += summary.success_steps_histogram[k];
        hist_weighted += static_cast<double>(k) * summary.success_steps_histogram[k];
    }
    CHECK(hist_total == summary.successes);
    REQUIRE(summary.successes > 0);
    CHECK(summary.mean_steps_success ==
          doctest::Approx(hist_weighted / summary.successes).epsilon(1e-12));

    REQUIRE_FALSE(summary.mean_belief_inf.empty());
    CHECK(summary.active_runs[0] == summary.successes);
    for (double v : summary.mean_belief_inf) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    for (const EpisodeResult& e : summary.episodes) {
        CHECK(e.steps <= cfg.horizon);
        CHECK(e.belief_inf_trace.size() ==
              static_cast<std::size_t>(e.steps) + 1);
    }

    // same seed, same results; worker threads do not change the outcome
    const ExperimentSummary again = run_experiment(cfg);
    check_same_summary(summary, again);
    ExperimentConfig threaded = cfg;
    threaded.jobs = 3;
    check_same_summary(summary, run_experiment(threaded));

    std::remove(path.c_str());
}

TEST_CASE("different master seeds draw different trajectories") {
    // swap_mix episodes are identical across seeds (the search has a single
    // best action and the initial belief is a frozen point mass), so use a
    // model with noisy observations and disable freezing to expose the
    // per-run randomness in the recorded belief curves.
    const std::string path = "/tmp/beliefplan_seeded_model.txt";
    save_model_file(noisy_trap_model(), path);

    ExperimentConfig cfg = small_planner_config();
    cfg.model = FileModelSource{path};
    cfg.runs = 30;
    cfg.horizon = 10;
    cfg.belief_fix_threshold = 2.0;
    cfg.master_seed = 5;

    const ExperimentSummary summary = run_experiment(cfg);
    ExperimentConfig other = cfg;
    other.master_seed = 6;
    const ExperimentSummary shifted = run_experiment(other);

    REQUIRE(summary.episodes.size() == shifted.episodes.size());
    bool any_difference = false;
    for (std::size_t i = 0; i < summary.episodes.size(); ++i) {
        if (summary.episodes[i].belief_inf_trace !=
            shifted.episodes[i].belief_inf_trace) {
            any_difference = true;
        }
    }
    CHECK(any_difference);
    std::remove(path.c_str());
}

TEST_CASE("an experiment with no successes reports NaN mean steps") {
    const std::string path = "/tmp/beliefplan_hopeless_model.txt";
    save_model_file(silent_swap_model("F never"), path);

    ExperimentConfig cfg = small_planner_config();
    cfg.model = FileModelSource{path};
    cfg.runs = 3;
    cfg.horizon = 3;
    cfg.planner.simulations = 20;

    const ExperimentSummary summary = run_experiment(cfg);
    CHECK(summary.successes == 0);
    CHECK(summary.success_rate == 0.0);
    CHECK(std::isnan(summary.mean_steps_success));
    CHECK(summary.cause_counts.at(TerminationCause::HorizonExceeded) == 3);
    CHECK(summary.mean_belief_inf.empty());
    CHECK(summary.active_runs.empty());
    std::remove(path.c_str());
}

TEST_CASE("experiments write their four csv files") {
    const std::string path = "/tmp/beliefplan_csv_model.txt";
    save_model_file(swap_mix_model(), path);
    TempDir dir("beliefplan_csv_out");

    ExperimentConfig cfg = small_planner_config();
    cfg.model = FileModelSource{path};
    cfg.runs = 5;
    cfg.horizon = 8;
    cfg.out_dir = dir.path.string();
    run_experiment(cfg);

    for (const char* name :
         {"episodes.csv", "steps_hist.csv", "belief_inf.csv", "summary.csv"}) {
        CHECK(fs::exists(dir.path / name));
    }

    std::ifstream episodes(dir.path / "episodes.csv");
    std::string line;
    std::getline(episodes, line);
    CHECK(line == "run,success,steps,cause");
    int rows = 0;
    while (std::getline(episodes, line)) {
        if (!line.empty()) ++rows;
    }
    CHECK(rows == 5);

    std::ifstream summary_file(dir.path / "summary.csv");
    std::stringstream buffer;
    buffer << summary_file.rdbuf();
    const std::string summary_text = buffer.str();
    CHECK(summary_text.find("metric,value\n") != std::string::npos);
    CHECK(summary_text.find("runs,5\n") != std::string::npos);
    CHECK(summary_text.find("success_rate,") != std::string::npos);
    CHECK(summary_text.find("cause_accepted,") != std::string::npos);

    std::ifstream belief(dir.path / "belief_inf.csv");
    std::getline(belief, line);
    CHECK(line == "step,mean_belief_inf,active_runs");
    std::ifstream hist(dir.path / "steps_hist.csv");
    std::getline(hist, line);
    CHECK(line == "steps,count");
    std::remove(path.c_str());
}

TEST_CASE("the command line front end reports and exits cleanly") {
    const std::string path = "/tmp/beliefplan_cli_model.txt";
    save_model_file(swap_mix_model(), path);

    const auto run = [](const std::vector<std::string>& args, std::string* out_text = nullptr,
                        std::string* err_text = nullptr) {
        std::ostringstream out;
        std::ostringstream err;
        const int code = cli_main(args, out, err);
        if (out_text) *out_text = out.str();
        if (err_text) *err_text = err.str();
        return code;
    };

    std::string out;
    std::string err;

    CHECK(run({"--help"}, &out) == 0);
    CHECK(out.find("POMDP planning") != std::string::npos);

    CHECK(run({}, &out, &err) == 2);
    CHECK(run({"frobnicate"}, &out, &err) == 2);

    // a model source is required
    CHECK(run({"compile"}, &out, &err) == 2);
    CHECK(err.find("error:") != std::string::npos);

    // a malformed --goal is a usage error, not a crash
    CHECK(run({"compile", "--builtin", "drone-probing", "--goal", "2"}, &out,
              &err) == 2);
    CHECK(err.find("expected x,y") != std::string::npos);

    // a well-formed --goal reaches the generator
    CHECK(run({"validate", "--builtin", "drone-probing", "--width", "2",
               "--height", "2", "--goal", "1,1"}, &out) == 0);
    CHECK(out.find("ok: 16 states") != std::string::npos);
    CHECK(run({"validate", "--builtin", "drone-probing", "--width", "2",
               "--height", "2", "--goal", "5,5"}, &out, &err) == 1);
    CHECK(err.find("outside the grid") != std::string::npos);

    // missing files are runtime errors
    CHECK(run({"validate", "--model", "/tmp/beliefplan_missing.txt"}, &out,
              &err) == 1);
    CHECK(err.find("cannot open") != std::string::npos);

    CHECK(run({"compile", "--builtin", "drone-probing"}, &out) == 0);
    CHECK(out.find("objective: (!goal U measured) & F goal & F measured") !=
          std::string::npos);
    CHECK(out.find("compiled: 4 states, minimized to 4") != std::string::npos);
    CHECK(out.find("automaton: 4 states (3 live + 1 rejecting), 2 atoms, "
                   "initial q0") != std::string::npos);
    CHECK(out.find("q3 [final]") != std::string::npos);
    CHECK(out.find("q1 [rejecting]") != std::string::npos);

    TempDir dir("beliefplan_cli_out");
    CHECK(run({"compile", "--builtin", "drone-probing", "--out",
               dir.path.string()}, &out) == 0);
    CHECK(fs::exists(dir.path / "automaton.dot"));
    CHECK(fs::exists(dir.path / "automaton.json"));
    CHECK(out.find("wrote ") != std::string::npos);

    CHECK(run({"validate", "--model", path, "--verbose"}, &out) == 0);
    CHECK(out.find("ok: 2 states, 2 actions, 2 observations, 1 atoms") !=
          std::string::npos);
    CHECK(out.find("objective: F a") != std::string::npos);

    CHECK(run({"plan", "--model", path, "--sims", "200", "--depth", "4",
               "--seed", "3"}, &out) == 0);
    CHECK(out.find("action: ") != std::string::npos);
    CHECK(out.find("root value: ") != std::string::npos);

    CHECK(run({"episode", "--model", path, "--sims", "100", "--depth", "4",
               "--horizon", "8", "--seed", "2"}, &out) == 0);
    CHECK(out.find("result: accepted after") != std::string::npos);

    TempDir exp_dir("beliefplan_cli_exp");
    CHECK(run({"experiment", "--model", path, "--runs", "3", "--sims", "60",
               "--depth", "4", "--horizon", "8", "--seed", "1", "--out",
               exp_dir.path.string()}, &out) == 0);
    CHECK(out.find("runs: 3") != std::string::npos);
    CHECK(out.find("successes: ") != std::string::npos);
    CHECK(fs::exists(exp_dir.path / "summary.csv"));
    CHECK(out.find("csv written to ") != std::string::npos);

    std::remove(path.c_str());
}
