#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "beliefplan/automata.hpp"
#include "beliefplan/harness.hpp"
#include "beliefplan/product.hpp"

namespace beliefplan {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

struct ModelFlags {
    std::string model_path;
    std::string builtin;
    DroneProbingParams drone;
    std::string goal;
};

void add_model_flags(CLI::App& cmd, ModelFlags& flags) {
    auto* model = cmd.add_option("--model", flags.model_path,
                                 "Model file to load");
    auto* builtin = cmd.add_option("--builtin", flags.builtin,
                                   "Builtin generator name (drone-probing)");
    model->excludes(builtin);
    cmd.add_option("--width", flags.drone.width, "Builtin grid width")
        ->needs(builtin);
    cmd.add_option("--height", flags.drone.height, "Builtin grid height")
        ->needs(builtin);
    cmd.add_option("--threshold", flags.drone.threshold,
                   "Builtin measurement threshold")
        ->needs(builtin);
    cmd.add_option("--goal", flags.goal, "Builtin goal cell as x,y")
        ->needs(builtin);
}

ModelSource to_source(const ModelFlags& flags) {
    if (!flags.model_path.empty()) return FileModelSource{flags.model_path};
    if (!flags.builtin.empty()) {
        BuiltinModelSource source;
        source.name = flags.builtin;
        source.drone = flags.drone;
        if (!flags.goal.empty()) {
            int x = 0;
            int y = 0;
            char tail = '\0';
            if (std::sscanf(flags.goal.c_str(), "%d,%d%c", &x, &y, &tail) != 2) {
                throw CLI::ValidationError("--goal", "expected x,y");
            }
            source.drone.goal_x = x;
            source.drone.goal_y = y;
        }
        return source;
    }
    throw CLI::RequiredError("--model or --builtin");
}

Dfa compile_objective(const ModelBundle& bundle) {
    return minimize(compile(parse_formula(bundle.objective, bundle.atoms)));
}

void print_dfa_summary(std::ostream& out, const Dfa& dfa, bool verbose) {
    const int rejecting = dfa.dead() ? 1 : 0;
    out << "automaton: " << dfa.state_count() << " states ("
        << dfa.live_state_count() << " live";
    if (rejecting) out << " + 1 rejecting";
    out << "), " << dfa.atom_count() << " atoms, initial q" << dfa.initial()
        << "\n";
    if (verbose) {
        for (int q = 0; q < dfa.state_count(); ++q) {
            out << "  q" << q << (dfa.is_final(q) ? " [final]" : "")
                << (dfa.is_dead(q) ? " [rejecting]" : "") << "  "
                << dfa.state_labels()[static_cast<std::size_t>(q)] << "\n";
        }
    }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
    CLI::App app{"POMDP planning with co-safe inequality-LTL objectives"};
    app.require_subcommand(1);

    ModelFlags flags;
    PlannerConfig planner;
    int horizon = 100;
    int runs = 100;
    int jobs = 1;
    std::uint64_t seed = 0;
    std::string out_dir;
    bool verbose = false;
    app.add_flag("--verbose", verbose, "Verbose diagnostics");

    auto add_planner_flags = [&](CLI::App& cmd) {
        cmd.add_option("--sims", planner.simulations, "Simulations per move");
        cmd.add_option("--depth", planner.max_depth, "Search depth bound");
        cmd.add_option("--ucb-c", planner.ucb_c, "UCB exploration constant");
        cmd.add_option("--seed", seed, "Master random seed");
    };

    CLI::App* compile_cmd =
        app.add_subcommand("compile", "Compile the model objective to a DFA");
    compile_cmd->fallthrough();
    add_model_flags(*compile_cmd, flags);
    compile_cmd->add_option("--out", out_dir,
                            "Directory for automaton.dot / automaton.json");

    CLI::App* plan_cmd =
        app.add_subcommand("plan", "Run one search from the initial state");
    plan_cmd->fallthrough();
    add_model_flags(*plan_cmd, flags);
    add_planner_flags(*plan_cmd);

    CLI::App* episode_cmd =
        app.add_subcommand("episode", "Play one episode with per-step logging");
    episode_cmd->fallthrough();
    add_model_flags(*episode_cmd, flags);
    add_planner_flags(*episode_cmd);
    episode_cmd->add_option("--horizon", horizon, "Episode step limit");

    CLI::App* experiment_cmd =
        app.add_subcommand("experiment", "Run a batch of episodes and write CSVs");
    experiment_cmd->fallthrough();
    add_model_flags(*experiment_cmd, flags);
    add_planner_flags(*experiment_cmd);
    experiment_cmd->add_option("--horizon", horizon, "Episode step limit");
    experiment_cmd->add_option("--runs", runs, "Number of episodes");
    experiment_cmd->add_option("--out", out_dir, "CSV output directory");
    experiment_cmd->add_option("--jobs", jobs, "Worker threads");

    CLI::App* validate_cmd =
        app.add_subcommand("validate", "Check a model file and its objective");
    validate_cmd->fallthrough();
    add_model_flags(*validate_cmd, flags);

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("beliefplan");
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    if (compile_cmd->parsed()) {
        const ModelBundle bundle = resolve_model(to_source(flags));
        out << "objective: " << bundle.objective << "\n";
        const Dfa raw = compile(parse_formula(bundle.objective, bundle.atoms));
        const Dfa dfa = minimize(raw);
        out << "compiled: " << raw.state_count() << " states, minimized to "
            << dfa.state_count() << "\n";
        print_dfa_summary(out, dfa, true);
        if (!out_dir.empty()) {
            namespace fs = std::filesystem;
            fs::create_directories(out_dir);
            std::ofstream(fs::path(out_dir) / "automaton.dot") << export_dot(dfa);
            std::ofstream(fs::path(out_dir) / "automaton.json") << dfa_to_json(dfa);
            out << "wrote " << (fs::path(out_dir) / "automaton.dot").string()
                << " and automaton.json\n";
        }
        return 0;
    }

    if (plan_cmd->parsed()) {
        const ModelBundle bundle = resolve_model(to_source(flags));
        const Dfa dfa = compile_objective(bundle);
        Rng rng(seed);
        Searcher searcher(bundle.pomdp, dfa, init_product(bundle.pomdp, dfa),
                          planner);
        const SearchResult result = searcher.run(rng);
        out << "action: " << bundle.pomdp.action_names()[result.action] << "\n";
        out << "root value: " << fmt_short(result.root_value) << " ("
            << result.root_visits << " visits, " << result.nodes_expanded
            << " nodes)\n";
        if (verbose) {
            const std::vector<int>& actions = searcher.actions();
            for (std::size_t i = 0; i < result.action_stats.size(); ++i) {
                out << "  " << bundle.pomdp.action_names()[actions[i]]
                    << "  v=" << fmt_short(result.action_stats[i].v)
                    << "  n=" << result.action_stats[i].n << "\n";
            }
        }
        return 0;
    }

    if (episode_cmd->parsed() || experiment_cmd->parsed()) {
        ExperimentConfig cfg;
        cfg.model = to_source(flags);
        cfg.horizon = horizon;
        cfg.planner = planner;
        cfg.master_seed = seed;
        cfg.jobs = jobs;
        if (episode_cmd->parsed()) {
            cfg.runs = 1;
            const ModelBundle bundle = resolve_model(cfg.model);
            const Dfa dfa = compile_objective(bundle);
            Rng rng = Rng::derive(cfg.master_seed, 0);
            EpisodeLogger logger = [&](int step, const std::string& action,
                                       const std::string& observation, int q,
                                       double reward, double belief_inf) {
                out << step << " " << action << " " << observation << " q" << q
                    << " " << reward << " " << fmt_short(belief_inf) << "\n";
            };
            const EpisodeResult result =
                run_episode(bundle, dfa, cfg, rng, logger);
            out << "result: " << to_string(result.cause) << " after "
                << result.steps << " steps\n";
            return 0;
        }
        cfg.runs = runs;
        cfg.out_dir = out_dir;
        const ExperimentSummary summary = run_experiment(cfg);
        out << "runs: " << summary.runs << "\n";
        out << "successes: " << summary.successes << " (rate "
            << fmt_short(summary.success_rate) << ")\n";
        out << "mean steps (successes): " << fmt_short(summary.mean_steps_success)
            << "\n";
        for (const auto& [cause, count] : summary.cause_counts) {
            out << "cause " << to_string(cause) << ": " << count << "\n";
        }
        if (!out_dir.empty()) out << "csv written to " << out_dir << "\n";
        return 0;
    }

    if (validate_cmd->parsed()) {
        const ModelBundle bundle = resolve_model(to_source(flags));
        bundle.pomdp.validate();
        const Formula objective = parse_formula(bundle.objective, bundle.atoms);
        const Dfa dfa = compile_objective(bundle);
        out << "ok: " << bundle.pomdp.state_count() << " states, "
            << bundle.pomdp.action_count() << " actions, "
            << bundle.pomdp.observation_count() << " observations, "
            << bundle.atoms.size() << " atoms\n";
        out << "objective: " << to_string(objective) << "\n";
        print_dfa_summary(out, dfa, verbose);
        return 0;
    }

    err << "no subcommand given\n";
    return 2;
}

} // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
    try {
        return run_cli(args, out, err);
    } catch (const CLI::ParseError& e) {
        // Flag-shape problems detected after parsing (e.g. a malformed
        // --goal) are usage errors, same as parse failures.
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace beliefplan
