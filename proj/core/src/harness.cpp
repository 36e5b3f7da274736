#include "beliefplan/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

#include "beliefplan/automata.hpp"
#include "beliefplan/product.hpp"

namespace beliefplan {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

ModelBundle resolve_model(const ModelSource& source) {
    if (const auto* file = std::get_if<FileModelSource>(&source)) {
        return load_model(file->path);
    }
    const auto& builtin = std::get<BuiltinModelSource>(source);
    if (builtin.name != "drone-probing") {
        throw ModelError("unknown builtin model '" + builtin.name +
                         "' (available: drone-probing)");
    }
    return drone_probing_model(builtin.drone);
}

void ExperimentConfig::validate() const {
    if (runs < 1) throw PlanError("experiment needs runs >= 1");
    if (horizon < 1) throw PlanError("experiment needs horizon >= 1");
    if (jobs < 1) throw PlanError("experiment needs jobs >= 1");
    if (planner.simulations < 1) throw PlanError("planner needs simulations >= 1");
    if (planner.max_depth < 1) throw PlanError("planner needs depth >= 1");
    if (planner.ucb_c < 0.0) throw PlanError("exploration constant must be >= 0");
    if (!(belief_fix_threshold > 0.0)) {
        throw PlanError("belief fix threshold must be positive");
    }
}

const char* to_string(TerminationCause cause) {
    switch (cause) {
    case TerminationCause::Accepted: return "accepted";
    case TerminationCause::DeadAutomaton: return "dead-automaton";
    case TerminationCause::HorizonExceeded: return "horizon-exceeded";
    }
    return "?";
}

EpisodeResult run_episode(const ModelBundle& bundle, const Dfa& dfa,
                          const ExperimentConfig& cfg, Rng& rng,
                          const EpisodeLogger& logger) {
    const Pomdp& m = bundle.pomdp;
    ProductState x = init_product(m, dfa);
    int s = rng.categorical(m.init());

    EpisodeResult result;
    std::optional<double> fixed;
    auto record = [&](double value) {
        if (!fixed && value > cfg.belief_fix_threshold) fixed = value;
        result.belief_inf_trace.push_back(fixed ? *fixed : value);
        return result.belief_inf_trace.back();
    };
    record(x.belief().max_component());

    // An objective that is already accepting before the first action (the
    // formula `true`) never pays the entry reward; close the episode here
    // instead of stepping into the sink.
    if (dfa.is_final(x.q())) {
        result.success = true;
        result.steps = 0;
        result.cause = TerminationCause::Accepted;
        return result;
    }

    for (int step = 1; step <= cfg.horizon; ++step) {
        const SearchResult plan = search(m, dfa, x, cfg.planner, rng);
        const auto [s_next, o] = sample_step(m, s, plan.action, rng);
        StepOutcome outcome = product_step_with(m, dfa, x, plan.action, o);
        x = std::move(outcome.next);
        s = s_next;

        const double recorded = record(x.belief().max_component());
        if (logger) {
            logger(step, m.action_names()[plan.action], m.observation_names()[o],
                   x.q(), outcome.reward, recorded);
        }
        result.steps = step;
        if (outcome.reward > 0.0) {
            result.success = true;
            result.cause = TerminationCause::Accepted;
            return result;
        }
        if (dfa.is_dead(x.q())) {
            result.cause = TerminationCause::DeadAutomaton;
            return result;
        }
    }
    result.steps = cfg.horizon;
    result.cause = TerminationCause::HorizonExceeded;
    return result;
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const ModelBundle bundle = resolve_model(cfg.model);
    const Formula objective = parse_formula(bundle.objective, bundle.atoms);
    const Dfa dfa = minimize(compile(objective));

    ExperimentSummary summary;
    summary.runs = cfg.runs;
    summary.episodes.resize(static_cast<std::size_t>(cfg.runs));

    auto play = [&](int run) {
        Rng rng = Rng::derive(cfg.master_seed, static_cast<std::uint64_t>(run));
        summary.episodes[static_cast<std::size_t>(run)] =
            run_episode(bundle, dfa, cfg, rng);
    };

    const int workers = std::min(cfg.jobs, cfg.runs);
    if (workers <= 1) {
        for (int run = 0; run < cfg.runs; ++run) play(run);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (int run = next.fetch_add(1); run < cfg.runs;
                     run = next.fetch_add(1)) {
                    play(run);
                }
            });
        }
        for (std::thread& t : pool) t.join();
    }

    summary.cause_counts = {{TerminationCause::Accepted, 0},
                            {TerminationCause::DeadAutomaton, 0},
                            {TerminationCause::HorizonExceeded, 0}};
    summary.success_steps_histogram.assign(
        static_cast<std::size_t>(cfg.horizon) + 1, 0);
    double step_sum = 0.0;
    std::size_t longest = 0;
    for (const EpisodeResult& e : summary.episodes) {
        ++summary.cause_counts[e.cause];
        if (e.success) {
            ++summary.successes;
            step_sum += e.steps;
            ++summary.success_steps_histogram[static_cast<std::size_t>(e.steps)];
            longest = std::max(longest, e.belief_inf_trace.size());
        }
    }
    summary.success_rate =
        static_cast<double>(summary.successes) / static_cast<double>(cfg.runs);
    summary.mean_steps_success =
        summary.successes > 0 ? step_sum / summary.successes
                              : std::numeric_limits<double>::quiet_NaN();

    summary.mean_belief_inf.assign(longest, 0.0);
    summary.active_runs.assign(longest, 0);
    for (const EpisodeResult& e : summary.episodes) {
        if (!e.success) continue;
        for (std::size_t k = 0; k < e.belief_inf_trace.size(); ++k) {
            summary.mean_belief_inf[k] += e.belief_inf_trace[k];
            ++summary.active_runs[k];
        }
    }
    for (std::size_t k = 0; k < longest; ++k) {
        summary.mean_belief_inf[k] /= summary.active_runs[k];
    }

    if (!cfg.out_dir.empty()) write_experiment_csv(summary, cfg.out_dir);
    return summary;
}

void write_experiment_csv(const ExperimentSummary& summary,
                          const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    auto open = [&](const char* name) {
        std::ofstream out(fs::path(out_dir) / name);
        if (!out) {
            throw ModelError(std::string("cannot write ") + name + " in '" +
                             out_dir + "'");
        }
        return out;
    };

    {
        std::ofstream out = open("episodes.csv");
        out << "run,success,steps,cause\n";
        for (std::size_t i = 0; i < summary.episodes.size(); ++i) {
            const EpisodeResult& e = summary.episodes[i];
            out << i << "," << (e.success ? 1 : 0) << "," << e.steps << ","
                << to_string(e.cause) << "\n";
        }
    }
    {
        std::ofstream out = open("steps_hist.csv");
        out << "steps,count\n";
        for (std::size_t k = 0; k < summary.success_steps_histogram.size(); ++k) {
            if (summary.success_steps_histogram[k] > 0) {
                out << k << "," << summary.success_steps_histogram[k] << "\n";
            }
        }
    }
    {
        std::ofstream out = open("belief_inf.csv");
        out << "step,mean_belief_inf,active_runs\n";
        for (std::size_t k = 0; k < summary.mean_belief_inf.size(); ++k) {
            out << k << "," << fmt_double(summary.mean_belief_inf[k]) << ","
                << summary.active_runs[k] << "\n";
        }
    }
    {
        std::ofstream out = open("summary.csv");
        out << "metric,value\n";
        out << "runs," << summary.runs << "\n";
        out << "successes," << summary.successes << "\n";
        out << "success_rate," << fmt_double(summary.success_rate) << "\n";
        out << "mean_steps_success," << fmt_double(summary.mean_steps_success)
            << "\n";
        for (const auto& [cause, count] : summary.cause_counts) {
            out << "cause_" << to_string(cause) << "," << count << "\n";
        }
    }
}

} // namespace beliefplan
