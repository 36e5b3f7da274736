#include <benchmark/benchmark.h>

#include <vector>

#include "beliefplan/automata.hpp"
#include "beliefplan/planner.hpp"
#include "beliefplan/product.hpp"

using namespace beliefplan;

namespace {

const ModelBundle& drone() {
    static const ModelBundle bundle = drone_probing_model();
    return bundle;
}

const Dfa& drone_dfa() {
    static const Dfa dfa =
        minimize(compile(parse_formula(drone().objective, drone().atoms)));
    return dfa;
}

// a fixed short action-observation tail with positive likelihood throughout
std::vector<std::pair<int, int>> warm_trajectory(int length) {
    const Pomdp& m = drone().pomdp;
    Rng rng(1);
    Belief b = m.initial_belief();
    std::vector<std::pair<int, int>> steps;
    for (int i = 0; i < length; ++i) {
        const int a = rng.uniform_int(m.action_count());
        const int o = rng.categorical(observation_likelihood(m, b, a));
        b = belief_update(m, b, a, o);
        steps.emplace_back(a, o);
    }
    return steps;
}

} // namespace

static void BM_BeliefUpdate(benchmark::State& state) {
    const Pomdp& m = drone().pomdp;
    const auto steps = warm_trajectory(16);
    for (auto _ : state) {
        Belief b = m.initial_belief();
        for (const auto& [a, o] : steps) {
            b = belief_update(m, b, a, o);
        }
        benchmark::DoNotOptimize(b);
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(steps.size()));
}
BENCHMARK(BM_BeliefUpdate);

static void BM_ObservationLikelihood(benchmark::State& state) {
    const Pomdp& m = drone().pomdp;
    const Belief b = m.initial_belief();
    for (auto _ : state) {
        benchmark::DoNotOptimize(observation_likelihood(m, b, 4));
    }
}
BENCHMARK(BM_ObservationLikelihood);

static void BM_CompileObjective(benchmark::State& state) {
    const ModelBundle& bundle = drone();
    const Formula objective = parse_formula(bundle.objective, bundle.atoms);
    for (auto _ : state) {
        benchmark::DoNotOptimize(minimize(compile(objective)));
    }
}
BENCHMARK(BM_CompileObjective);

static void BM_Progression(benchmark::State& state) {
    const ModelBundle& bundle = drone();
    const Formula objective = parse_formula(bundle.objective, bundle.atoms);
    const std::vector<AtomPtr> atoms = atoms_of(objective);
    std::vector<LabelVector> labels;
    for (std::uint32_t bits = 0; bits < 4; ++bits) {
        LabelVector l;
        l.width = 2;
        l.bits = bits;
        labels.push_back(l);
    }
    for (auto _ : state) {
        for (const LabelVector& l : labels) {
            benchmark::DoNotOptimize(progress_over(objective, atoms, l));
        }
    }
    state.SetItemsProcessed(state.iterations() * 4);
}
BENCHMARK(BM_Progression);

static void BM_ProductStep(benchmark::State& state) {
    const Pomdp& m = drone().pomdp;
    const Dfa& dfa = drone_dfa();
    const ProductState x0 = init_product(m, dfa);
    Rng rng(7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(product_step(m, dfa, x0, 4, rng));
    }
}
BENCHMARK(BM_ProductStep);

static void BM_Search(benchmark::State& state) {
    const Pomdp& m = drone().pomdp;
    const Dfa& dfa = drone_dfa();
    const ProductState x0 = init_product(m, dfa);
    PlannerConfig cfg;
    cfg.simulations = static_cast<int>(state.range(0));
    cfg.max_depth = 20;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        Rng rng(++seed);
        benchmark::DoNotOptimize(search(m, dfa, x0, cfg, rng));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Search)->Arg(128)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
