#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>
#include <vector>

#include "beliefplan/automata.hpp"
#include "beliefplan/product.hpp"
#include "oracles.hpp"
#include "toy_models.hpp"

using namespace beliefplan;
using namespace testsupport;

namespace {

Dfa objective_dfa(const ModelBundle& bundle) {
    return compile(parse_formula(bundle.objective, bundle.atoms));
}

} // namespace

TEST_CASE("init_product pairs the empty history with the automaton start") {
    const ModelBundle bundle = swap_mix_model();
    const Dfa dfa = objective_dfa(bundle);

    const ProductState x = init_product(bundle.pomdp, dfa);
    CHECK_FALSE(x.is_sink());
    CHECK(x.q() == dfa.initial());
    CHECK(x.history().empty());
    CHECK(x.belief().probs() == bundle.pomdp.init());
    CHECK_FALSE(x.accepted(dfa));
    CHECK_FALSE(is_terminal(x));

    // atoms indexing outside the model are caught up front
    const AtomPtr far = indicator_atom("far", 5);
    const Dfa wide = compile(f_eventually(f_atom(far)));
    CHECK_THROWS_WITH_AS(init_product(bundle.pomdp, wide),
                         doctest::Contains("references state index"), ModelError);
}

TEST_CASE("accepting states pay on entry and then fall to the sink") {
    const ModelBundle bundle = swap_mix_model();
    const Pomdp& m = bundle.pomdp;
    const Dfa dfa = objective_dfa(bundle);
    const int kSwap = m.action_index("swap");
    const int kMix = m.action_index("mix");

    // the initial belief (1,0) does not satisfy `a`, so the automaton stays put
    const ProductState x0 = init_product(m, dfa);
    const StepOutcome first = product_step_with(m, dfa, x0, kSwap, 0);
    CHECK(first.reward == 0.0);
    CHECK(first.next.q() == dfa.initial());
    CHECK(first.observation == 0);
    CHECK(first.next.belief()[1] == 1.0); // deterministic swap

    // (0,1) satisfies `a`; stepping consumes that label and enters the final
    // state no matter which observation arrives
    for (int o = 0; o < m.observation_count(); ++o) {
        const StepOutcome hit = product_step_with(m, dfa, first.next, kMix, o);
        CHECK(hit.reward == 1.0);
        CHECK(dfa.is_final(hit.next.q()));
        CHECK(hit.next.accepted(dfa));
        CHECK_FALSE(is_terminal(hit.next)); // accepting but not yet the sink

        const StepOutcome fall = product_step_with(m, dfa, hit.next, kMix, o);
        CHECK(fall.next.is_sink());
        CHECK(fall.reward == 0.0);
        CHECK_FALSE(fall.observation.has_value());

        const StepOutcome stay = product_step_with(m, dfa, fall.next, kSwap, 1);
        CHECK(stay.next.is_sink());
        CHECK(stay.reward == 0.0);
        CHECK(is_terminal(stay.next));
    }
}

TEST_CASE("enumerate_successors lists the observation branches exactly") {
    const ModelBundle bundle = swap_mix_model();
    const Pomdp& m = bundle.pomdp;
    const Dfa dfa = objective_dfa(bundle);
    const ProductState x0 = init_product(m, dfa);

    for (int a = 0; a < m.action_count(); ++a) {
        const std::vector<double> likelihood =
            observation_likelihood(m, x0.belief(), a);
        const std::vector<SuccessorEntry> successors =
            enumerate_successors(m, dfa, x0, a);
        double total = 0.0;
        for (const SuccessorEntry& entry : successors) {
            total += entry.probability;
            CHECK(entry.reward == 0.0);
            CHECK(entry.state.q() == dfa.initial());
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        REQUIRE(successors.size() == 2);
        CHECK(successors[0].probability ==
              doctest::Approx(likelihood[0]).epsilon(1e-12));
        CHECK(successors[1].probability ==
              doctest::Approx(likelihood[1]).epsilon(1e-12));
        // the successors replay product_step_with observation by observation
        for (int o = 0; o < 2; ++o) {
            const StepOutcome replay = product_step_with(m, dfa, x0, a, o);
            CHECK(replay.next == successors[static_cast<std::size_t>(o)].state);
        }
    }

    // a single-observation model has a single deterministic branch
    const ModelBundle corridor = corridor_model();
    const Dfa cdfa = objective_dfa(corridor);
    const std::vector<SuccessorEntry> only = enumerate_successors(
        corridor.pomdp, cdfa, init_product(corridor.pomdp, cdfa), 0);
    REQUIRE(only.size() == 1);
    CHECK(only[0].probability == 1.0);

    // accepting states collapse to the one sink successor
    const ProductState accepting = product_step_with(
        bundle.pomdp, dfa,
        product_step_with(bundle.pomdp, dfa, x0, m.action_index("swap"), 0).next,
        m.action_index("mix"), 0).next;
    REQUIRE(dfa.is_final(accepting.q()));
    const std::vector<SuccessorEntry> sink_only =
        enumerate_successors(bundle.pomdp, dfa, accepting, 0);
    REQUIRE(sink_only.size() == 1);
    CHECK(sink_only[0].probability == 1.0);
    CHECK(sink_only[0].state.is_sink());
    CHECK(sink_only[0].reward == 0.0);
}

TEST_CASE("sampled product steps follow the enumerated distribution") {
    const ModelBundle bundle = swap_mix_model();
    const Pomdp& m = bundle.pomdp;
    const Dfa dfa = objective_dfa(bundle);
    const ProductState x0 = init_product(m, dfa);
    const int kMix = m.action_index("mix");

    const std::vector<SuccessorEntry> successors =
        enumerate_successors(m, dfa, x0, kMix);
    Rng rng(502188);
    const int n = 10000;
    std::vector<int> counts(successors.size(), 0);
    for (int i = 0; i < n; ++i) {
        const StepOutcome out = product_step(m, dfa, x0, kMix, rng);
        REQUIRE(out.observation.has_value());
        ++counts[static_cast<std::size_t>(*out.observation)];
        CHECK(out.next == successors[static_cast<std::size_t>(*out.observation)].state);
    }
    for (std::size_t o = 0; o < successors.size(); ++o) {
        const double p = successors[o].probability;
        const double freq = counts[o] / static_cast<double>(n);
        const double sigma = std::sqrt(p * (1.0 - p) / n);
        CHECK(std::abs(freq - p) <= 3.5 * sigma);
    }
}

TEST_CASE("random product episodes earn the reward at most once") {
    const ModelBundle bundle = swap_mix_model();
    const Pomdp& m = bundle.pomdp;
    const Dfa dfa = objective_dfa(bundle);
    const std::vector<int> actions = m.universally_available_actions();

    Rng rng(77001);
    int accepted_runs = 0;
    for (int run = 0; run < 500; ++run) {
        ProductState x = init_product(m, dfa);
        std::vector<LabelVector> consumed;
        double total = 0.0;
        for (int step = 0; step < 12 && !x.is_sink(); ++step) {
            const bool at_final = dfa.is_final(x.q());
            if (!at_final) {
                consumed.push_back(label_of(x.belief(), dfa.atoms()));
            }
            const int a = actions[static_cast<std::size_t>(
                rng.uniform_int(static_cast<int>(actions.size())))];
            const StepOutcome out = product_step(m, dfa, x, a, rng);
            if (at_final) CHECK(out.next.is_sink());
            total += out.reward;
            x = out.next;
        }
        CHECK((total == 0.0 || total == 1.0));
        // cumulative reward 1 is exactly prefix acceptance of the labels the
        // automaton consumed
        CHECK(accepts_prefix(dfa, consumed) == (total == 1.0));
        if (total == 1.0) ++accepted_runs;
    }
    // both outcomes actually occur under the random policy
    CHECK(accepted_runs > 50);
    CHECK(accepted_runs < 500);
}

TEST_CASE("a dead automaton state never recovers or pays") {
    const ModelBundle bundle = noisy_trap_model();
    const Pomdp& m = bundle.pomdp;
    const Dfa dfa = objective_dfa(bundle);
    REQUIRE(dfa.dead().has_value());
    const int dead_q = *dfa.dead();

    ProductState x = ProductState::make(History::initial(m), dead_q);
    for (int step = 0; step < 4; ++step) {
        for (int a : m.universally_available_actions()) {
            for (const SuccessorEntry& entry : enumerate_successors(m, dfa, x, a)) {
                CHECK(entry.reward == 0.0);
                CHECK(dfa.is_dead(entry.state.q()));
                CHECK_FALSE(entry.state.accepted(dfa));
            }
        }
        x = enumerate_successors(m, dfa, x, 0)[0].state;
    }
}

TEST_CASE("reachable product states keep their invariants") {
    const ModelBundle bundle = noisy_trap_model();
    const Pomdp& m = bundle.pomdp;
    const Dfa dfa = objective_dfa(bundle);

    std::vector<ProductState> frontier{init_product(m, dfa)};
    int visited = 0;
    for (int depth = 0; depth < 4; ++depth) {
        std::vector<ProductState> next;
        for (const ProductState& x : frontier) {
            ++visited;
            for (int a : m.universally_available_actions()) {
                double total = 0.0;
                for (const SuccessorEntry& entry :
                     enumerate_successors(m, dfa, x, a)) {
                    total += entry.probability;
                    CHECK(entry.probability > 0.0);
                    CHECK((entry.reward == 0.0 || entry.reward == 1.0));
                    if (entry.reward == 1.0) {
                        CHECK(dfa.is_final(entry.state.q()));
                        CHECK_FALSE(x.accepted(dfa));
                    }
                    if (!entry.state.is_sink()) {
                        CHECK(entry.state.belief().sum() ==
                              doctest::Approx(1.0).epsilon(1e-9));
                        next.push_back(entry.state);
                    }
                }
                CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
            }
        }
        frontier = std::move(next);
    }
    CHECK(visited > 10);
}

TEST_CASE("product states compare by history and automaton state") {
    const ModelBundle bundle = swap_mix_model();
    const Pomdp& m = bundle.pomdp;

    const History h0 = History::initial(m);
    const History h1 = h0.extend(m, 0, 0);
    CHECK(ProductState::sink() == ProductState::sink());
    CHECK(ProductState::make(h0, 0) == ProductState::make(h0, 0));
    CHECK_FALSE(ProductState::make(h0, 0) == ProductState::make(h0, 1));
    CHECK_FALSE(ProductState::make(h0, 0) == ProductState::make(h1, 0));
    CHECK_FALSE(ProductState::make(h0, 0) == ProductState::sink());
}
