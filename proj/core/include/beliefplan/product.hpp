#pragma once

#include <optional>
#include <vector>

#include "beliefplan/automata.hpp"
#include "beliefplan/pomdp.hpp"

namespace beliefplan {

/// State of the product of the (history-represented) belief MDP and a DFA:
/// either the absorbing sink entered after acceptance, or a history with
/// its exact belief paired with the current automaton state.
class ProductState {
public:
    static ProductState sink() {
        ProductState x;
        x.is_sink_ = true;
        return x;
    }

    static ProductState make(History history, int q) {
        ProductState x;
        x.history_ = std::move(history);
        x.q_ = q;
        return x;
    }

    bool is_sink() const { return is_sink_; }
    const History& history() const { return history_; }
    const Belief& belief() const { return history_.belief(); }
    int q() const { return q_; }

    /// Reward has been granted: the run reached an accepting automaton
    /// state (and possibly fell to the sink afterwards).
    bool accepted(const Dfa& d) const {
        return is_sink_ || d.is_final(q_);
    }

    bool operator==(const ProductState& other) const {
        if (is_sink_ != other.is_sink_) return false;
        if (is_sink_) return true;
        return q_ == other.q_ && history_ == other.history_;
    }

private:
    ProductState() = default;
    bool is_sink_ = false;
    History history_;
    int q_ = -1;
};

/// Result of one product transition. Reward is 1 exactly when the
/// transition enters an accepting automaton state (which can happen only
/// once per episode: accepting states fall to the sink on the next step).
struct StepOutcome {
    ProductState next;
    double reward = 0.0;
    std::optional<int> observation;
};

struct SuccessorEntry {
    double probability = 0.0;
    ProductState state;
    double reward = 0.0;
};

/// Initial product state: empty history (belief = s_init) paired with the
/// DFA's initial state. Checks that the DFA's atoms fit the model dimension.
ProductState init_product(const Pomdp& m, const Dfa& d);

/// Product transition given a fixed observation: the automaton consumes the
/// label of the *source* belief (q' = delta(q, L(b))), the history extends
/// by (a, o). Accepting states fall to the sink with reward 0; the sink
/// self-loops.
StepOutcome product_step_with(const Pomdp& m, const Dfa& d, const ProductState& x,
                              int a, int o);

/// Product transition with the observation sampled from its likelihood
/// under (belief, a).
StepOutcome product_step(const Pomdp& m, const Dfa& d, const ProductState& x,
                         int a, Rng& rng);

/// All positive-probability successors of a non-sink state under `a`, one
/// per observation; probabilities are the observation likelihoods and sum
/// to 1. Accepting states yield the single sink successor.
std::vector<SuccessorEntry> enumerate_successors(const Pomdp& m, const Dfa& d,
                                                 const ProductState& x, int a);

inline bool is_terminal(const ProductState& x) { return x.is_sink(); }

} // namespace beliefplan
