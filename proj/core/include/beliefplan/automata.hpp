#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "beliefplan/formula.hpp"

namespace beliefplan {

/// Deterministic finite automaton over label vectors of a fixed atom set.
/// The transition table is total: every (state, label) pair has exactly one
/// successor. Final states and the dead state (when present) are absorbing.
class Dfa {
public:
    Dfa(std::vector<AtomPtr> atoms,
        std::vector<std::vector<int>> transitions,
        int initial,
        std::vector<bool> finals,
        std::optional<int> dead,
        std::vector<std::string> state_labels);

    int state_count() const { return static_cast<int>(transitions_.size()); }
    int atom_count() const { return static_cast<int>(atoms_.size()); }
    /// Label alphabet size, 2^atom_count.
    int alphabet_size() const { return 1 << atom_count(); }

    int initial() const { return initial_; }
    bool is_final(int q) const { return finals_[static_cast<std::size_t>(q)]; }
    std::optional<int> dead() const { return dead_; }
    bool is_dead(int q) const { return dead_ && *dead_ == q; }

    /// States excluding the dead one. All states of a compiled or minimized
    /// automaton are reachable from the initial state.
    int live_state_count() const {
        return state_count() - (dead_ ? 1 : 0);
    }

    const std::vector<AtomPtr>& atoms() const { return atoms_; }
    /// Human-readable description of each state (residual formulas for
    /// compiled automata).
    const std::vector<std::string>& state_labels() const { return state_labels_; }

    int step(int q, const LabelVector& label) const {
        return transitions_[static_cast<std::size_t>(q)][label.bits];
    }
    int step_bits(int q, std::uint32_t bits) const {
        return transitions_[static_cast<std::size_t>(q)][bits];
    }

    const std::vector<std::vector<int>>& transitions() const { return transitions_; }

private:
    std::vector<AtomPtr> atoms_;
    std::vector<std::vector<int>> transitions_; // [state][label bits]
    int initial_;
    std::vector<bool> finals_;
    std::optional<int> dead_;
    std::vector<std::string> state_labels_;
};

struct CompileOptions {
    /// Bound on the progression closure; exceeding it raises CompileError.
    int max_states = 100000;
};

/// Compiles a co-safe formula to a DFA whose states are the closure of the
/// formula under progression over all labels, in canonical form. The state
/// `true` is the unique final state, `false` (when reachable) the dead
/// state. Acceptance of a finite label word coincides with
/// trace_satisfies(f, word) == Satisfied. Rejects formulas with no
/// reachable accepting state (unsatisfiable objectives).
Dfa compile(const Formula& f, const CompileOptions& options = {});

/// Language-preserving minimization: Hopcroft partition refinement after
/// pruning unreachable states. The dead state of the result is the class
/// from which no final state is reachable, if such a class exists.
Dfa minimize(const Dfa& d);

/// True iff the run from the initial state over `word` visits a final state
/// at any point (the initial state counts).
bool accepts_prefix(const Dfa& d, std::span<const LabelVector> word);

/// Graphviz DOT rendering. Edges between the same state pair are merged and
/// their label sets shown as simplified atom-name conjunctions.
std::string export_dot(const Dfa& d);

/// JSON dump (states, per-state transition array indexed by label bitmask,
/// initial, finals, dead) for golden-file tests and tooling.
std::string dfa_to_json(const Dfa& d);

} // namespace beliefplan
