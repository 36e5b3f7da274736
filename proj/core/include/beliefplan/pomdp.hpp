#pragma once

#include <string>
#include <utility>
#include <vector>

#include "beliefplan/belief.hpp"
#include "beliefplan/formula.hpp"
#include "beliefplan/rng.hpp"

namespace beliefplan {

/// Finite POMDP: hidden states, actions, sparse transition rows, an initial
/// distribution, and per-state observation distributions. An action is
/// available in a state iff its transition row sums to 1; unavailable
/// actions have empty (all-zero) rows.
class Pomdp {
public:
    using SparseRow = std::vector<std::pair<int, double>>; // (state, prob)

    Pomdp(int state_count,
          std::vector<std::string> action_names,
          std::vector<std::string> observation_names,
          std::vector<double> init);

    int state_count() const { return state_count_; }
    int action_count() const { return static_cast<int>(action_names_.size()); }
    int observation_count() const { return static_cast<int>(observation_names_.size()); }

    const std::vector<std::string>& action_names() const { return action_names_; }
    const std::vector<std::string>& observation_names() const { return observation_names_; }
    int action_index(const std::string& name) const;
    int observation_index(const std::string& name) const;

    const std::vector<double>& init() const { return init_; }
    Belief initial_belief() const { return Belief(init_); }

    void set_transition(int s, int a, int next, double p);
    void set_observation(int s, int o, double p);

    const SparseRow& transition_row(int s, int a) const {
        return transitions_[static_cast<std::size_t>(s * action_count() + a)];
    }
    double observation_prob(int s, int o) const {
        return observations_[static_cast<std::size_t>(s * observation_count() + o)];
    }
    std::span<const double> observation_row(int s) const {
        return {observations_.data() + static_cast<std::size_t>(s) * observation_count(),
                static_cast<std::size_t>(observation_count())};
    }

    bool action_available(int s, int a) const {
        return !transition_row(s, a).empty();
    }
    std::vector<int> available_actions(int s) const;
    /// Actions available in every state; what belief-space planners act on.
    std::vector<int> universally_available_actions() const;

    /// Checks all stochasticity invariants (row sums within `tol`,
    /// nonnegativity, init normalization); throws ModelError naming the
    /// offending row.
    void validate(double tol = 1e-9) const;

private:
    int state_count_;
    std::vector<std::string> action_names_;
    std::vector<std::string> observation_names_;
    std::vector<double> init_;
    std::vector<SparseRow> transitions_;  // [s * |A| + a]
    std::vector<double> observations_;    // [s * |Omega| + o]
};

/// Exact Bayes posterior after taking `a` and observing `o` from belief `b`:
/// numerator per state s is O(s,o) * sum_s' b(s') T(s',a,s), normalized.
/// Throws ModelError when the observation has zero likelihood under (b, a).
Belief belief_update(const Pomdp& m, const Belief& b, int a, int o);

/// Distribution over observations after taking `a` from belief `b`; entry o
/// is the normalizer of the corresponding belief update.
std::vector<double> observation_likelihood(const Pomdp& m, const Belief& b, int a);

/// Samples s' from T(s,a,.) then o from O(s',.). `a` must be available in s.
std::pair<int, int> sample_step(const Pomdp& m, int s, int a, Rng& rng);

/// Action-observation sequence with its exact belief cached.
class History {
public:
    static History initial(const Pomdp& m) {
        History h;
        h.belief_ = m.initial_belief();
        return h;
    }

    History extend(const Pomdp& m, int a, int o) const {
        History next;
        next.steps_ = steps_;
        next.steps_.emplace_back(a, o);
        next.belief_ = belief_update(m, belief_, a, o);
        return next;
    }

    const std::vector<std::pair<int, int>>& steps() const { return steps_; }
    const Belief& belief() const { return belief_; }
    bool empty() const { return steps_.empty(); }

    bool operator==(const History& other) const {
        return steps_ == other.steps_;
    }

private:
    std::vector<std::pair<int, int>> steps_;
    Belief belief_;
};

/// A POMDP together with its declared atoms and objective text, as loaded
/// from a model file or produced by a generator.
struct ModelBundle {
    Pomdp pomdp;
    AtomTable atoms;
    std::string objective;
};

/// Loads and validates the line-oriented model format (see save_model for
/// the layout). Errors carry the offending line number; validation errors
/// name the row.
ModelBundle load_model(const std::string& path);
ModelBundle load_model_text(const std::string& text);

/// Serializes a bundle so load_model_text reproduces it exactly (doubles
/// round-trip through 17 significant digits).
std::string save_model(const ModelBundle& bundle);
void save_model_file(const ModelBundle& bundle, const std::string& path);

struct DroneProbingParams {
    int width = 4;
    int height = 4;
    double threshold = 0.9;
    int goal_x = 3;
    int goal_y = 3;
};

/// Grid-world probing benchmark: hidden state = (drone cell, target cell),
/// deterministic drone moves N/S/E/W/X with off-grid moves staying put, a
/// uniformly moving target, and a quadrant sensor over the 3x3 field of
/// view. Emits the `measured` (any belief component > threshold) and `goal`
/// (drone at the goal cell) atoms plus the probe-then-land objective.
ModelBundle drone_probing_model(const DroneProbingParams& params = {});

} // namespace beliefplan
