#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "beliefplan/product.hpp"
#include "beliefplan/rng.hpp"

namespace beliefplan {

struct PlannerConfig {
    int simulations = 2000;
    int max_depth = 20;         // d_max
    double ucb_c = 1.0;
    double value_init = 0.0;    // prior value for fresh action nodes
    double count_init = 0.0;    // prior count for fresh action nodes
};

struct ActionStats {
    double n = 0.0;
    double v = 0.0;
};

/// UCB1 choice over a node's action children: any unvisited action (n == 0)
/// is taken first in index order, otherwise argmax of v + c*sqrt(ln(total)/n).
int select_ucb_action(std::span<const ActionStats> stats, double total_visits,
                      double exploration_c);

/// One node of the search tree, keyed by the product history it represents.
/// Children extend the history by one (action, observation) pair; the
/// automaton co-move is deterministic, so no further key is needed.
struct TreeNode {
    explicit TreeNode(ProductState s) : state(std::move(s)) {}

    ProductState state;
    double entry_reward = 0.0;  // reward granted on the transition into this node
    double n = 0.0;             // visit count
    double v = 0.0;             // mean return of simulations through this node
    bool expanded = false;
    std::vector<ActionStats> actions;
    std::map<std::pair<int, int>, std::unique_ptr<TreeNode>> children; // (a,o)
};

struct SearchResult {
    int action = 0;
    double root_value = 0.0;
    double root_visits = 0.0;
    std::vector<ActionStats> action_stats;
    std::size_t nodes_expanded = 0;
};

/// Monte Carlo tree search over product history states. One Searcher owns
/// one tree; the model and automaton are shared read-only, so independent
/// searches can run concurrently with their own rng streams.
class Searcher {
public:
    Searcher(const Pomdp& m, const Dfa& d, ProductState root, PlannerConfig cfg);

    /// Runs one simulation: samples a hidden state from the root belief and
    /// descends. Returns the simulation's return.
    double simulate_once(Rng& rng);

    /// Runs the configured number of simulations and reports the action
    /// maximizing the root action-value estimate (ties to the lowest
    /// action index).
    SearchResult run(Rng& rng);

    const TreeNode& root() const { return *root_; }
    std::size_t nodes_expanded() const { return nodes_expanded_; }
    const std::vector<int>& actions() const { return actions_; }

private:
    double simulate(int s, TreeNode& node, int depth, Rng& rng);
    double rollout(int s, ProductState x, int depth, Rng& rng);

    const Pomdp& model_;
    const Dfa& dfa_;
    PlannerConfig cfg_;
    std::unique_ptr<TreeNode> root_;
    std::vector<int> actions_;  // universally available action set
    std::size_t nodes_expanded_ = 0;
};

/// Convenience wrapper: fresh tree, cfg.simulations iterations, best root
/// action. The root must not be the sink.
SearchResult search(const Pomdp& m, const Dfa& d, const ProductState& root,
                    const PlannerConfig& cfg, Rng& rng);

/// Uniform-random-policy playout from `x`: accumulates the product reward
/// stream until the depth bound or the sink. Returns 0 or 1.
double rollout_policy_value(const Pomdp& m, const Dfa& d, const ProductState& x,
                            int depth, int max_depth, Rng& rng);

struct ExpectimaxOptions {
    /// Guard on the number of evaluated nodes; exceeding it raises PlanError.
    std::size_t node_budget = 1000000;
};

/// Exact finite-horizon value of a product state: alternating max over
/// actions and expectation over observation branches, horizon `horizon`,
/// terminal value 1 at the sink or an accepting automaton state and 0
/// otherwise. Ground-truth oracle for MCTS convergence checks.
double expectimax_value(const Pomdp& m, const Dfa& d, const ProductState& x,
                        int horizon, const ExpectimaxOptions& options = {});

} // namespace beliefplan
