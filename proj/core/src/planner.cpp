#include "beliefplan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace beliefplan {

int select_ucb_action(std::span<const ActionStats> stats, double total_visits,
                      double exploration_c) {
    for (std::size_t i = 0; i < stats.size(); ++i) {
        if (stats[i].n <= 0.0) return static_cast<int>(i);
    }
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    const double log_total = std::log(std::max(total_visits, 1.0));
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const double score =
            stats[i].v + exploration_c * std::sqrt(log_total / stats[i].n);
        if (score > best_score) {
            best_score = score;
            best = static_cast<int>(i);
        }
    }
    return best;
}

Searcher::Searcher(const Pomdp& m, const Dfa& d, ProductState root,
                   PlannerConfig cfg)
    : model_(m), dfa_(d), cfg_(cfg) {
    if (cfg_.simulations < 1) throw PlanError("simulation count must be >= 1");
    if (cfg_.max_depth < 1) throw PlanError("search depth must be >= 1");
    if (cfg_.ucb_c < 0.0) throw PlanError("exploration constant must be >= 0");
    if (root.is_sink()) throw PlanError("cannot search from the sink");
    actions_ = model_.universally_available_actions();
    if (actions_.empty()) {
        throw PlanError("model has no action available in every state");
    }
    root_ = std::make_unique<TreeNode>(std::move(root));
}

double Searcher::simulate_once(Rng& rng) {
    const int s = rng.categorical(root_->state.belief().probs());
    return simulate(s, *root_, 0, rng);
}

double Searcher::simulate(int s, TreeNode& node, int depth, Rng& rng) {
    if (depth >= cfg_.max_depth || node.state.is_sink()) return 0.0;
    if (dfa_.is_dead(node.state.q())) {
        // No continuation from a dead automaton state can ever score; skip
        // the subtree instead of expanding it.
        return 0.0;
    }
    if (!node.expanded) {
        node.expanded = true;
        node.actions.assign(actions_.size(),
                            ActionStats{cfg_.count_init, cfg_.value_init});
        ++nodes_expanded_;
        return rollout(s, node.state, depth, rng);
    }

    const int choice = select_ucb_action(node.actions, node.n, cfg_.ucb_c);
    const int action = actions_[static_cast<std::size_t>(choice)];

    // Coupled sampling: step the hidden-state particle, then drive the
    // product transition with the sampled observation.
    const auto [s_next, o] = sample_step(model_, s, action, rng);
    StepOutcome outcome = product_step_with(model_, dfa_, node.state, action, o);

    auto& child = node.children[{action, o}];
    if (!child) {
        child = std::make_unique<TreeNode>(std::move(outcome.next));
        child->entry_reward = outcome.reward;
    }
    const double ret = outcome.reward + simulate(s_next, *child, depth + 1, rng);

    node.n += 1.0;
    node.v += (ret - node.v) / node.n;
    ActionStats& stats = node.actions[static_cast<std::size_t>(choice)];
    stats.n += 1.0;
    stats.v += (ret - stats.v) / stats.n;
    return ret;
}

double Searcher::rollout(int s, ProductState x, int depth, Rng& rng) {
    double total = 0.0;
    while (depth < cfg_.max_depth && !x.is_sink()) {
        if (dfa_.is_dead(x.q())) break;
        const int action = actions_[static_cast<std::size_t>(
            rng.uniform_int(static_cast<int>(actions_.size())))];
        const auto [s_next, o] = sample_step(model_, s, action, rng);
        StepOutcome outcome = product_step_with(model_, dfa_, x, action, o);
        total += outcome.reward;
        x = std::move(outcome.next);
        s = s_next;
        ++depth;
    }
    return total;
}

SearchResult Searcher::run(Rng& rng) {
    for (int i = 0; i < cfg_.simulations; ++i) simulate_once(rng);
    SearchResult result;
    result.root_value = root_->v;
    result.root_visits = root_->n;
    result.action_stats = root_->actions;
    result.nodes_expanded = nodes_expanded_;
    int best = 0;
    for (std::size_t i = 1; i < root_->actions.size(); ++i) {
        if (root_->actions[i].v > root_->actions[static_cast<std::size_t>(best)].v) {
            best = static_cast<int>(i);
        }
    }
    result.action = actions_[static_cast<std::size_t>(best)];
    return result;
}

SearchResult search(const Pomdp& m, const Dfa& d, const ProductState& root,
                    const PlannerConfig& cfg, Rng& rng) {
    Searcher searcher(m, d, root, cfg);
    return searcher.run(rng);
}

double rollout_policy_value(const Pomdp& m, const Dfa& d, const ProductState& x,
                            int depth, int max_depth, Rng& rng) {
    if (x.is_sink()) return 0.0;
    const std::vector<int> actions = m.universally_available_actions();
    if (actions.empty()) throw PlanError("model has no universally available action");
    int s = rng.categorical(x.belief().probs());
    ProductState cur = x;
    double total = 0.0;
    while (depth < max_depth && !cur.is_sink()) {
        if (d.is_dead(cur.q())) break;
        const int action = actions[static_cast<std::size_t>(
            rng.uniform_int(static_cast<int>(actions.size())))];
        const auto [s_next, o] = sample_step(m, s, action, rng);
        StepOutcome outcome = product_step_with(m, d, cur, action, o);
        total += outcome.reward;
        cur = std::move(outcome.next);
        s = s_next;
        ++depth;
    }
    return total;
}

namespace {

struct ExpectimaxContext {
    const Pomdp& m;
    const Dfa& d;
    const std::vector<int> actions;
    std::size_t budget;
    std::size_t visited = 0;

    double value(const ProductState& x, int remaining) {
        if (++visited > budget) {
            throw PlanError("expectimax node budget of " + std::to_string(budget) +
                            " exceeded");
        }
        if (x.is_sink() || d.is_final(x.q())) return 1.0;
        if (remaining <= 0) return 0.0;
        double best = 0.0;
        for (int a : actions) {
            double expectation = 0.0;
            for (const SuccessorEntry& entry : enumerate_successors(m, d, x, a)) {
                expectation += entry.probability * value(entry.state, remaining - 1);
            }
            best = std::max(best, expectation);
        }
        return best;
    }
};

} // namespace

double expectimax_value(const Pomdp& m, const Dfa& d, const ProductState& x,
                        int horizon, const ExpectimaxOptions& options) {
    ExpectimaxContext ctx{m, d, m.universally_available_actions(),
                          options.node_budget};
    if (ctx.actions.empty()) {
        throw PlanError("model has no universally available action");
    }
    return ctx.value(x, horizon);
}

} // namespace beliefplan
