#include "beliefplan/product.hpp"

namespace beliefplan {

ProductState init_product(const Pomdp& m, const Dfa& d) {
    for (const AtomPtr& atom : d.atoms()) {
        for (const LinearAtom& member : atom->members) {
            for (const auto& [index, coef] : member.coeffs) {
                if (index < 0 || index >= m.state_count()) {
                    throw ModelError("atom '" + atom->name +
                                     "' references state index " +
                                     std::to_string(index) +
                                     " outside the model's state space");
                }
            }
        }
    }
    return ProductState::make(History::initial(m), d.initial());
}

StepOutcome product_step_with(const Pomdp& m, const Dfa& d, const ProductState& x,
                              int a, int o) {
    if (x.is_sink()) return {ProductState::sink(), 0.0, std::nullopt};
    if (d.is_final(x.q())) {
        // Reward was granted on the transition that entered the accepting
        // state; the run now falls to the sink.
        return {ProductState::sink(), 0.0, std::nullopt};
    }
    const LabelVector label = label_of(x.belief(), d.atoms());
    const int q_next = d.step(x.q(), label);
    History extended = x.history().extend(m, a, o);
    const double reward = d.is_final(q_next) ? 1.0 : 0.0;
    return {ProductState::make(std::move(extended), q_next), reward, o};
}

StepOutcome product_step(const Pomdp& m, const Dfa& d, const ProductState& x,
                         int a, Rng& rng) {
    if (x.is_sink() || d.is_final(x.q())) return product_step_with(m, d, x, a, 0);
    const std::vector<double> likelihood = observation_likelihood(m, x.belief(), a);
    const int o = rng.categorical(likelihood);
    return product_step_with(m, d, x, a, o);
}

std::vector<SuccessorEntry> enumerate_successors(const Pomdp& m, const Dfa& d,
                                                 const ProductState& x, int a) {
    if (x.is_sink() || d.is_final(x.q())) {
        return {SuccessorEntry{1.0, ProductState::sink(), 0.0}};
    }
    const LabelVector label = label_of(x.belief(), d.atoms());
    const int q_next = d.step(x.q(), label);
    const double reward = d.is_final(q_next) ? 1.0 : 0.0;
    const std::vector<double> likelihood = observation_likelihood(m, x.belief(), a);
    std::vector<SuccessorEntry> out;
    for (int o = 0; o < m.observation_count(); ++o) {
        const double p = likelihood[static_cast<std::size_t>(o)];
        if (p <= 0.0) continue;
        History extended = x.history().extend(m, a, o);
        out.push_back(SuccessorEntry{
            p, ProductState::make(std::move(extended), q_next), reward});
    }
    return out;
}

} // namespace beliefplan
