#pragma once

#include <array>
#include <vector>

#include "beliefplan/pomdp.hpp"
#include "beliefplan/rng.hpp"

namespace testsupport {

using namespace beliefplan;

// 2-state, 2-action, 2-observation model with a unique optimal plan for its
// "F a" objective: `swap` moves the point-mass belief across deterministically
// (reaching a in one step), `mix` scrambles the state and caps the value at
// 3/5 over horizon 4. O(s0) = (0.8, 0.2), O(s1) = (0.2, 0.8), init = (1, 0),
// a = b[s1] > 0.9.
ModelBundle swap_mix_model();

// 3-state line with an absorbing trap: `go` reaches the win state w.p. 0.9
// and the trap w.p. 0.1, `wait` idles; observations are noisy in every
// state. Objective "!t U w" has a dead automaton state.
ModelBundle noisy_trap_model();

// Deterministic 3-cell corridor with a single forced observation; `fwd`
// advances, `stay` idles. Objective "F end" pays on step 3 of the fwd-fwd
// plan (the label of the end cell is read one step after arrival).
ModelBundle corridor_model();

// Single state, single action, objective satisfied by the initial belief.
ModelBundle instant_model();

// Dense random model: every action available everywhere, full-support
// observation rows, random init. Atoms a (b[0] > 0.6) and b (b[last] >= 0.3),
// objective "F a".
ModelBundle random_model(Rng& rng, int states, int actions, int observations);

// Hand-written copy of the drone sensor contract, indexed by the target's
// offset from the drone. Order: SW, NW, NE, SE, None.
std::array<double, 5> expected_sensor_row(int dx, int dy);

} // namespace testsupport
