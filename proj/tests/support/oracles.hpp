#pragma once

#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "beliefplan/automata.hpp"
#include "beliefplan/formula.hpp"
#include "beliefplan/planner.hpp"
#include "beliefplan/pomdp.hpp"
#include "beliefplan/product.hpp"
#include "beliefplan/rng.hpp"

// Reference implementations kept deliberately independent of the library
// internals: direct recursion instead of progression, dense matrices instead
// of sparse rows, hand-written tables instead of the generator's arithmetic.

namespace testsupport {

using namespace beliefplan;

// ---------------------------------------------------------------------------
// three-valued finite-trace semantics

enum class K3 { False, Unknown, True };

K3 k3_and(K3 a, K3 b);
K3 k3_or(K3 a, K3 b);

// Direct recursive evaluation of a co-safe formula on a finite label word.
// Atoms and temporal operators past the end of the word are Unknown; and/or
// combine in the Kleene lattice. Agrees with progression-based
// trace_satisfies on canonical formulas.
K3 kleene_eval(const Formula& f, std::span<const AtomPtr> atoms,
               std::span<const LabelVector> word, std::size_t pos);

K3 to_k3(TraceStatus status);

// ---------------------------------------------------------------------------
// formula and word generators

// Atom whose inequality is the indicator of hidden state `index` (> 0.5), so
// point-mass beliefs give crisp truth values.
AtomPtr indicator_atom(const std::string& name, int index);

std::vector<AtomPtr> indicator_atoms(std::initializer_list<const char*> names);

AtomTable table_of(std::span<const AtomPtr> atoms);

// Uniform-ish random formula of AST height <= depth (leaves at height 0)
// over the given atoms: literals, and/or, X, U, F.
Formula random_formula(Rng& rng, std::span<const AtomPtr> atoms, int depth);

std::vector<LabelVector> random_word(Rng& rng, int width, int length);

LabelVector lv(int width, std::uint32_t bits);

// ---------------------------------------------------------------------------
// numeric oracles

// Bayes update through dense matrices built from the sparse rows.
std::vector<double> dense_belief_update(const Pomdp& m,
                                        const std::vector<double>& b, int a,
                                        int o);

// Exact value of the uniform-random policy over universally available
// actions, as accumulated product reward within `remaining` steps.
double uniform_policy_value(const Pomdp& m, const Dfa& d, const ProductState& x,
                            int remaining);

// Per-action expectimax values at a product state (the max over entries is
// expectimax_value(x, horizon)).
std::vector<double> expectimax_q(const Pomdp& m, const Dfa& d,
                                 const ProductState& x, int horizon,
                                 std::span<const int> actions);

} // namespace testsupport
