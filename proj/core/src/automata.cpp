#include "beliefplan/automata.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "json.hpp"

namespace beliefplan {

Dfa::Dfa(std::vector<AtomPtr> atoms,
         std::vector<std::vector<int>> transitions,
         int initial,
         std::vector<bool> finals,
         std::optional<int> dead,
         std::vector<std::string> state_labels)
    : atoms_(std::move(atoms)),
      transitions_(std::move(transitions)),
      initial_(initial),
      finals_(std::move(finals)),
      dead_(dead),
      state_labels_(std::move(state_labels)) {
    const int n = state_count();
    const std::size_t alphabet = 1u << atoms_.size();
    if (n == 0) throw ModelError("automaton needs at least one state");
    if (initial_ < 0 || initial_ >= n) throw ModelError("initial state out of range");
    if (finals_.size() != static_cast<std::size_t>(n)) {
        throw ModelError("finals vector size mismatch");
    }
    if (state_labels_.size() != static_cast<std::size_t>(n)) {
        throw ModelError("state label vector size mismatch");
    }
    if (dead_ && (*dead_ < 0 || *dead_ >= n)) {
        throw ModelError("dead state out of range");
    }
    for (const auto& row : transitions_) {
        if (row.size() != alphabet) {
            throw ModelError("transition row does not cover the label alphabet");
        }
        for (int target : row) {
            if (target < 0 || target >= n) {
                throw ModelError("transition target out of range");
            }
        }
    }
}

namespace {

// Progression of nested Until formulas can produce residuals that never
// repeat a printed form: each step wraps the previous residual in fresh
// Or(And(...)) layers, so interning states by canonical string would
// enumerate forever while the reprs grow without bound. Distributing a
// residual into disjunctive normal form over its non-Boolean parts and
// dropping subsumed clauses collapses those chains. Every literal in a
// residual is a subterm of the original objective, which makes the closure
// finite again. The rewrite is a propositional identity, so acceptance is
// unchanged, and a formula already in DNF shape rebuilds to the same string.

constexpr std::size_t kClauseBound = 1u << 14;

using Clause = std::map<std::string, Formula>;

void dnf_clauses(const Formula& f, std::vector<Clause>& out) {
    switch (f.kind()) {
    case FormulaKind::True:
        out.push_back({});
        return;
    case FormulaKind::False:
        return;
    case FormulaKind::Or: {
        dnf_clauses(f.left(), out);
        dnf_clauses(f.right(), out);
        return;
    }
    case FormulaKind::And: {
        std::vector<Clause> lhs;
        std::vector<Clause> rhs;
        dnf_clauses(f.left(), lhs);
        dnf_clauses(f.right(), rhs);
        if (lhs.size() * rhs.size() + out.size() > kClauseBound) {
            throw CompileError("progression residual exceeds the clause bound of " +
                               std::to_string(kClauseBound));
        }
        for (const Clause& a : lhs) {
            for (const Clause& b : rhs) {
                Clause merged = a;
                merged.insert(b.begin(), b.end());
                out.push_back(std::move(merged));
            }
        }
        return;
    }
    default:
        out.push_back({{to_string(f), f}});
        return;
    }
}

bool clause_subset(const Clause& small, const Clause& big) {
    if (small.size() > big.size()) return false;
    for (const auto& [key, lit] : small) {
        if (!big.count(key)) return false;
    }
    return true;
}

Formula normalize_residual(const Formula& f) {
    std::vector<Clause> clauses;
    dnf_clauses(f, clauses);
    if (clauses.empty()) return f_false();

    // A clause implies any clause it contains, so keep only the minimal ones.
    std::sort(clauses.begin(), clauses.end(),
              [](const Clause& a, const Clause& b) { return a.size() < b.size(); });
    std::vector<Clause> kept;
    for (Clause& c : clauses) {
        bool subsumed = false;
        for (const Clause& k : kept) {
            if (clause_subset(k, c)) {
                subsumed = true;
                break;
            }
        }
        if (!subsumed) kept.push_back(std::move(c));
    }

    Formula result;
    for (const Clause& c : kept) {
        Formula conj = f_true();
        for (const auto& [key, lit] : c) conj = f_and(conj, lit);
        result = result ? f_or(result, conj) : conj;
    }
    return result;
}

} // namespace

Dfa compile(const Formula& f, const CompileOptions& options) {
    if (!f) throw CompileError("cannot compile an empty formula");
    if (f.is_false()) {
        throw CompileError("objective is unsatisfiable: it is equivalent to false");
    }
    std::vector<AtomPtr> atoms = atoms_of(f);
    const int width = static_cast<int>(atoms.size());
    if (width > 20) {
        throw CompileError("alphabet too large: " + std::to_string(width) +
                           " atoms would give " + std::to_string(1u << width) +
                           " labels per state");
    }
    const std::uint32_t alphabet = 1u << width;

    std::vector<Formula> states;
    std::map<std::string, int> index;
    std::vector<std::vector<int>> transitions;

    auto intern = [&](const Formula& g) {
        auto [it, fresh] = index.emplace(to_string(g), static_cast<int>(states.size()));
        if (fresh) {
            if (static_cast<int>(states.size()) >= options.max_states) {
                throw CompileError("progression closure exceeds the state bound of " +
                                   std::to_string(options.max_states));
            }
            states.push_back(g);
        }
        return it->second;
    };

    intern(f);
    for (std::size_t q = 0; q < states.size(); ++q) {
        std::vector<int> row(alphabet);
        for (std::uint32_t bits = 0; bits < alphabet; ++bits) {
            LabelVector label{bits, width};
            // states[q] may be invalidated by intern() growing the vector,
            // so re-read it each iteration.
            Formula successor =
                normalize_residual(progress_over(states[q], atoms, label));
            row[bits] = intern(successor);
        }
        transitions.push_back(std::move(row));
    }

    const int n = static_cast<int>(states.size());
    std::vector<bool> finals(n, false);
    std::optional<int> dead;
    std::vector<std::string> labels(n);
    bool any_final = false;
    for (int q = 0; q < n; ++q) {
        labels[q] = to_string(states[q]);
        if (states[q].is_true()) {
            finals[q] = true;
            any_final = true;
        }
        if (states[q].is_false()) dead = q;
    }
    if (!any_final) {
        throw CompileError(
            "objective is unsatisfiable: no accepting state is reachable");
    }
    return Dfa(std::move(atoms), std::move(transitions), 0, std::move(finals),
               dead, std::move(labels));
}

namespace {

std::vector<int> reachable_states(const Dfa& d) {
    std::vector<bool> seen(d.state_count(), false);
    std::vector<int> order;
    std::queue<int> frontier;
    seen[d.initial()] = true;
    frontier.push(d.initial());
    while (!frontier.empty()) {
        int q = frontier.front();
        frontier.pop();
        order.push_back(q);
        for (int target : d.transitions()[static_cast<std::size_t>(q)]) {
            if (!seen[target]) {
                seen[target] = true;
                frontier.push(target);
            }
        }
    }
    return order;
}

} // namespace

Dfa minimize(const Dfa& d) {
    const int alphabet = d.alphabet_size();

    // Work on the reachable part only; unreachable states would otherwise
    // pollute the partition.
    std::vector<int> order = reachable_states(d);
    const int n = static_cast<int>(order.size());
    std::vector<int> compact(d.state_count(), -1);
    for (int i = 0; i < n; ++i) compact[order[i]] = i;

    std::vector<std::vector<int>> delta(n, std::vector<int>(alphabet));
    std::vector<bool> is_final(n, false);
    for (int i = 0; i < n; ++i) {
        const auto& row = d.transitions()[static_cast<std::size_t>(order[i])];
        for (int c = 0; c < alphabet; ++c) delta[i][c] = compact[row[c]];
        is_final[i] = d.is_final(order[i]);
    }

    // Inverse transition relation, needed for preimage computation.
    std::vector<std::vector<std::vector<int>>> inverse(
        alphabet, std::vector<std::vector<int>>(n));
    for (int s = 0; s < n; ++s) {
        for (int c = 0; c < alphabet; ++c) inverse[c][delta[s][c]].push_back(s);
    }

    // Hopcroft partition refinement, seeded with the final / non-final split.
    std::vector<int> block_of(n);
    std::vector<std::vector<int>> blocks;
    {
        std::vector<int> fin, nonfin;
        for (int s = 0; s < n; ++s) (is_final[s] ? fin : nonfin).push_back(s);
        if (!fin.empty()) blocks.push_back(std::move(fin));
        if (!nonfin.empty()) blocks.push_back(std::move(nonfin));
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            for (int s : blocks[b]) block_of[s] = static_cast<int>(b);
        }
    }
    std::deque<int> worklist;
    std::vector<bool> queued(blocks.size(), false);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        worklist.push_back(static_cast<int>(b));
        queued[b] = true;
    }

    std::vector<char> in_preimage(n, 0);
    while (!worklist.empty()) {
        const int splitter = worklist.front();
        worklist.pop_front();
        queued[splitter] = false;
        const std::vector<int> splitter_members = blocks[splitter];

        for (int c = 0; c < alphabet; ++c) {
            std::vector<int> preimage;
            for (int t : splitter_members) {
                for (int s : inverse[c][t]) {
                    if (!in_preimage[s]) {
                        in_preimage[s] = 1;
                        preimage.push_back(s);
                    }
                }
            }
            if (preimage.empty()) continue;

            // Blocks with at least one member in the preimage may split.
            std::map<int, std::vector<int>> touched;
            for (int s : preimage) touched[block_of[s]].push_back(s);
            for (auto& [b, inside] : touched) {
                if (inside.size() == blocks[b].size()) continue; // no split
                std::vector<int> outside;
                outside.reserve(blocks[b].size() - inside.size());
                for (int s : blocks[b]) {
                    if (!in_preimage[s]) outside.push_back(s);
                }
                const int fresh = static_cast<int>(blocks.size());
                blocks[b] = inside;
                blocks.push_back(outside);
                queued.push_back(false);
                for (int s : outside) block_of[s] = fresh;
                if (queued[b]) {
                    worklist.push_back(fresh);
                    queued[fresh] = true;
                } else {
                    const int smaller =
                        inside.size() <= outside.size() ? b : fresh;
                    worklist.push_back(smaller);
                    queued[smaller] = true;
                }
            }
            for (int s : preimage) in_preimage[s] = 0;
        }
    }

    // Quotient automaton, renumbered by breadth-first discovery from the
    // initial block with labels in increasing bit order.
    const int block_count = static_cast<int>(blocks.size());
    std::vector<int> new_id(block_count, -1);
    std::vector<int> bfs;
    {
        std::queue<int> frontier;
        const int start = block_of[compact[d.initial()]];
        new_id[start] = 0;
        frontier.push(start);
        bfs.push_back(start);
        while (!frontier.empty()) {
            int b = frontier.front();
            frontier.pop();
            const int representative = blocks[b].front();
            for (int c = 0; c < alphabet; ++c) {
                int target = block_of[delta[representative][c]];
                if (new_id[target] < 0) {
                    new_id[target] = static_cast<int>(bfs.size());
                    bfs.push_back(target);
                    frontier.push(target);
                }
            }
        }
    }
    const int m = static_cast<int>(bfs.size());

    std::vector<std::vector<int>> qtrans(m, std::vector<int>(alphabet));
    std::vector<bool> qfinals(m, false);
    std::vector<std::string> qlabels(m);
    for (int id = 0; id < m; ++id) {
        const int b = bfs[static_cast<std::size_t>(id)];
        const int representative = blocks[b].front();
        for (int c = 0; c < alphabet; ++c) {
            qtrans[id][c] = new_id[block_of[delta[representative][c]]];
        }
        qfinals[id] = is_final[representative];
        std::vector<int> members = blocks[b];
        std::sort(members.begin(), members.end(),
                  [&](int a, int b2) { return order[a] < order[b2]; });
        std::string joined;
        for (int s : members) {
            if (!joined.empty()) joined += " | ";
            joined += d.state_labels()[static_cast<std::size_t>(order[s])];
        }
        qlabels[id] = joined;
    }

    // The dead state is the one from which no final state is reachable; in a
    // minimal automaton all such states collapse into a single class.
    std::optional<int> qdead;
    {
        std::vector<bool> co_reach(m, false);
        std::vector<std::vector<int>> qinv(m);
        for (int s = 0; s < m; ++s) {
            for (int c = 0; c < alphabet; ++c) qinv[qtrans[s][c]].push_back(s);
        }
        std::queue<int> frontier;
        for (int s = 0; s < m; ++s) {
            if (qfinals[s]) {
                co_reach[s] = true;
                frontier.push(s);
            }
        }
        while (!frontier.empty()) {
            int t = frontier.front();
            frontier.pop();
            for (int s : qinv[t]) {
                if (!co_reach[s]) {
                    co_reach[s] = true;
                    frontier.push(s);
                }
            }
        }
        for (int s = 0; s < m; ++s) {
            if (!co_reach[s]) {
                qdead = s;
                break;
            }
        }
    }

    return Dfa(d.atoms(), std::move(qtrans), 0, std::move(qfinals), qdead,
               std::move(qlabels));
}

bool accepts_prefix(const Dfa& d, std::span<const LabelVector> word) {
    int q = d.initial();
    if (d.is_final(q)) return true;
    for (const LabelVector& label : word) {
        q = d.step(q, label);
        if (d.is_final(q)) return true;
        if (d.is_dead(q)) return false;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

// A cube assigns each atom one of {must hold, must not hold, free}.
struct Cube {
    std::uint32_t care = 0;  // bit set: atom constrained
    std::uint32_t value = 0; // constrained atoms' required values

    bool covers(std::uint32_t bits) const { return (bits & care) == value; }
};

std::string cube_to_string(const Cube& cube, const std::vector<AtomPtr>& atoms) {
    std::string out;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const std::uint32_t bit = 1u << i;
        if (!(cube.care & bit)) continue;
        if (!out.empty()) out += " & ";
        if (!(cube.value & bit)) out += "!";
        out += atoms[i]->name;
    }
    return out.empty() ? "true" : out;
}

// Greedy cover of a label set by cubes, largest first. Exhaustive over all
// 3^w cubes, so only used for small atom counts.
std::vector<Cube> cover_labels(const std::set<std::uint32_t>& labels, int width) {
    std::vector<Cube> candidates;
    std::vector<std::uint32_t> masks;
    for (std::uint32_t care = 0; care < (1u << width); ++care) masks.push_back(care);
    std::sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) {
        return std::popcount(a) < std::popcount(b);
    });
    for (std::uint32_t care : masks) {
        std::uint32_t v = 0;
        // Enumerate the assignments of the constrained atoms.
        while (true) {
            Cube cube{care, v};
            bool inside = true;
            for (std::uint32_t bits = 0; bits < (1u << width) && inside; ++bits) {
                if (cube.covers(bits) && !labels.count(bits)) inside = false;
            }
            if (inside) candidates.push_back(cube);
            if (v == care) break;
            v = (v - care) & care; // next subset of care
        }
    }
    std::vector<Cube> chosen;
    std::set<std::uint32_t> uncovered = labels;
    for (const Cube& cube : candidates) {
        bool useful = false;
        for (auto it = uncovered.begin(); it != uncovered.end();) {
            if (cube.covers(*it)) {
                it = uncovered.erase(it);
                useful = true;
            } else {
                ++it;
            }
        }
        if (useful) chosen.push_back(cube);
        if (uncovered.empty()) break;
    }
    return chosen;
}

std::string guard_to_string(const std::set<std::uint32_t>& labels, const Dfa& d) {
    const int width = d.atom_count();
    if (labels.size() == static_cast<std::size_t>(d.alphabet_size())) {
        return "true";
    }
    if (width > 8) {
        // Too many atoms for cube search; fall back to raw minterms.
        std::string out;
        for (std::uint32_t bits : labels) {
            Cube minterm{(1u << width) - 1, bits};
            if (!out.empty()) out += " | ";
            out += cube_to_string(minterm, d.atoms());
        }
        return out;
    }
    std::string out;
    for (const Cube& cube : cover_labels(labels, width)) {
        if (!out.empty()) out += " | ";
        out += cube_to_string(cube, d.atoms());
    }
    return out;
}

std::string escape_dot(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

} // namespace

std::string export_dot(const Dfa& d) {
    std::ostringstream os;
    os << "digraph dfa {\n";
    os << "  rankdir=LR;\n";
    os << "  __start [shape=point];\n";
    for (int q = 0; q < d.state_count(); ++q) {
        os << "  q" << q << " [shape=" << (d.is_final(q) ? "doublecircle" : "circle")
           << ", label=\"q" << q << "\\n"
           << escape_dot(d.state_labels()[static_cast<std::size_t>(q)]) << "\"";
        if (d.is_dead(q)) os << ", style=dashed";
        os << "];\n";
    }
    os << "  __start -> q" << d.initial() << ";\n";
    for (int q = 0; q < d.state_count(); ++q) {
        std::map<int, std::set<std::uint32_t>> grouped;
        const auto& row = d.transitions()[static_cast<std::size_t>(q)];
        for (std::uint32_t bits = 0; bits < row.size(); ++bits) {
            grouped[row[bits]].insert(bits);
        }
        for (const auto& [target, labels] : grouped) {
            os << "  q" << q << " -> q" << target << " [label=\""
               << escape_dot(guard_to_string(labels, d)) << "\"];\n";
        }
    }
    os << "}\n";
    return os.str();
}

std::string dfa_to_json(const Dfa& d) {
    nlohmann::json j;
    j["atoms"] = nlohmann::json::array();
    for (const AtomPtr& atom : d.atoms()) j["atoms"].push_back(atom->name);
    j["initial"] = d.initial();
    j["finals"] = nlohmann::json::array();
    for (int q = 0; q < d.state_count(); ++q) {
        if (d.is_final(q)) j["finals"].push_back(q);
    }
    if (d.dead()) {
        j["dead"] = *d.dead();
    } else {
        j["dead"] = nullptr;
    }
    j["states"] = nlohmann::json::array();
    for (int q = 0; q < d.state_count(); ++q) {
        nlohmann::json s;
        s["index"] = q;
        s["label"] = d.state_labels()[static_cast<std::size_t>(q)];
        s["transitions"] = d.transitions()[static_cast<std::size_t>(q)];
        j["states"].push_back(std::move(s));
    }
    return j.dump(2);
}

} // namespace beliefplan
