#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "beliefplan/belief.hpp"
#include "beliefplan/errors.hpp"

namespace beliefplan {

/// One linear inequality over the belief simplex: dot(coeffs, b) > threshold
/// (strict) or >= threshold. Coefficients are a sparse map from hidden-state
/// index to value.
struct LinearAtom {
    std::map<int, double> coeffs;
    double threshold = 0.0;
    bool strict = true;
};

/// A named alphabet bit. Plain atoms have a single inequality; `anyof`
/// groups hold several and the bit is set when any member holds. Grouping
/// keeps a k-way disjunction of inequalities as one proposition instead of
/// k alphabet bits.
///
/// The provenance fields record which declaration form produced the group so
/// serialization can reproduce the source text: `max_component` marks the
/// "any belief component vs threshold" sugar (members are the per-state
/// indicator inequalities), `member_names` the bracket-list form.
struct AtomDef {
    std::string name;
    std::vector<LinearAtom> members;
    std::vector<std::string> member_names;
    bool max_component = false;

    bool holds(const Belief& b) const;
};

using AtomPtr = std::shared_ptr<const AtomDef>;

/// Declared atoms of a model, keyed (and canonically ordered) by name.
using AtomTable = std::map<std::string, AtomPtr>;

/// Truth assignment to a formula's atom set, one bit per atom in canonical
/// (lexicographic-by-name) order. Width is the atom count.
struct LabelVector {
    std::uint32_t bits = 0;
    int width = 0;

    bool test(int i) const { return (bits >> i) & 1u; }
    void set(int i, bool value) {
        if (value) {
            bits |= (1u << i);
        } else {
            bits &= ~(1u << i);
        }
    }
    bool operator==(const LabelVector&) const = default;
};

enum class FormulaKind {
    True,
    False,
    Atom,
    NegAtom,
    And,
    Or,
    Next,
    Until,
    Eventually,
};

class Formula;

namespace detail {
struct FormulaNode;
const std::string& repr(const Formula& f);
}

/// Immutable formula handle in negation normal form. Built through the
/// canonicalizing factory functions below: And/Or arguments are flattened,
/// absorbed against true/false, deduplicated and sorted, so structurally
/// equal formulas compare and print identically.
class Formula {
public:
    Formula() = default;

    FormulaKind kind() const;
    /// Payload of an Atom/NegAtom node.
    const AtomPtr& atom() const;
    /// Left child (unary operators store their child here).
    Formula left() const;
    Formula right() const;

    bool is_true() const { return kind() == FormulaKind::True; }
    bool is_false() const { return kind() == FormulaKind::False; }

    bool operator==(const Formula& other) const;

    explicit operator bool() const { return node_ != nullptr; }

private:
    friend Formula make_formula(detail::FormulaNode node);
    friend const std::string& detail::repr(const Formula& f);
    std::shared_ptr<const detail::FormulaNode> node_;
};

Formula f_true();
Formula f_false();
Formula f_atom(AtomPtr atom);
Formula f_neg_atom(AtomPtr atom);
Formula f_and(Formula a, Formula b);
Formula f_or(Formula a, Formula b);
Formula f_next(Formula a);
Formula f_until(Formula a, Formula b);
Formula f_eventually(Formula a);

/// Grammar-conform rendering; parse(to_string(f)) reproduces f.
std::string to_string(const Formula& f);

/// The formula's atom set in canonical order (lexicographic by name).
std::vector<AtomPtr> atoms_of(const Formula& f);

/// Parses the co-safe formula grammar:
///   phi ::= "true" | ident | "!" ident | phi "&" phi | phi "|" phi
///         | "X" phi | phi "U" phi | "F" phi | "(" phi ")"
/// with precedence U < "|" < "&" < unary. Every identifier must resolve in
/// `atom_table`. Non-co-safe constructs (G/R operators, negation of
/// anything but an atom) are rejected with a ParseError carrying the
/// offending position.
Formula parse_formula(const std::string& text, const AtomTable& atom_table);

/// dot(atom.coeffs, b) > c, or >= c when non-strict. Exact floating-point
/// comparison, no tolerance slack.
bool eval_atom(const LinearAtom& atom, const Belief& b);

/// Label of `b` under an ordered atom list: bit i set iff atoms[i] holds.
LabelVector label_of(const Belief& b, std::span<const AtomPtr> atoms);

/// One progression step: the residual formula that the tail of a trace must
/// satisfy, given that the current position carries label `label` (over
/// atoms_of(f) in canonical order). Result is canonical.
Formula progress(const Formula& f, const LabelVector& label);

/// Progression against an explicit atom ordering, which may be a superset of
/// atoms_of(f). Residuals of a formula can drop atoms, but their labels keep
/// the original formula's bit layout; this overload pins that layout.
Formula progress_over(const Formula& f, std::span<const AtomPtr> atoms,
                      const LabelVector& label);

enum class TraceStatus { Satisfied, Violated, Undetermined };

/// Runs progression over a finite label word. Satisfied as soon as some
/// prefix (including the empty one) progresses to true, Violated on false,
/// Undetermined otherwise.
TraceStatus trace_satisfies(const Formula& f, std::span<const LabelVector> trace);

} // namespace beliefplan
