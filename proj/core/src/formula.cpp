#include "beliefplan/formula.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <sstream>
#include <utility>

namespace beliefplan {

void Belief::validate(double tol) const {
    for (std::size_t i = 0; i < p_.size(); ++i) {
        if (p_[i] < 0.0) {
            throw ModelError("belief entry " + std::to_string(i) + " is negative");
        }
    }
    if (std::abs(sum() - 1.0) > tol) {
        std::ostringstream os;
        os << "belief does not sum to 1 (sum = " << sum() << ")";
        throw ModelError(os.str());
    }
}

bool eval_atom(const LinearAtom& atom, const Belief& b) {
    double dot = 0.0;
    for (const auto& [index, coef] : atom.coeffs) {
        if (index < 0 || static_cast<std::size_t>(index) >= b.size()) {
            throw ModelError("atom coefficient index " + std::to_string(index) +
                             " out of range for belief of dimension " +
                             std::to_string(b.size()));
        }
        dot += coef * b[static_cast<std::size_t>(index)];
    }
    return atom.strict ? dot > atom.threshold : dot >= atom.threshold;
}

bool AtomDef::holds(const Belief& b) const {
    if (max_component && !members.empty()) {
        // The members are the per-state indicator inequalities with one
        // shared comparator, so a single max scan replaces the member loop.
        const LinearAtom& probe = members.front();
        const double best = b.max_component();
        return probe.strict ? best > probe.threshold : best >= probe.threshold;
    }
    for (const LinearAtom& member : members) {
        if (eval_atom(member, b)) return true;
    }
    return false;
}

LabelVector label_of(const Belief& b, std::span<const AtomPtr> atoms) {
    if (atoms.size() > 32) {
        throw ModelError("too many atoms for a label vector (max 32)");
    }
    LabelVector label;
    label.width = static_cast<int>(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        label.set(static_cast<int>(i), atoms[i]->holds(b));
    }
    return label;
}

namespace detail {

struct FormulaNode {
    FormulaKind kind = FormulaKind::True;
    AtomPtr atom;
    Formula lhs;
    Formula rhs;
    std::string repr; // canonical printed form, doubles as ordering key
};

const std::string& repr(const Formula& f) {
    static const std::string empty;
    return f.node_ ? f.node_->repr : empty;
}

} // namespace detail

using detail::FormulaNode;

FormulaKind Formula::kind() const { return node_->kind; }
const AtomPtr& Formula::atom() const { return node_->atom; }
Formula Formula::left() const { return node_->lhs; }
Formula Formula::right() const { return node_->rhs; }

bool Formula::operator==(const Formula& other) const {
    if (node_ == other.node_) return true;
    if (!node_ || !other.node_) return false;
    return node_->repr == other.node_->repr;
}

Formula make_formula(FormulaNode node) {
    Formula f;
    f.node_ = std::make_shared<const FormulaNode>(std::move(node));
    return f;
}

namespace {

// Precedence: Until < Or < And < unary/atoms. Matches the parser.
int precedence(FormulaKind kind) {
    switch (kind) {
    case FormulaKind::Until: return 1;
    case FormulaKind::Or: return 2;
    case FormulaKind::And: return 3;
    default: return 4;
    }
}

std::string print(const Formula& f, int min_prec);

std::string print_node(FormulaKind kind, const AtomPtr& atom, const Formula& lhs,
                       const Formula& rhs, int min_prec) {
    std::string body;
    switch (kind) {
    case FormulaKind::True: body = "true"; break;
    case FormulaKind::False: body = "false"; break;
    case FormulaKind::Atom: body = atom->name; break;
    case FormulaKind::NegAtom: body = "!" + atom->name; break;
    case FormulaKind::Next: body = "X " + print(lhs, 4); break;
    case FormulaKind::Eventually: body = "F " + print(lhs, 4); break;
    case FormulaKind::And:
        body = print(lhs, 4) + " & " + print(rhs, 3);
        break;
    case FormulaKind::Or:
        body = print(lhs, 3) + " | " + print(rhs, 2);
        break;
    case FormulaKind::Until:
        body = print(lhs, 2) + " U " + print(rhs, 1);
        break;
    }
    if (precedence(kind) < min_prec) return "(" + body + ")";
    return body;
}

std::string print(const Formula& f, int min_prec) {
    // Children carry their canonical form already; only the parenthesization
    // decision depends on context.
    const std::string& repr = detail::repr(f);
    if (precedence(f.kind()) < min_prec) return "(" + repr + ")";
    return repr;
}

Formula make_node(FormulaKind kind, AtomPtr atom, Formula lhs, Formula rhs) {
    FormulaNode node;
    node.kind = kind;
    node.repr = print_node(kind, atom, lhs, rhs, 0);
    node.atom = std::move(atom);
    node.lhs = std::move(lhs);
    node.rhs = std::move(rhs);
    return make_formula(std::move(node));
}

// Flattens same-kind arguments of a commutative operator, applies
// true/false absorption, sorts and deduplicates by canonical form.
void flatten(const Formula& f, FormulaKind kind, std::vector<Formula>& out) {
    if (f.kind() == kind) {
        flatten(f.left(), kind, out);
        flatten(f.right(), kind, out);
    } else {
        out.push_back(f);
    }
}

Formula build_commutative(FormulaKind kind, Formula a, Formula b) {
    const bool is_and = kind == FormulaKind::And;
    std::vector<Formula> args;
    flatten(a, kind, args);
    flatten(b, kind, args);

    std::vector<Formula> kept;
    for (const Formula& arg : args) {
        if (is_and) {
            if (arg.is_false()) return f_false();
            if (arg.is_true()) continue;
        } else {
            if (arg.is_true()) return f_true();
            if (arg.is_false()) continue;
        }
        kept.push_back(arg);
    }
    if (kept.empty()) return is_and ? f_true() : f_false();

    std::sort(kept.begin(), kept.end(), [](const Formula& x, const Formula& y) {
        return to_string(x) < to_string(y);
    });
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());

    Formula result = kept.back();
    for (std::size_t i = kept.size() - 1; i-- > 0;) {
        result = make_node(kind, nullptr, kept[i], result);
    }
    return result;
}

} // namespace

std::string to_string(const Formula& f) { return detail::repr(f); }

Formula f_true() {
    static const Formula instance = [] {
        FormulaNode node;
        node.kind = FormulaKind::True;
        node.repr = "true";
        return make_formula(std::move(node));
    }();
    return instance;
}

Formula f_false() {
    static const Formula instance = [] {
        FormulaNode node;
        node.kind = FormulaKind::False;
        node.repr = "false";
        return make_formula(std::move(node));
    }();
    return instance;
}

Formula f_atom(AtomPtr atom) {
    return make_node(FormulaKind::Atom, std::move(atom), Formula(), Formula());
}

Formula f_neg_atom(AtomPtr atom) {
    return make_node(FormulaKind::NegAtom, std::move(atom), Formula(), Formula());
}

Formula f_and(Formula a, Formula b) {
    return build_commutative(FormulaKind::And, std::move(a), std::move(b));
}

Formula f_or(Formula a, Formula b) {
    return build_commutative(FormulaKind::Or, std::move(a), std::move(b));
}

Formula f_next(Formula a) {
    return make_node(FormulaKind::Next, nullptr, std::move(a), Formula());
}

Formula f_until(Formula a, Formula b) {
    return make_node(FormulaKind::Until, nullptr, std::move(a), std::move(b));
}

Formula f_eventually(Formula a) {
    return make_node(FormulaKind::Eventually, nullptr, std::move(a), Formula());
}

std::vector<AtomPtr> atoms_of(const Formula& f) {
    std::map<std::string, AtomPtr> found;
    std::function<void(const Formula&)> walk = [&](const Formula& g) {
        if (!g) return;
        if (g.kind() == FormulaKind::Atom || g.kind() == FormulaKind::NegAtom) {
            found.emplace(g.atom()->name, g.atom());
            return;
        }
        walk(g.left());
        walk(g.right());
    };
    walk(f);
    std::vector<AtomPtr> out;
    out.reserve(found.size());
    for (auto& [name, atom] : found) out.push_back(atom);
    return out;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class TokenKind {
    End,
    LParen,
    RParen,
    AndOp,
    OrOp,
    NotOp,
    TrueLit,
    NextOp,
    UntilOp,
    EventuallyOp,
    AlwaysOp,   // reserved: rejected as non-co-safe
    ReleaseOp,  // reserved: rejected as non-co-safe
    Ident,
};

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    std::size_t pos = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return current_; }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
        current_ = Token{};
        current_.pos = pos_;
        if (pos_ >= text_.size()) {
            current_.kind = TokenKind::End;
            return;
        }
        const char c = text_[pos_];
        switch (c) {
        case '(': current_.kind = TokenKind::LParen; ++pos_; return;
        case ')': current_.kind = TokenKind::RParen; ++pos_; return;
        case '&': current_.kind = TokenKind::AndOp; ++pos_; return;
        case '|': current_.kind = TokenKind::OrOp; ++pos_; return;
        case '!': current_.kind = TokenKind::NotOp; ++pos_; return;
        default: break;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                    text_[pos_] == '_')) {
                ++pos_;
            }
            current_.text = text_.substr(start, pos_ - start);
            if (current_.text == "true") current_.kind = TokenKind::TrueLit;
            else if (current_.text == "X") current_.kind = TokenKind::NextOp;
            else if (current_.text == "U") current_.kind = TokenKind::UntilOp;
            else if (current_.text == "F") current_.kind = TokenKind::EventuallyOp;
            else if (current_.text == "G") current_.kind = TokenKind::AlwaysOp;
            else if (current_.text == "R") current_.kind = TokenKind::ReleaseOp;
            else current_.kind = TokenKind::Ident;
            return;
        }
        throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    Token current_;
};

class Parser {
public:
    Parser(const std::string& text, const AtomTable& atoms)
        : lexer_(text), atoms_(atoms) {}

    Formula parse() {
        Formula f = parse_until();
        const Token& t = lexer_.peek();
        if (t.kind != TokenKind::End) {
            throw ParseError("unexpected trailing input", t.pos);
        }
        return f;
    }

private:
    Formula parse_until() {
        Formula lhs = parse_or();
        if (lexer_.peek().kind == TokenKind::UntilOp) {
            lexer_.take();
            Formula rhs = parse_until(); // right associative
            return f_until(std::move(lhs), std::move(rhs));
        }
        if (lexer_.peek().kind == TokenKind::ReleaseOp) {
            // diagnose infix R here instead of leaving it as trailing input
            throw ParseError("the release operator R is not co-safe",
                             lexer_.peek().pos);
        }
        return lhs;
    }

    Formula parse_or() {
        Formula lhs = parse_and();
        while (lexer_.peek().kind == TokenKind::OrOp) {
            lexer_.take();
            lhs = f_or(std::move(lhs), parse_and());
        }
        return lhs;
    }

    Formula parse_and() {
        Formula lhs = parse_unary();
        while (lexer_.peek().kind == TokenKind::AndOp) {
            lexer_.take();
            lhs = f_and(std::move(lhs), parse_unary());
        }
        return lhs;
    }

    Formula parse_unary() {
        Token t = lexer_.take();
        switch (t.kind) {
        case TokenKind::TrueLit:
            return f_true();
        case TokenKind::NotOp: {
            Token name = lexer_.take();
            if (name.kind != TokenKind::Ident) {
                throw ParseError(
                    "negation is restricted to atomic propositions (co-safe syntax)",
                    name.pos);
            }
            return f_neg_atom(lookup(name));
        }
        case TokenKind::NextOp:
            return f_next(parse_unary());
        case TokenKind::EventuallyOp:
            return f_eventually(parse_unary());
        case TokenKind::AlwaysOp:
            throw ParseError("the always operator G is not co-safe", t.pos);
        case TokenKind::ReleaseOp:
            throw ParseError("the release operator R is not co-safe", t.pos);
        case TokenKind::LParen: {
            Formula f = parse_until();
            Token close = lexer_.take();
            if (close.kind != TokenKind::RParen) {
                throw ParseError("expected ')'", close.pos);
            }
            return f;
        }
        case TokenKind::Ident:
            return f_atom(lookup(t));
        default:
            throw ParseError("expected a formula", t.pos);
        }
    }

    AtomPtr lookup(const Token& t) {
        auto it = atoms_.find(t.text);
        if (it == atoms_.end()) {
            throw ParseError("unknown atom '" + t.text + "'", t.pos);
        }
        return it->second;
    }

    Lexer lexer_;
    const AtomTable& atoms_;
};

} // namespace

Formula parse_formula(const std::string& text, const AtomTable& atom_table) {
    return Parser(text, atom_table).parse();
}

// ---------------------------------------------------------------------------
// Progression and finite-trace semantics

namespace {

bool label_value(const Formula& atom_node, std::span<const AtomPtr> atoms,
                 const LabelVector& label) {
    const std::string& name = atom_node.atom()->name;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (atoms[i]->name == name) return label.test(static_cast<int>(i));
    }
    throw ModelError("label vector does not cover atom '" + name + "'");
}

Formula progress_impl(const Formula& f, std::span<const AtomPtr> atoms,
                      const LabelVector& label) {
    switch (f.kind()) {
    case FormulaKind::True: return f_true();
    case FormulaKind::False: return f_false();
    case FormulaKind::Atom:
        return label_value(f, atoms, label) ? f_true() : f_false();
    case FormulaKind::NegAtom:
        return label_value(f, atoms, label) ? f_false() : f_true();
    case FormulaKind::And:
        return f_and(progress_impl(f.left(), atoms, label),
                     progress_impl(f.right(), atoms, label));
    case FormulaKind::Or:
        return f_or(progress_impl(f.left(), atoms, label),
                    progress_impl(f.right(), atoms, label));
    case FormulaKind::Next:
        return f.left();
    case FormulaKind::Eventually:
        // F p == p | X F p
        return f_or(progress_impl(f.left(), atoms, label), f);
    case FormulaKind::Until:
        // p U q == q | (p & X (p U q))
        return f_or(progress_impl(f.right(), atoms, label),
                    f_and(progress_impl(f.left(), atoms, label), f));
    }
    return f_false(); // unreachable
}

} // namespace

Formula progress(const Formula& f, const LabelVector& label) {
    std::vector<AtomPtr> atoms = atoms_of(f);
    if (label.width != static_cast<int>(atoms.size())) {
        throw ModelError("label width " + std::to_string(label.width) +
                         " does not match atom count " + std::to_string(atoms.size()));
    }
    return progress_impl(f, atoms, label);
}

Formula progress_over(const Formula& f, std::span<const AtomPtr> atoms,
                      const LabelVector& label) {
    return progress_impl(f, atoms, label);
}

TraceStatus trace_satisfies(const Formula& f, std::span<const LabelVector> trace) {
    std::vector<AtomPtr> atoms = atoms_of(f);
    Formula cur = f;
    if (cur.is_true()) return TraceStatus::Satisfied;
    if (cur.is_false()) return TraceStatus::Violated;
    for (const LabelVector& label : trace) {
        cur = progress_impl(cur, atoms, label);
        if (cur.is_true()) return TraceStatus::Satisfied;
        if (cur.is_false()) return TraceStatus::Violated;
    }
    return TraceStatus::Undetermined;
}

} // namespace beliefplan
