#include "beliefplan/pomdp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace beliefplan {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

Pomdp::Pomdp(int state_count,
             std::vector<std::string> action_names,
             std::vector<std::string> observation_names,
             std::vector<double> init)
    : state_count_(state_count),
      action_names_(std::move(action_names)),
      observation_names_(std::move(observation_names)),
      init_(std::move(init)) {
    if (state_count_ <= 0) throw ModelError("state count must be positive");
    if (action_names_.empty()) throw ModelError("at least one action is required");
    if (observation_names_.empty()) {
        throw ModelError("at least one observation is required");
    }
    if (init_.size() != static_cast<std::size_t>(state_count_)) {
        throw ModelError("initial distribution size does not match state count");
    }
    transitions_.resize(static_cast<std::size_t>(state_count_) * action_names_.size());
    observations_.assign(
        static_cast<std::size_t>(state_count_) * observation_names_.size(), 0.0);
}

int Pomdp::action_index(const std::string& name) const {
    for (std::size_t i = 0; i < action_names_.size(); ++i) {
        if (action_names_[i] == name) return static_cast<int>(i);
    }
    throw ModelError("unknown action '" + name + "'");
}

int Pomdp::observation_index(const std::string& name) const {
    for (std::size_t i = 0; i < observation_names_.size(); ++i) {
        if (observation_names_[i] == name) return static_cast<int>(i);
    }
    throw ModelError("unknown observation '" + name + "'");
}

void Pomdp::set_transition(int s, int a, int next, double p) {
    if (s < 0 || s >= state_count_) throw ModelError("transition source out of range");
    if (next < 0 || next >= state_count_) {
        throw ModelError("transition target out of range");
    }
    if (a < 0 || a >= action_count()) throw ModelError("action index out of range");
    if (p < 0.0) throw ModelError("transition probability is negative");
    if (p == 0.0) return;
    SparseRow& row = transitions_[static_cast<std::size_t>(s * action_count() + a)];
    for (const auto& [target, prob] : row) {
        if (target == next) {
            throw ModelError("duplicate transition entry for state " +
                             std::to_string(s) + ", action " + action_names_[a] +
                             ", target " + std::to_string(next));
        }
    }
    row.emplace_back(next, p);
}

void Pomdp::set_observation(int s, int o, double p) {
    if (s < 0 || s >= state_count_) throw ModelError("observation state out of range");
    if (o < 0 || o >= observation_count()) {
        throw ModelError("observation index out of range");
    }
    if (p < 0.0) throw ModelError("observation probability is negative");
    observations_[static_cast<std::size_t>(s * observation_count() + o)] = p;
}

std::vector<int> Pomdp::available_actions(int s) const {
    std::vector<int> out;
    for (int a = 0; a < action_count(); ++a) {
        if (action_available(s, a)) out.push_back(a);
    }
    return out;
}

std::vector<int> Pomdp::universally_available_actions() const {
    std::vector<int> out;
    for (int a = 0; a < action_count(); ++a) {
        bool everywhere = true;
        for (int s = 0; s < state_count_ && everywhere; ++s) {
            everywhere = action_available(s, a);
        }
        if (everywhere) out.push_back(a);
    }
    return out;
}

void Pomdp::validate(double tol) const {
    double init_sum = 0.0;
    for (int s = 0; s < state_count_; ++s) {
        if (init_[static_cast<std::size_t>(s)] < 0.0) {
            throw ModelError("init entry for state " + std::to_string(s) +
                             " is negative");
        }
        init_sum += init_[static_cast<std::size_t>(s)];
    }
    if (std::abs(init_sum - 1.0) > tol) {
        throw ModelError("initial distribution sums to " + fmt_double(init_sum) +
                         ", expected 1");
    }
    for (int s = 0; s < state_count_; ++s) {
        for (int a = 0; a < action_count(); ++a) {
            const SparseRow& row = transition_row(s, a);
            if (row.empty()) continue; // unavailable action
            double sum = 0.0;
            for (const auto& [target, p] : row) {
                if (p < 0.0) {
                    throw ModelError("negative transition probability in row (s=" +
                                     std::to_string(s) + ", a=" + action_names_[a] +
                                     ")");
                }
                sum += p;
            }
            if (std::abs(sum - 1.0) > tol) {
                throw ModelError("transition row (s=" + std::to_string(s) +
                                 ", a=" + action_names_[a] + ") sums to " +
                                 fmt_double(sum) + ", expected 1");
            }
        }
        double osum = 0.0;
        for (int o = 0; o < observation_count(); ++o) {
            const double p = observation_prob(s, o);
            if (p < 0.0) {
                throw ModelError("negative observation probability at (s=" +
                                 std::to_string(s) + ", o=" + observation_names_[o] +
                                 ")");
            }
            osum += p;
        }
        if (std::abs(osum - 1.0) > tol) {
            throw ModelError("observation row for state " + std::to_string(s) +
                             " sums to " + fmt_double(osum) + ", expected 1");
        }
    }
}

Belief belief_update(const Pomdp& m, const Belief& b, int a, int o) {
    std::vector<double> posterior(b.size(), 0.0);
    for (std::size_t s = 0; s < b.size(); ++s) {
        const double mass = b[s];
        if (mass == 0.0) continue;
        for (const auto& [target, p] : m.transition_row(static_cast<int>(s), a)) {
            posterior[static_cast<std::size_t>(target)] += mass * p;
        }
    }
    double normalizer = 0.0;
    for (std::size_t s = 0; s < posterior.size(); ++s) {
        posterior[s] *= m.observation_prob(static_cast<int>(s), o);
        normalizer += posterior[s];
    }
    if (normalizer <= 0.0) {
        throw ModelError("observation '" + m.observation_names()[o] +
                         "' has zero likelihood under the current belief and action '" +
                         m.action_names()[a] + "'");
    }
    for (double& v : posterior) v /= normalizer;
    return Belief(std::move(posterior));
}

std::vector<double> observation_likelihood(const Pomdp& m, const Belief& b, int a) {
    std::vector<double> predicted(b.size(), 0.0);
    for (std::size_t s = 0; s < b.size(); ++s) {
        const double mass = b[s];
        if (mass == 0.0) continue;
        for (const auto& [target, p] : m.transition_row(static_cast<int>(s), a)) {
            predicted[static_cast<std::size_t>(target)] += mass * p;
        }
    }
    std::vector<double> likelihood(m.observation_count(), 0.0);
    for (std::size_t s = 0; s < predicted.size(); ++s) {
        if (predicted[s] == 0.0) continue;
        std::span<const double> row = m.observation_row(static_cast<int>(s));
        for (int o = 0; o < m.observation_count(); ++o) {
            likelihood[static_cast<std::size_t>(o)] += predicted[s] * row[o];
        }
    }
    return likelihood;
}

std::pair<int, int> sample_step(const Pomdp& m, int s, int a, Rng& rng) {
    const Pomdp::SparseRow& row = m.transition_row(s, a);
    if (row.empty()) {
        throw ModelError("action '" + m.action_names()[a] +
                         "' is not available in state " + std::to_string(s));
    }
    int next = row.back().first;
    double u = rng.uniform01();
    for (const auto& [target, p] : row) {
        if (u < p) {
            next = target;
            break;
        }
        u -= p;
    }
    const int o = rng.categorical(m.observation_row(next));
    return {next, o};
}

// ---------------------------------------------------------------------------
// Model file format

namespace {

struct LineError {
    std::string message;
};

int parse_int(const std::string& token) {
    std::size_t consumed = 0;
    int value = 0;
    try {
        value = std::stoi(token, &consumed);
    } catch (const std::exception&) {
        throw LineError{"expected an integer, got '" + token + "'"};
    }
    if (consumed != token.size()) {
        throw LineError{"expected an integer, got '" + token + "'"};
    }
    return value;
}

double parse_real(const std::string& token) {
    std::size_t consumed = 0;
    double value = 0;
    try {
        value = std::stod(token, &consumed);
    } catch (const std::exception&) {
        throw LineError{"expected a number, got '" + token + "'"};
    }
    if (consumed != token.size()) {
        throw LineError{"expected a number, got '" + token + "'"};
    }
    return value;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// Comparator token: ">" (strict) or ">=" (non-strict).
bool parse_cmp(const std::string& token) {
    if (token == ">") return true;
    if (token == ">=") return false;
    throw LineError{"expected comparator '>' or '>=', got '" + token + "'"};
}

struct PendingModel {
    int states = -1;
    std::vector<std::string> actions;
    std::vector<std::string> observations;
    std::vector<std::tuple<int, double>> init_entries;
    std::vector<std::tuple<int, int, int, double>> transition_entries;
    std::vector<std::tuple<int, int, double>> observation_entries;
    AtomTable atoms;
    std::vector<std::string> atom_order; // declaration order, for checks
    std::string objective;
    bool has_objective = false;

    std::set<int> init_seen;
    std::set<std::pair<int, int>> obs_seen;

    void require_states() const {
        if (states < 0) throw LineError{"'states' must be declared first"};
    }

    int resolve(const std::vector<std::string>& names, const std::string& token,
                const char* what) const {
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == token) return static_cast<int>(i);
        }
        if (!token.empty() &&
            (std::isdigit(static_cast<unsigned char>(token[0])) || token[0] == '-')) {
            const int idx = parse_int(token);
            if (idx < 0 || idx >= static_cast<int>(names.size())) {
                throw LineError{std::string(what) + " index " + token +
                                " out of range"};
            }
            return idx;
        }
        throw LineError{std::string("unknown ") + what + " '" + token + "'"};
    }

    int state_index(const std::string& token) const {
        const int s = parse_int(token);
        if (s < 0 || s >= states) {
            throw LineError{"state index " + token + " out of range"};
        }
        return s;
    }
};

LinearAtom parse_inequality(const std::string& rest) {
    // {i:coef, j:coef} cmp c
    const std::size_t open = rest.find('{');
    const std::size_t close = rest.find('}');
    if (open == std::string::npos || close == std::string::npos || close < open) {
        throw LineError{"expected coefficient map '{i:coef,...}'"};
    }
    LinearAtom atom;
    const std::string inner = rest.substr(open + 1, close - open - 1);
    if (!trim(inner).empty()) {
        std::istringstream is(inner);
        std::string entry;
        while (std::getline(is, entry, ',')) {
            const std::size_t colon = entry.find(':');
            if (colon == std::string::npos) {
                throw LineError{"bad coefficient entry '" + trim(entry) + "'"};
            }
            const int index = parse_int(trim(entry.substr(0, colon)));
            const double coef = parse_real(trim(entry.substr(colon + 1)));
            if (!atom.coeffs.emplace(index, coef).second) {
                throw LineError{"duplicate coefficient index " + std::to_string(index)};
            }
        }
    }
    const std::vector<std::string> tail = split_ws(rest.substr(close + 1));
    if (tail.size() != 2) {
        throw LineError{"expected '<cmp> <threshold>' after the coefficient map"};
    }
    atom.strict = parse_cmp(tail[0]);
    atom.threshold = parse_real(tail[1]);
    return atom;
}

void handle_line(PendingModel& pm, const std::string& line) {
    const std::vector<std::string> tokens = split_ws(line);
    if (tokens.empty()) return;
    const std::string& head = tokens[0];

    if (head == "states") {
        if (pm.states >= 0) throw LineError{"duplicate 'states' declaration"};
        if (tokens.size() != 2) throw LineError{"usage: states N"};
        pm.states = parse_int(tokens[1]);
        if (pm.states <= 0) throw LineError{"state count must be positive"};
    } else if (head == "actions") {
        if (!pm.actions.empty()) throw LineError{"duplicate 'actions' declaration"};
        pm.actions.assign(tokens.begin() + 1, tokens.end());
        if (pm.actions.empty()) throw LineError{"usage: actions name..."};
        std::set<std::string> unique(pm.actions.begin(), pm.actions.end());
        if (unique.size() != pm.actions.size()) {
            throw LineError{"duplicate action name"};
        }
    } else if (head == "observations") {
        if (!pm.observations.empty()) {
            throw LineError{"duplicate 'observations' declaration"};
        }
        pm.observations.assign(tokens.begin() + 1, tokens.end());
        if (pm.observations.empty()) throw LineError{"usage: observations name..."};
        std::set<std::string> unique(pm.observations.begin(), pm.observations.end());
        if (unique.size() != pm.observations.size()) {
            throw LineError{"duplicate observation name"};
        }
    } else if (head == "init") {
        pm.require_states();
        if (tokens.size() != 3) throw LineError{"usage: init s p"};
        const int s = pm.state_index(tokens[1]);
        if (!pm.init_seen.insert(s).second) {
            throw LineError{"duplicate init entry for state " + tokens[1]};
        }
        pm.init_entries.emplace_back(s, parse_real(tokens[2]));
    } else if (head == "T") {
        pm.require_states();
        if (pm.actions.empty()) throw LineError{"'actions' must be declared before T"};
        if (tokens.size() != 5) throw LineError{"usage: T s a s' p"};
        const int s = pm.state_index(tokens[1]);
        const int a = pm.resolve(pm.actions, tokens[2], "action");
        const int next = pm.state_index(tokens[3]);
        pm.transition_entries.emplace_back(s, a, next, parse_real(tokens[4]));
    } else if (head == "O") {
        pm.require_states();
        if (pm.observations.empty()) {
            throw LineError{"'observations' must be declared before O"};
        }
        if (tokens.size() != 4) throw LineError{"usage: O s o p"};
        const int s = pm.state_index(tokens[1]);
        const int o = pm.resolve(pm.observations, tokens[2], "observation");
        if (!pm.obs_seen.insert({s, o}).second) {
            throw LineError{"duplicate observation entry for state " + tokens[1] +
                            ", observation " + tokens[2]};
        }
        pm.observation_entries.emplace_back(s, o, parse_real(tokens[3]));
    } else if (head == "atom") {
        pm.require_states();
        if (tokens.size() < 2) throw LineError{"usage: atom name {i:coef,...} cmp c"};
        const std::string& name = tokens[1];
        auto def = std::make_shared<AtomDef>();
        def->name = name;
        const std::size_t name_pos = line.find(name, line.find("atom") + 4);
        def->members.push_back(parse_inequality(line.substr(name_pos + name.size())));
        for (const auto& [index, coef] : def->members.back().coeffs) {
            if (index < 0 || index >= pm.states) {
                throw LineError{"atom '" + name + "' references state index " +
                                std::to_string(index) + " out of range"};
            }
        }
        if (!pm.atoms.emplace(name, std::move(def)).second) {
            throw LineError{"duplicate atom name '" + name + "'"};
        }
        pm.atom_order.push_back(name);
    } else if (head == "anyof") {
        pm.require_states();
        if (tokens.size() < 4 || tokens[2] != "=") {
            throw LineError{"usage: anyof name = max_component cmp c | anyof name = [a, b]"};
        }
        const std::string& name = tokens[1];
        auto def = std::make_shared<AtomDef>();
        def->name = name;
        if (tokens[3] == "max_component") {
            if (tokens.size() != 6) {
                throw LineError{"usage: anyof name = max_component cmp c"};
            }
            const bool strict = parse_cmp(tokens[4]);
            const double threshold = parse_real(tokens[5]);
            def->max_component = true;
            def->members.reserve(static_cast<std::size_t>(pm.states));
            for (int i = 0; i < pm.states; ++i) {
                LinearAtom member;
                member.coeffs.emplace(i, 1.0);
                member.threshold = threshold;
                member.strict = strict;
                def->members.push_back(std::move(member));
            }
        } else {
            const std::size_t eq = line.find('=');
            std::string rest = trim(line.substr(eq + 1));
            if (rest.size() < 2 || rest.front() != '[' || rest.back() != ']') {
                throw LineError{"expected '[a, b, ...]' member list"};
            }
            std::istringstream is(rest.substr(1, rest.size() - 2));
            std::string entry;
            while (std::getline(is, entry, ',')) {
                const std::string member = trim(entry);
                if (member.empty()) throw LineError{"empty member name in list"};
                auto it = pm.atoms.find(member);
                if (it == pm.atoms.end()) {
                    throw LineError{"unknown atom '" + member + "' in member list"};
                }
                def->member_names.push_back(member);
                for (const LinearAtom& m : it->second->members) {
                    def->members.push_back(m);
                }
            }
            if (def->member_names.empty()) {
                throw LineError{"member list must not be empty"};
            }
        }
        if (!pm.atoms.emplace(name, std::move(def)).second) {
            throw LineError{"duplicate atom name '" + name + "'"};
        }
        pm.atom_order.push_back(name);
    } else if (head == "objective") {
        if (pm.has_objective) throw LineError{"duplicate 'objective' declaration"};
        const std::size_t pos = line.find("objective");
        pm.objective = trim(line.substr(pos + std::string("objective").size()));
        if (pm.objective.empty()) throw LineError{"usage: objective <formula>"};
        pm.has_objective = true;
    } else {
        throw LineError{"unknown directive '" + head + "'"};
    }
}

} // namespace

ModelBundle load_model_text(const std::string& text) {
    PendingModel pm;
    std::istringstream is(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        try {
            handle_line(pm, stripped);
        } catch (const LineError& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.message,
                             line_no);
        }
    }
    if (pm.states < 0) throw ParseError("missing 'states' declaration", line_no);
    if (pm.actions.empty()) throw ParseError("missing 'actions' declaration", line_no);
    if (pm.observations.empty()) {
        throw ParseError("missing 'observations' declaration", line_no);
    }
    if (!pm.has_objective) {
        throw ParseError("missing 'objective' declaration", line_no);
    }

    std::vector<double> init(static_cast<std::size_t>(pm.states), 0.0);
    for (const auto& [s, p] : pm.init_entries) {
        init[static_cast<std::size_t>(s)] = p;
    }
    Pomdp pomdp(pm.states, pm.actions, pm.observations, std::move(init));
    for (const auto& [s, a, next, p] : pm.transition_entries) {
        pomdp.set_transition(s, a, next, p);
    }
    for (const auto& [s, o, p] : pm.observation_entries) {
        pomdp.set_observation(s, o, p);
    }
    pomdp.validate();
    return ModelBundle{std::move(pomdp), std::move(pm.atoms), std::move(pm.objective)};
}

ModelBundle load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open model file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_model_text(buffer.str());
}

namespace {

void write_atom_members(std::ostream& os, const AtomDef& def) {
    const LinearAtom& atom = def.members.front();
    os << "atom " << def.name << " {";
    bool first = true;
    for (const auto& [index, coef] : atom.coeffs) {
        if (!first) os << ",";
        os << index << ":" << fmt_double(coef);
        first = false;
    }
    os << "} " << (atom.strict ? ">" : ">=") << " " << fmt_double(atom.threshold)
       << "\n";
}

} // namespace

std::string save_model(const ModelBundle& bundle) {
    const Pomdp& m = bundle.pomdp;
    std::ostringstream os;
    os << "states " << m.state_count() << "\n";
    os << "actions";
    for (const std::string& a : m.action_names()) os << " " << a;
    os << "\n";
    os << "observations";
    for (const std::string& o : m.observation_names()) os << " " << o;
    os << "\n";
    for (int s = 0; s < m.state_count(); ++s) {
        const double p = m.init()[static_cast<std::size_t>(s)];
        if (p != 0.0) os << "init " << s << " " << fmt_double(p) << "\n";
    }
    for (int s = 0; s < m.state_count(); ++s) {
        for (int a = 0; a < m.action_count(); ++a) {
            for (const auto& [next, p] : m.transition_row(s, a)) {
                os << "T " << s << " " << m.action_names()[a] << " " << next << " "
                   << fmt_double(p) << "\n";
            }
        }
    }
    for (int s = 0; s < m.state_count(); ++s) {
        for (int o = 0; o < m.observation_count(); ++o) {
            const double p = m.observation_prob(s, o);
            if (p != 0.0) {
                os << "O " << s << " " << m.observation_names()[o] << " "
                   << fmt_double(p) << "\n";
            }
        }
    }
    // Plain atoms first so anyof member lists only reference earlier lines.
    std::vector<const AtomDef*> groups;
    for (const auto& [name, def] : bundle.atoms) {
        if (def->max_component || !def->member_names.empty()) {
            groups.push_back(def.get());
            continue;
        }
        if (def->members.size() != 1) {
            throw ModelError("atom '" + name +
                             "' has an unserializable member group (no declaration "
                             "form records it)");
        }
        write_atom_members(os, *def);
    }
    for (const AtomDef* def : groups) {
        if (def->max_component) {
            const LinearAtom& probe = def->members.front();
            os << "anyof " << def->name << " = max_component "
               << (probe.strict ? ">" : ">=") << " " << fmt_double(probe.threshold)
               << "\n";
        } else {
            os << "anyof " << def->name << " = [";
            for (std::size_t i = 0; i < def->member_names.size(); ++i) {
                if (i) os << ", ";
                os << def->member_names[i];
            }
            os << "]\n";
        }
    }
    os << "objective " << bundle.objective << "\n";
    return os.str();
}

void save_model_file(const ModelBundle& bundle, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ModelError("cannot write model file '" + path + "'");
    out << save_model(bundle);
}

// ---------------------------------------------------------------------------
// Drone-probing benchmark generator

namespace {

struct Grid {
    int width;
    int height;

    int cells() const { return width * height; }
    int cell(int x, int y) const { return y * width + x; }
    bool inside(int x, int y) const {
        return x >= 0 && x < width && y >= 0 && y < height;
    }
    int x_of(int c) const { return c % width; }
    int y_of(int c) const { return c / width; }
};

// Quadrant sensor over the 3x3 field of view centered on the drone.
// Returns (observation index, probability) pairs; observation order is
// SW, NW, NE, SE, None.
std::vector<std::pair<int, double>> sensor_distribution(int dx, int dy) {
    constexpr int SW = 0, NW = 1, NE = 2, SE = 3, NONE = 4;
    if (dx == 0 && dy == 0) {
        return {{SW, 0.25}, {NW, 0.25}, {NE, 0.25}, {SE, 0.25}};
    }
    if (std::abs(dx) == 1 && std::abs(dy) == 1) {
        if (dx > 0 && dy > 0) return {{NE, 1.0}};
        if (dx < 0 && dy > 0) return {{NW, 1.0}};
        if (dx > 0 && dy < 0) return {{SE, 1.0}};
        return {{SW, 1.0}};
    }
    if (dx == 0 && dy == 1) return {{NW, 0.5}, {NE, 0.5}};
    if (dx == 0 && dy == -1) return {{SW, 0.5}, {SE, 0.5}};
    if (dx == 1 && dy == 0) return {{NE, 0.5}, {SE, 0.5}};
    if (dx == -1 && dy == 0) return {{SW, 0.5}, {NW, 0.5}};
    return {{NONE, 1.0}};
}

} // namespace

ModelBundle drone_probing_model(const DroneProbingParams& params) {
    const Grid grid{params.width, params.height};
    if (params.width < 2 || params.height < 2) {
        throw ModelError("grid must be at least 2x2");
    }
    if (!grid.inside(params.goal_x, params.goal_y)) {
        throw ModelError("goal cell is outside the grid");
    }
    if (!(params.threshold > 0.5 && params.threshold <= 1.0)) {
        throw ModelError("measurement threshold must lie in (0.5, 1]; above 0.5 "
                         "at most one belief component can cross it");
    }
    const int ncells = grid.cells();
    const int nstates = ncells * ncells; // drone cell * ncells + target cell

    const std::vector<std::string> actions = {"N", "S", "E", "W", "X"};
    const std::vector<std::string> observations = {"SW", "NW", "NE", "SE", "None"};
    constexpr int dxs[] = {0, 0, 1, -1, 0};
    constexpr int dys[] = {1, -1, 0, 0, 0};

    const int start = grid.cell(0, 0);
    std::vector<double> init(static_cast<std::size_t>(nstates), 0.0);
    for (int t = 0; t < ncells; ++t) {
        if (t == start) continue; // target spawns away from the drone's corner
        init[static_cast<std::size_t>(start * ncells + t)] = 1.0 / (ncells - 1);
    }

    Pomdp pomdp(nstates, actions, observations, std::move(init));

    for (int d = 0; d < ncells; ++d) {
        const int dx0 = grid.x_of(d), dy0 = grid.y_of(d);
        for (int t = 0; t < ncells; ++t) {
            const int tx = grid.x_of(t), ty = grid.y_of(t);
            std::vector<int> target_moves;
            for (int dir = 0; dir < 4; ++dir) {
                const int nx = tx + dxs[dir], ny = ty + dys[dir];
                if (grid.inside(nx, ny)) target_moves.push_back(grid.cell(nx, ny));
            }
            const double tp = 1.0 / static_cast<double>(target_moves.size());
            for (int a = 0; a < 5; ++a) {
                const int nx = dx0 + dxs[a], ny = dy0 + dys[a];
                const int drone_next = grid.inside(nx, ny) ? grid.cell(nx, ny) : d;
                for (int tn : target_moves) {
                    pomdp.set_transition(d * ncells + t, a,
                                         drone_next * ncells + tn, tp);
                }
            }
        }
    }

    for (int d = 0; d < ncells; ++d) {
        for (int t = 0; t < ncells; ++t) {
            const int rel_x = grid.x_of(t) - grid.x_of(d);
            const int rel_y = grid.y_of(t) - grid.y_of(d);
            for (const auto& [o, p] : sensor_distribution(rel_x, rel_y)) {
                pomdp.set_observation(d * ncells + t, o, p);
            }
        }
    }
    pomdp.validate();

    AtomTable atoms;
    {
        auto measured = std::make_shared<AtomDef>();
        measured->name = "measured";
        measured->max_component = true;
        measured->members.reserve(static_cast<std::size_t>(nstates));
        for (int i = 0; i < nstates; ++i) {
            LinearAtom member;
            member.coeffs.emplace(i, 1.0);
            member.threshold = params.threshold;
            member.strict = true;
            measured->members.push_back(std::move(member));
        }
        atoms.emplace(measured->name, std::move(measured));
    }
    {
        auto goal = std::make_shared<AtomDef>();
        goal->name = "goal";
        LinearAtom member;
        const int goal_cell = grid.cell(params.goal_x, params.goal_y);
        for (int t = 0; t < ncells; ++t) {
            member.coeffs.emplace(goal_cell * ncells + t, 1.0);
        }
        member.threshold = 1.0;
        member.strict = false; // certainty: full mass on drone-at-goal states
        goal->members.push_back(std::move(member));
        atoms.emplace(goal->name, std::move(goal));
    }

    return ModelBundle{std::move(pomdp), std::move(atoms),
                       "(!goal U measured) & F goal & F measured"};
}

} // namespace beliefplan
