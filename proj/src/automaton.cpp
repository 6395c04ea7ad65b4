#include "regcep/automaton.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "regcep/errors.hpp"

namespace regcep {

bool Guard::operator==(const Guard& o) const {
    return output == o.output && selection == o.selection && writes == o.writes && formula == o.formula;
}

StateId RegisterAutomaton::single_start() const {
    if (start_states.size() != 1)
        throw Error("expected a single start state, found " + std::to_string(start_states.size()));
    return *start_states.begin();
}

void RegisterAutomaton::validate() const {
    auto known_state = [&](StateId q) { return states.count(q) != 0; };
    for (StateId q : start_states)
        if (!known_state(q)) throw Error("start state " + std::to_string(q) + " is not a state");
    for (StateId q : final_states)
        if (!known_state(q)) throw Error("final state " + std::to_string(q) + " is not a state");
    for (const auto& t : transitions) {
        if (!known_state(t.source) || !known_state(t.target))
            throw Error("transition endpoint is not a state");
        if (!t.guard) continue;
        const auto& g = *t.guard;
        if (g.selection.size() != g.formula.arity())
            throw Error("selection size does not match formula arity");
        if (g.formula.arity() == 0)
            throw Error("consuming transition carries a nullary formula");
        for (const auto& r : g.selection)
            if (!r.is_current() && !registers.count(r.id()))
                throw Error("selection references unknown register r" + std::to_string(r.id()));
        for (RegisterId r : g.writes)
            if (!registers.count(r)) throw Error("write to unknown register r" + std::to_string(r));
        if (start_states.count(t.source))
            for (const auto& r : g.selection)
                if (!r.is_current())
                    throw Error("transition out of a start state references a register");
    }
}

std::set<Match> MatchReport::all() const {
    std::set<Match> out;
    for (const auto& [n, matches] : per_index) out.insert(matches.begin(), matches.end());
    return out;
}

std::string MatchReport::serialize() const {
    std::string out;
    for (const auto& [n, matches] : per_index) {
        if (matches.empty()) continue;
        out += "index " + std::to_string(n) + ":";
        for (const auto& m : matches) {
            out += " {";
            for (std::size_t i = 0; i < m.size(); ++i) {
                if (i) out += ',';
                out += std::to_string(m[i]);
            }
            out += '}';
        }
        out += '\n';
    }
    return out;
}

namespace {

// source-indexed transition lists, built once per run/analysis
std::map<StateId, std::vector<std::size_t>> outgoing_index(const RegisterAutomaton& a) {
    std::map<StateId, std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < a.transitions.size(); ++i) out[a.transitions[i].source].push_back(i);
    return out;
}

bool guard_applies(const Guard& g, const RegisterBank& bank, const Event& current) {
    std::vector<const Event*> args;
    args.reserve(g.selection.size());
    for (const auto& r : g.selection) {
        if (r.is_current()) {
            args.push_back(&current);
        } else {
            auto it = bank.find(r.id());
            if (it == bank.end())
                throw RegisterCoverageError("empty register r" + std::to_string(r.id()) +
                                            " read during a run");
            args.push_back(&it->second);
        }
    }
    return evaluate(g.formula, args);
}

// Same, but an empty register read just means "does not apply" (probing).
bool guard_applies_quiet(const Guard& g, const RegisterBank& bank, const Event& current) {
    for (const auto& r : g.selection)
        if (!r.is_current() && !bank.count(r.id())) return false;
    return guard_applies(g, bank, current);
}

Configuration consume(const Configuration& c, const Transition& t, const Event& ev) {
    Configuration next;
    next.next_index = c.next_index + 1;
    next.state = t.target;
    next.registers = c.registers;
    next.marks = c.marks;
    for (RegisterId r : t.guard->writes) next.registers.insert_or_assign(r, ev);
    if (t.guard->output == Output::Mark) next.marks.insert(c.next_index);
    return next;
}

// Epsilon closure of a batch of configurations; per-seed cycle protection by
// visited state (epsilon moves change nothing but the state).
std::vector<Configuration> close_epsilon(const RegisterAutomaton& a,
                                         const std::map<StateId, std::vector<std::size_t>>& out_idx,
                                         std::vector<Configuration> configs, bool dedup) {
    std::vector<Configuration> result;
    for (auto& seed : configs) {
        std::set<StateId> visited{seed.state};
        std::deque<Configuration> todo{seed};
        while (!todo.empty()) {
            Configuration c = std::move(todo.front());
            todo.pop_front();
            auto it = out_idx.find(c.state);
            if (it != out_idx.end()) {
                for (std::size_t ti : it->second) {
                    const auto& t = a.transitions[ti];
                    if (!t.is_epsilon() || visited.count(t.target)) continue;
                    visited.insert(t.target);
                    Configuration next = c;
                    next.state = t.target;
                    todo.push_back(std::move(next));
                }
            }
            result.push_back(std::move(c));
        }
    }
    if (dedup) {
        std::sort(result.begin(), result.end());
        result.erase(std::unique(result.begin(), result.end()), result.end());
    }
    return result;
}

} // namespace

std::vector<Configuration> successors(const RegisterAutomaton& a, const Configuration& c,
                                      const Event* next_event) {
    std::vector<Configuration> out;
    for (const auto& t : a.transitions) {
        if (t.source != c.state) continue;
        if (t.is_epsilon()) {
            Configuration next = c;
            next.state = t.target;
            out.push_back(std::move(next));
        } else if (next_event && guard_applies(*t.guard, c.registers, *next_event)) {
            out.push_back(consume(c, t, *next_event));
        }
    }
    return out;
}

MatchReport run_stream(const RegisterAutomaton& a, const Stream& s, std::size_t start_index,
                       RunOptions options, RunStats* stats) {
    const auto out_idx = outgoing_index(a);

    std::vector<Configuration> frontier;
    for (StateId q : a.start_states) frontier.push_back(Configuration{start_index, q, {}, {}});
    frontier = close_epsilon(a, out_idx, std::move(frontier), options.dedup);

    MatchReport report;
    if (stats) stats->max_live = frontier.size();

    for (std::size_t i = start_index; i < s.size(); ++i) {
        const Event& ev = s[i];
        std::vector<Configuration> next;
        for (const auto& c : frontier) {
            auto it = out_idx.find(c.state);
            if (it == out_idx.end()) continue;
            for (std::size_t ti : it->second) {
                const auto& t = a.transitions[ti];
                if (!t.is_epsilon() && guard_applies(*t.guard, c.registers, ev))
                    next.push_back(consume(c, t, ev));
            }
        }
        frontier = close_epsilon(a, out_idx, std::move(next), options.dedup);
        if (frontier.size() > options.max_configurations)
            throw ResourceExhaustedError(frontier.size());
        if (stats) stats->max_live = std::max(stats->max_live, frontier.size());

        for (const auto& c : frontier) {
            if (a.final_states.count(c.state) && c.marks.count(i))
                report.per_index[i + 1].insert(Match(c.marks.begin(), c.marks.end()));
        }
    }
    return report;
}

namespace {

std::map<StateId, std::set<StateId>> epsilon_closures(const RegisterAutomaton& a) {
    std::map<StateId, std::set<StateId>> closure;
    for (StateId q : a.states) {
        std::set<StateId>& cl = closure[q];
        std::deque<StateId> todo{q};
        cl.insert(q);
        while (!todo.empty()) {
            StateId cur = todo.front();
            todo.pop_front();
            for (const auto& t : a.transitions)
                if (t.is_epsilon() && t.source == cur && !cl.count(t.target)) {
                    cl.insert(t.target);
                    todo.push_back(t.target);
                }
        }
    }
    return closure;
}

std::set<StateId> reachable_states(const RegisterAutomaton& a, const std::set<StateId>& from,
                                   bool forward) {
    std::set<StateId> seen = from;
    std::deque<StateId> todo(from.begin(), from.end());
    while (!todo.empty()) {
        StateId cur = todo.front();
        todo.pop_front();
        for (const auto& t : a.transitions) {
            StateId from_q = forward ? t.source : t.target;
            StateId to_q = forward ? t.target : t.source;
            if (from_q == cur && !seen.count(to_q)) {
                seen.insert(to_q);
                todo.push_back(to_q);
            }
        }
    }
    return seen;
}

} // namespace

RegisterAutomaton eliminate_epsilon(const RegisterAutomaton& a) {
    const auto closure = epsilon_closures(a);

    RegisterAutomaton out;
    out.start_states = a.start_states;

    // forward extension: a guarded transition also lands on every state in
    // the epsilon closure of its target
    std::vector<Transition> wide;
    for (const auto& t : a.transitions) {
        if (t.is_epsilon()) continue;
        for (StateId p : closure.at(t.target)) wide.push_back(Transition{t.source, p, t.guard});
    }
    // backward extension: states epsilon-reachable from a start act for it
    for (StateId qs : a.start_states) {
        for (StateId p : closure.at(qs)) {
            if (p == qs) continue;
            for (const auto& t : a.transitions) {
                if (t.is_epsilon() || t.source != p) continue;
                for (StateId p2 : closure.at(t.target)) wide.push_back(Transition{qs, p2, t.guard});
            }
        }
    }
    std::vector<Transition> dedup;
    for (auto& t : wide)
        if (std::find(dedup.begin(), dedup.end(), t) == dedup.end()) dedup.push_back(std::move(t));

    for (StateId q : a.states)
        if (std::any_of(closure.at(q).begin(), closure.at(q).end(),
                        [&](StateId p) { return a.final_states.count(p) != 0; }))
            out.final_states.insert(q);

    // keep states that lie on some start-to-final path; start states stay
    RegisterAutomaton scratch;
    scratch.states = a.states;
    scratch.transitions = dedup;
    auto fwd = reachable_states(scratch, a.start_states, true);
    auto bwd = reachable_states(scratch, out.final_states, false);
    std::set<StateId> keep = a.start_states;
    for (StateId q : fwd)
        if (bwd.count(q)) keep.insert(q);

    out.states = keep;
    for (auto it = out.final_states.begin(); it != out.final_states.end();)
        it = keep.count(*it) ? std::next(it) : out.final_states.erase(it);
    for (auto& t : dedup)
        if (keep.count(t.source) && keep.count(t.target)) out.transitions.push_back(std::move(t));
    for (const auto& t : out.transitions) {
        for (const auto& r : t.guard->selection)
            if (!r.is_current()) out.registers.insert(r.id());
        out.registers.insert(t.guard->writes.begin(), t.guard->writes.end());
    }
    return out;
}

Diagnostics validate_register_coverage(const RegisterAutomaton& a) {
    Diagnostics diags;
    for (StateId q : a.states) {
        std::set<RegisterId> reads;
        for (const auto& t : a.transitions)
            if (t.source == q && t.guard)
                for (const auto& r : t.guard->selection)
                    if (!r.is_current()) reads.insert(r.id());

        for (RegisterId r : reads) {
            // r is written on every trail to q iff q is unreachable once all
            // transitions writing r are removed
            std::set<StateId> seen = a.start_states;
            std::deque<StateId> todo(seen.begin(), seen.end());
            bool reached = seen.count(q) != 0;
            while (!todo.empty() && !reached) {
                StateId cur = todo.front();
                todo.pop_front();
                for (const auto& t : a.transitions) {
                    if (t.source != cur || seen.count(t.target)) continue;
                    if (t.guard &&
                        std::find(t.guard->writes.begin(), t.guard->writes.end(), r) !=
                            t.guard->writes.end())
                        continue;
                    seen.insert(t.target);
                    todo.push_back(t.target);
                    if (t.target == q) {
                        reached = true;
                        break;
                    }
                }
            }
            if (reached)
                diags.push_back({Severity::Error, "state q" + std::to_string(q),
                                 "register r" + std::to_string(r) +
                                     " is read here but not written on every trail from the start"});
        }
    }
    return diags;
}

Diagnostics check_deterministic(const RegisterAutomaton& a, DeterminismMode mode,
                                std::span<const Probe> probes) {
    Diagnostics diags;
    if (a.start_states.size() != 1)
        diags.push_back({Severity::Error, "automaton",
                         "expected a single start state, found " +
                             std::to_string(a.start_states.size())});

    const auto out_idx = outgoing_index(a);
    for (StateId q : a.states) {
        auto it = out_idx.find(q);
        if (it == out_idx.end()) continue;
        bool reported = false;
        for (std::size_t pi = 0; pi < probes.size() && !reported; ++pi) {
            const auto& probe = probes[pi];
            std::vector<std::size_t> applicable;
            for (std::size_t ti : it->second) {
                const auto& t = a.transitions[ti];
                if (!t.is_epsilon() && guard_applies_quiet(*t.guard, probe.registers, probe.event))
                    applicable.push_back(ti);
            }
            for (std::size_t x = 0; x < applicable.size() && !reported; ++x) {
                for (std::size_t y = x + 1; y < applicable.size() && !reported; ++y) {
                    const auto& gx = *a.transitions[applicable[x]].guard;
                    const auto& gy = *a.transitions[applicable[y]].guard;
                    if (mode == DeterminismMode::PerOutput && gx.output != gy.output) continue;
                    diags.push_back(
                        {Severity::Error, "state q" + std::to_string(q),
                         "transitions " + std::to_string(applicable[x]) + " and " +
                             std::to_string(applicable[y]) + " both apply on probe " +
                             std::to_string(pi) +
                             (mode == DeterminismMode::PerOutput ? " with the same output" : "")});
                    reported = true;
                }
            }
        }
    }
    return diags;
}

namespace {

struct Canonical {
    std::map<StateId, std::size_t> state_index;
    std::map<RegisterId, std::size_t> register_index;
    std::vector<std::size_t> transition_order;
};

std::string canonical_selection(const Guard& g, const Canonical& c) {
    std::string rs = "(";
    for (std::size_t i = 0; i < g.selection.size(); ++i) {
        if (i) rs += ',';
        rs += g.selection[i].is_current()
                  ? "~"
                  : "r" + std::to_string(c.register_index.at(g.selection[i].id()));
    }
    return rs + ")";
}

std::string canonical_writes(const Guard& g, const Canonical& c) {
    std::vector<std::size_t> widx;
    for (RegisterId r : g.writes) widx.push_back(c.register_index.at(r));
    std::sort(widx.begin(), widx.end());
    std::string ws = "{";
    for (std::size_t i = 0; i < widx.size(); ++i) {
        if (i) ws += ',';
        ws += "r" + std::to_string(widx[i]);
    }
    return ws + "}";
}

std::string guard_text(const Guard& g, const Canonical& c) {
    return std::string(g.output == Output::Mark ? "mark" : "skip") + ' ' +
           canonical_selection(g, c) + ' ' + canonical_writes(g, c) + ' ' + g.formula.text();
}

Canonical canonicalize(const RegisterAutomaton& a) {
    Canonical c;
    for (StateId q : a.states) c.state_index.emplace(q, c.state_index.size());
    for (RegisterId r : a.registers) c.register_index.emplace(r, c.register_index.size());

    std::vector<std::pair<std::string, std::size_t>> keyed;
    for (std::size_t i = 0; i < a.transitions.size(); ++i) {
        const auto& t = a.transitions[i];
        std::ostringstream key;
        key.width(8);
        key << c.state_index.at(t.source) << '|';
        key.width(8);
        key << c.state_index.at(t.target) << '|';
        key << (t.is_epsilon() ? "epsilon" : guard_text(*t.guard, c));
        keyed.emplace_back(key.str(), i);
    }
    std::sort(keyed.begin(), keyed.end());
    for (auto& [key, i] : keyed) c.transition_order.push_back(i);
    return c;
}

} // namespace

std::string to_dump(const RegisterAutomaton& a) {
    const Canonical c = canonicalize(a);
    std::string out = "rma\n";
    out += "states";
    for (const auto& [q, idx] : c.state_index) out += " q" + std::to_string(idx);
    out += "\nstart";
    for (StateId q : a.start_states) out += " q" + std::to_string(c.state_index.at(q));
    out += "\nfinal";
    for (StateId q : a.final_states) out += " q" + std::to_string(c.state_index.at(q));
    out += "\nregisters";
    for (const auto& [r, idx] : c.register_index) out += " r" + std::to_string(idx);
    out += '\n';
    for (std::size_t i : c.transition_order) {
        const auto& t = a.transitions[i];
        out += "transition q" + std::to_string(c.state_index.at(t.source)) + " q" +
               std::to_string(c.state_index.at(t.target)) + ' ';
        out += t.is_epsilon() ? "epsilon" : guard_text(*t.guard, c);
        out += '\n';
    }
    return out;
}

std::string to_dot(const RegisterAutomaton& a) {
    const Canonical c = canonicalize(a);
    std::string out = "digraph automaton {\n  rankdir=LR;\n";
    for (const auto& [q, idx] : c.state_index) {
        out += "  q" + std::to_string(idx) + " [shape=" +
               (a.final_states.count(q) ? "doublecircle" : "circle") + "];\n";
    }
    std::size_t sidx = 0;
    for (StateId q : a.start_states) {
        out += "  start" + std::to_string(sidx) + " [shape=point];\n";
        out += "  start" + std::to_string(sidx) + " -> q" + std::to_string(c.state_index.at(q)) +
               ";\n";
        ++sidx;
    }
    for (std::size_t i : c.transition_order) {
        const auto& t = a.transitions[i];
        std::string label;
        if (t.is_epsilon()) {
            label = "ε";
        } else {
            const auto& g = *t.guard;
            label = g.formula.text() + " / " + canonical_selection(g, c) + " / " +
                    canonical_writes(g, c) + " / " + (g.output == Output::Mark ? "•" : "∘");
        }
        out += "  q" + std::to_string(c.state_index.at(t.source)) + " -> q" +
               std::to_string(c.state_index.at(t.target)) + " [label=\"" + label + "\"];\n";
    }
    out += "}\n";
    return out;
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::uint32_t parse_id(const std::string& token, char prefix) {
    if (token.size() < 2 || token[0] != prefix)
        throw ParseError("expected " + std::string(1, prefix) + "<n>, got '" + token + "'");
    return static_cast<std::uint32_t>(std::stoul(token.substr(1)));
}

} // namespace

RegisterAutomaton parse_dump(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    RegisterAutomaton a;
    if (!std::getline(in, line) || line != "rma") throw ParseError("dump must begin with 'rma'");
    bool saw_states = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto tokens = split_ws(line);
        if (tokens.empty()) continue;
        const std::string& head = tokens[0];
        if (head == "states") {
            for (std::size_t i = 1; i < tokens.size(); ++i) a.states.insert(parse_id(tokens[i], 'q'));
            saw_states = true;
        } else if (head == "start") {
            for (std::size_t i = 1; i < tokens.size(); ++i)
                a.start_states.insert(parse_id(tokens[i], 'q'));
        } else if (head == "final") {
            for (std::size_t i = 1; i < tokens.size(); ++i)
                a.final_states.insert(parse_id(tokens[i], 'q'));
        } else if (head == "registers") {
            for (std::size_t i = 1; i < tokens.size(); ++i)
                a.registers.insert(parse_id(tokens[i], 'r'));
        } else if (head == "transition") {
            if (tokens.size() < 4) throw ParseError("malformed transition line: " + line);
            Transition t;
            t.source = parse_id(tokens[1], 'q');
            t.target = parse_id(tokens[2], 'q');
            if (tokens[3] == "epsilon") {
                a.transitions.push_back(std::move(t));
                continue;
            }
            if (tokens.size() < 6) throw ParseError("malformed guarded transition: " + line);
            Guard g;
            g.output = tokens[3] == "mark" ? Output::Mark : Output::Skip;
            if (tokens[3] != "mark" && tokens[3] != "skip")
                throw ParseError("unknown output '" + tokens[3] + "'");
            const std::string& rs = tokens[4];
            if (rs.front() != '(' || rs.back() != ')') throw ParseError("malformed selection: " + rs);
            std::string inner = rs.substr(1, rs.size() - 2);
            if (!inner.empty()) {
                std::istringstream rin(inner);
                std::string part;
                while (std::getline(rin, part, ',')) {
                    if (part == "~") g.selection.push_back(RegRef::current());
                    else g.selection.push_back(RegRef::reg(parse_id(part, 'r')));
                }
            }
            const std::string& ws = tokens[5];
            if (ws.front() != '{' || ws.back() != '}') throw ParseError("malformed writes: " + ws);
            inner = ws.substr(1, ws.size() - 2);
            if (!inner.empty()) {
                std::istringstream win(inner);
                std::string part;
                while (std::getline(win, part, ',')) g.writes.push_back(parse_id(part, 'r'));
                std::sort(g.writes.begin(), g.writes.end());
            }
            std::string formula_text;
            for (std::size_t i = 6; i < tokens.size(); ++i) {
                if (i > 6) formula_text += ' ';
                formula_text += tokens[i];
            }
            g.formula = parse_positional_formula(formula_text, g.selection.size());
            t.guard = std::move(g);
            a.transitions.push_back(std::move(t));
        } else {
            throw ParseError("unknown dump directive '" + head + "'");
        }
    }
    if (!saw_states) throw ParseError("dump has no states line");
    a.validate();
    return a;
}

} // namespace regcep
