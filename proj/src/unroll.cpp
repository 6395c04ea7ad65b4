#include "regcep/unroll.hpp"

#include <algorithm>

#include "regcep/compile.hpp"
#include "regcep/errors.hpp"

namespace regcep {

namespace {

// Unique tree parent transition of `state`, excluding self-loops; npos for
// the root.
std::size_t parent_transition(const RegisterAutomaton& a, StateId state) {
    for (std::size_t i = 0; i < a.transitions.size(); ++i) {
        const auto& t = a.transitions[i];
        if (t.target == state && t.source != t.target) return i;
    }
    return static_cast<std::size_t>(-1);
}

} // namespace

RegisterId find_last_appearance(const UnrollArtifacts& artifacts, RegisterId original,
                                StateId state) {
    const auto& a = artifacts.automaton;
    StateId cur = state;
    for (;;) {
        const std::size_t pi = parent_transition(a, cur);
        if (pi == static_cast<std::size_t>(-1)) break;
        const auto& t = a.transitions[pi];
        if (t.guard)
            for (RegisterId w : t.guard->writes) {
                auto it = artifacts.register_origin.find(w);
                if (it != artifacts.register_origin.end() && it->second == original) return w;
            }
        cur = t.source;
    }
    throw RegisterCoverageError("no clone of register r" + std::to_string(original) +
                                " is written on the path to state q" + std::to_string(state));
}

UnrollArtifacts unroll(const RegisterAutomaton& a, std::uint64_t w) {
    for (const auto& t : a.transitions)
        if (t.is_epsilon()) throw Error("unrolling requires an epsilon-free automaton");
    const StateId original_start = a.single_start();
    if (w < 1) throw Error("window must be at least 1");

    UnrollArtifacts art;
    auto& u = art.automaton;
    u.states.insert(0);
    u.start_states = {0};
    art.state_origin[0] = original_start;
    if (a.final_states.count(original_start)) u.final_states.insert(0);

    StateId next_state = 1;
    RegisterId next_register = 0;

    std::vector<StateId> frontier{0};
    for (std::uint64_t depth = 1; depth <= w && !frontier.empty(); ++depth) {
        std::vector<StateId> next_frontier;
        for (StateId q : frontier) {
            const StateId origin = art.state_origin.at(q);
            for (const auto& t : a.transitions) {
                if (t.source != origin) continue;
                const StateId fresh = next_state++;
                u.states.insert(fresh);
                art.state_origin[fresh] = t.target;
                if (a.final_states.count(t.target)) u.final_states.insert(fresh);

                Guard g;
                g.formula = t.guard->formula;
                g.output = t.guard->output;
                for (RegisterId orig_w : t.guard->writes) {
                    const RegisterId clone = next_register++;
                    u.registers.insert(clone);
                    art.register_origin[clone] = orig_w;
                    g.writes.push_back(clone);
                }
                std::sort(g.writes.begin(), g.writes.end());
                for (const auto& sel : t.guard->selection) {
                    if (sel.is_current()) {
                        g.selection.push_back(RegRef::current());
                    } else {
                        g.selection.push_back(RegRef::reg(find_last_appearance(art, sel.id(), q)));
                    }
                }
                u.transitions.push_back(Transition{q, fresh, std::move(g)});
                next_frontier.push_back(fresh);
            }
        }
        frontier = std::move(next_frontier);
    }

    // prune branches whose leaves are not final: keep states with a final in
    // their subtree (the root always stays)
    std::set<StateId> keep{0};
    for (StateId f : u.final_states) {
        StateId cur = f;
        keep.insert(cur);
        for (;;) {
            const std::size_t pi = parent_transition(u, cur);
            if (pi == static_cast<std::size_t>(-1)) break;
            cur = u.transitions[pi].source;
            keep.insert(cur);
        }
    }
    if (u.final_states.empty())
        throw NoAcceptingWalkError("window " + std::to_string(w) +
                                   " is below the shortest accepting walk length");

    RegisterAutomaton pruned;
    pruned.start_states = {0};
    pruned.states = keep;
    for (StateId f : u.final_states)
        if (keep.count(f)) pruned.final_states.insert(f);
    for (auto& t : u.transitions)
        if (keep.count(t.source) && keep.count(t.target)) pruned.transitions.push_back(std::move(t));
    for (const auto& t : pruned.transitions) {
        for (const auto& sel : t.guard->selection)
            if (!sel.is_current()) pruned.registers.insert(sel.id());
        pruned.registers.insert(t.guard->writes.begin(), t.guard->writes.end());
    }
    for (auto it = art.state_origin.begin(); it != art.state_origin.end();)
        it = keep.count(it->first) ? std::next(it) : art.state_origin.erase(it);
    for (auto it = art.register_origin.begin(); it != art.register_origin.end();)
        it = pruned.registers.count(it->first) ? std::next(it) : art.register_origin.erase(it);

    // the skip self-loop lets a run start at any stream position
    Guard self;
    self.formula = Formula::truth(1);
    self.selection = {RegRef::current()};
    self.output = Output::Skip;
    pruned.transitions.push_back(Transition{0, 0, std::move(self)});

    art.automaton = std::move(pruned);
    art.automaton.validate();
    return art;
}

UnrollArtifacts compile_windowed(const WindowedPattern& p) {
    CompileArtifacts compiled = compile(*p.body); // throws NotBoundedError
    RegisterAutomaton flat = eliminate_epsilon(compiled.automaton);
    return unroll(flat, p.window);
}

} // namespace regcep
