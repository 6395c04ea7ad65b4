#include "regcep/determinize.hpp"

#include <algorithm>
#include <deque>

#include "regcep/errors.hpp"

namespace regcep {

namespace {

constexpr std::size_t kMaxSubsets = 100000;

struct GatheredClass {
    Formula formula;
    std::vector<RegRef> selection;
    std::vector<std::size_t> members; // transition indices sharing this guard
};

// Outgoing guards of the subset's members in deterministic order, duplicate
// (formula, selection) pairs merged.
std::vector<GatheredClass> gather(const RegisterAutomaton& a, const std::vector<StateId>& subset) {
    std::vector<GatheredClass> classes;
    for (StateId q : subset) {
        for (std::size_t ti = 0; ti < a.transitions.size(); ++ti) {
            const auto& t = a.transitions[ti];
            if (t.source != q || t.is_epsilon()) continue;
            auto it = std::find_if(classes.begin(), classes.end(), [&](const GatheredClass& c) {
                return c.formula == t.guard->formula && c.selection == t.guard->selection;
            });
            if (it == classes.end()) {
                classes.push_back({t.guard->formula, t.guard->selection, {ti}});
            } else {
                it->members.push_back(ti);
            }
        }
    }
    return classes;
}

std::vector<MinTerm> class_min_terms(const std::vector<GatheredClass>& classes) {
    std::vector<std::pair<Formula, std::size_t>> with_offsets;
    std::size_t offset = 0;
    for (const auto& c : classes) {
        with_offsets.emplace_back(c.formula, offset);
        offset += c.formula.arity();
    }
    return min_terms(with_offsets);
}

std::vector<RegRef> concat_selections(const std::vector<GatheredClass>& classes) {
    std::vector<RegRef> out;
    for (const auto& c : classes) out.insert(out.end(), c.selection.begin(), c.selection.end());
    return out;
}

void require_epsilon_free_single_start(const RegisterAutomaton& a) {
    for (const auto& t : a.transitions)
        if (t.is_epsilon()) throw Error("determinization requires an epsilon-free automaton");
    a.single_start();
}

// Shared subset-expansion loop; `build_transitions` emits the transitions of
// one subset given its gathered classes and min-terms.
template <typename BuildTransitions>
RegisterAutomaton subset_construction(const RegisterAutomaton& a, SubsetInfo* info,
                                      BuildTransitions&& build_transitions) {
    RegisterAutomaton out;
    out.registers = a.registers;

    std::map<std::vector<StateId>, StateId> ids;
    std::deque<std::vector<StateId>> todo;
    auto intern = [&](const std::vector<StateId>& subset) {
        auto it = ids.find(subset);
        if (it != ids.end()) return it->second;
        const StateId id = static_cast<StateId>(ids.size());
        if (ids.size() >= kMaxSubsets) throw ResourceExhaustedError(ids.size());
        out.states.insert(id);
        if (std::any_of(subset.begin(), subset.end(),
                        [&](StateId q) { return a.final_states.count(q) != 0; }))
            out.final_states.insert(id);
        if (info) info->members.emplace(id, subset);
        ids.emplace(subset, id);
        todo.push_back(subset);
        return id;
    };

    const StateId start = intern({a.single_start()});
    out.start_states = {start};

    while (!todo.empty()) {
        std::vector<StateId> subset = std::move(todo.front());
        todo.pop_front();
        const StateId source_id = ids.at(subset);
        auto classes = gather(a, subset);
        if (classes.empty()) continue;
        auto terms = class_min_terms(classes);
        build_transitions(source_id, classes, terms, intern, out);
    }
    return out;
}

} // namespace

std::vector<MarkedMinTerm> marked_min_terms(
    std::span<const std::pair<Formula, std::vector<RegRef>>> formulas,
    std::span<const Output> outputs) {
    std::vector<std::pair<Formula, std::size_t>> with_offsets;
    std::size_t offset = 0;
    for (const auto& [f, selection] : formulas) {
        with_offsets.emplace_back(f, offset);
        offset += f.arity();
    }
    std::vector<MarkedMinTerm> out;
    for (const auto& mt : min_terms(with_offsets))
        for (Output o : outputs) out.push_back(MarkedMinTerm{mt, o});
    return out;
}

RegisterAutomaton determinize(const RegisterAutomaton& a, SubsetInfo* info) {
    require_epsilon_free_single_start(a);

    return subset_construction(
        a, info,
        [&](StateId source_id, const std::vector<GatheredClass>& classes,
            const std::vector<MinTerm>& terms, auto& intern, RegisterAutomaton& out) {
            static constexpr Output kOutputs[] = {Output::Mark, Output::Skip};
            for (const auto& mt : terms) {
                for (Output output : kOutputs) {
                    std::set<StateId> targets;
                    std::set<RegisterId> writes;
                    for (std::size_t j = 0; j < classes.size(); ++j) {
                        if (mt.conjuncts[j].negated) continue;
                        for (std::size_t ti : classes[j].members) {
                            const auto& t = a.transitions[ti];
                            if (t.guard->output != output) continue;
                            targets.insert(t.target);
                            writes.insert(t.guard->writes.begin(), t.guard->writes.end());
                        }
                    }
                    if (targets.empty()) continue;
                    const StateId target_id =
                        intern(std::vector<StateId>(targets.begin(), targets.end()));
                    Guard g;
                    g.formula = mt.to_formula();
                    g.selection = concat_selections(classes);
                    g.writes.assign(writes.begin(), writes.end());
                    g.output = output;
                    out.transitions.push_back(Transition{source_id, target_id, std::move(g)});
                }
            }
        });
}

namespace {

// Any cycle beyond a self-loop on the start state disqualifies the input.
void require_unrolled(const RegisterAutomaton& a) {
    const StateId start = a.single_start();
    // DFS cycle detection ignoring start self-loops
    std::map<StateId, int> color; // 0 white, 1 grey, 2 black
    std::vector<std::pair<StateId, std::size_t>> stack;
    std::map<StateId, std::vector<StateId>> succ;
    for (const auto& t : a.transitions) {
        if (t.source == start && t.target == start) continue;
        if (t.source == t.target)
            throw NotUnrolledError("self-loop outside the start state");
        succ[t.source].push_back(t.target);
    }
    for (StateId root : a.states) {
        if (color[root] != 0) continue;
        stack.push_back({root, 0});
        color[root] = 1;
        while (!stack.empty()) {
            auto& [q, next] = stack.back();
            auto& edges = succ[q];
            if (next < edges.size()) {
                StateId to = edges[next++];
                if (color[to] == 1) throw NotUnrolledError("cycle beyond the start self-loop");
                if (color[to] == 0) {
                    color[to] = 1;
                    stack.push_back({to, 0});
                }
            } else {
                color[q] = 2;
                stack.pop_back();
            }
        }
    }
}

} // namespace

RegisterAutomaton determinize_output_agnostic(const RegisterAutomaton& a, SubsetInfo* info) {
    require_epsilon_free_single_start(a);
    require_unrolled(a);

    return subset_construction(
        a, info,
        [&](StateId source_id, const std::vector<GatheredClass>& classes,
            const std::vector<MinTerm>& terms, auto& intern, RegisterAutomaton& out) {
            for (const auto& mt : terms) {
                std::set<StateId> targets;
                std::set<RegisterId> writes;
                bool marks = false;
                for (std::size_t j = 0; j < classes.size(); ++j) {
                    if (mt.conjuncts[j].negated) continue;
                    for (std::size_t ti : classes[j].members) {
                        const auto& t = a.transitions[ti];
                        targets.insert(t.target);
                        writes.insert(t.guard->writes.begin(), t.guard->writes.end());
                        if (t.guard->output == Output::Mark) marks = true;
                    }
                }
                if (targets.empty()) continue;
                const StateId target_id = intern(std::vector<StateId>(targets.begin(), targets.end()));
                Guard g;
                g.formula = mt.to_formula();
                g.selection = concat_selections(classes);
                g.writes.assign(writes.begin(), writes.end());
                g.output = marks ? Output::Mark : Output::Skip;
                out.transitions.push_back(Transition{source_id, target_id, std::move(g)});
            }
        });
}

} // namespace regcep
