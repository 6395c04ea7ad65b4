#include "regcep/compile.hpp"

#include <algorithm>
#include <deque>

#include "regcep/errors.hpp"

namespace regcep {

namespace {

StateId next_state_id(const RegisterAutomaton& a) {
    return a.states.empty() ? 0 : *a.states.rbegin() + 1;
}

RegisterId next_register_id(const RegisterAutomaton& a) {
    return a.registers.empty() ? 0 : *a.registers.rbegin() + 1;
}

// Renumber `shifted` so its ids follow `base`'s; keeps per-compilation ids
// deterministic without a shared counter.
void shift_ids(CompileArtifacts& shifted, const CompileArtifacts& base) {
    const StateId state_off = next_state_id(base.automaton);
    const RegisterId reg_off = next_register_id(base.automaton);

    RegisterAutomaton out;
    for (StateId q : shifted.automaton.states) out.states.insert(q + state_off);
    for (StateId q : shifted.automaton.start_states) out.start_states.insert(q + state_off);
    for (StateId q : shifted.automaton.final_states) out.final_states.insert(q + state_off);
    for (RegisterId r : shifted.automaton.registers) out.registers.insert(r + reg_off);
    for (auto& t : shifted.automaton.transitions) {
        Transition nt;
        nt.source = t.source + state_off;
        nt.target = t.target + state_off;
        if (t.guard) {
            Guard g = *t.guard;
            for (auto& r : g.selection)
                if (!r.is_current()) r = RegRef::reg(r.id() + reg_off);
            for (auto& r : g.writes) r += reg_off;
            nt.guard = std::move(g);
        }
        out.transitions.push_back(std::move(nt));
    }
    shifted.automaton = std::move(out);

    std::map<RegisterId, std::string> rv;
    for (auto& [r, v] : shifted.register_var) rv.emplace(r + reg_off, std::move(v));
    shifted.register_var = std::move(rv);
    // transition indices shift by the base's transition count when merged;
    // handled by the merge below
}

// Appends `right` (already id-shifted) into `left`; returns the transition
// index offset applied to right's transitions.
std::size_t merge(CompileArtifacts& left, CompileArtifacts&& right) {
    const std::size_t offset = left.automaton.transitions.size();
    auto& a = left.automaton;
    auto& b = right.automaton;
    a.states.insert(b.states.begin(), b.states.end());
    a.registers.insert(b.registers.begin(), b.registers.end());
    for (auto& t : b.transitions) a.transitions.push_back(std::move(t));
    for (auto& [ti, v] : right.transition_var) left.transition_var.emplace(ti + offset, std::move(v));
    for (auto& [r, v] : right.register_var) left.register_var.emplace(r, std::move(v));
    return offset;
}

void add_epsilon(RegisterAutomaton& a, StateId from, StateId to) {
    a.transitions.push_back(Transition{from, to, std::nullopt});
}

// Collapse duplicate selection entries (e.g. two ~ slots) after conjoining,
// remapping the formula's argument indices onto the unique entries.
void collapse_selection(Guard& g) {
    std::vector<RegRef> unique;
    std::vector<std::uint32_t> mapping(g.selection.size());
    for (std::size_t i = 0; i < g.selection.size(); ++i) {
        auto it = std::find(unique.begin(), unique.end(), g.selection[i]);
        if (it == unique.end()) {
            mapping[i] = static_cast<std::uint32_t>(unique.size());
            unique.push_back(g.selection[i]);
        } else {
            mapping[i] = static_cast<std::uint32_t>(it - unique.begin());
        }
    }
    if (unique.size() == g.selection.size()) return;
    g.formula = remap_args(g.formula, mapping, unique.size());
    g.selection = std::move(unique);
}

// States reachable from the start when every transition of `var` is removed;
// `var` appears on every trail to q iff q is NOT in this set.
std::set<StateId> reachable_avoiding_var(const CompileArtifacts& art, const std::string& var) {
    std::set<std::size_t> banned;
    for (const auto& [ti, v] : art.transition_var)
        if (v == var) banned.insert(ti);

    const auto& a = art.automaton;
    std::set<StateId> seen = a.start_states;
    std::deque<StateId> todo(seen.begin(), seen.end());
    while (!todo.empty()) {
        StateId cur = todo.front();
        todo.pop_front();
        for (std::size_t i = 0; i < a.transitions.size(); ++i) {
            const auto& t = a.transitions[i];
            if (t.source != cur || banned.count(i) || seen.count(t.target)) continue;
            seen.insert(t.target);
            todo.push_back(t.target);
        }
    }
    return seen;
}

} // namespace

CompileArtifacts compile_base(const std::string& relation, const std::string& var,
                              const std::optional<Formula>& unary_filter) {
    CompileArtifacts art;
    auto& a = art.automaton;
    a.states = {0, 1};
    a.start_states = {0};
    a.final_states = {1};

    Guard self;
    self.formula = Formula::truth(1);
    self.selection = {RegRef::current()};
    self.output = Output::Skip;
    a.transitions.push_back(Transition{0, 0, std::move(self)});

    Formula guard_formula =
        Formula::compare(CmpOp::Eq, AttrRef{0, "type"}, Scalar(relation), 1);
    if (unary_filter) {
        if (unary_filter->arity() != 1) throw Error("base-case filter must be unary");
        guard_formula = Formula::conjunction({std::move(guard_formula), *unary_filter});
    }
    Guard consume;
    consume.formula = std::move(guard_formula);
    consume.selection = {RegRef::current()};
    consume.output = Output::Mark;
    a.transitions.push_back(Transition{0, 1, std::move(consume)});
    art.transition_var[1] = var;
    return art;
}

CompileArtifacts compile_or(CompileArtifacts left, CompileArtifacts right) {
    shift_ids(right, left);
    const StateId left_start = left.automaton.single_start();
    const StateId right_start = right.automaton.single_start();
    const auto left_finals = left.automaton.final_states;
    const auto right_finals = right.automaton.final_states;
    merge(left, std::move(right));

    auto& a = left.automaton;
    const StateId new_start = next_state_id(a);
    const StateId new_final = new_start + 1;
    a.states.insert(new_start);
    a.states.insert(new_final);
    add_epsilon(a, new_start, left_start);
    add_epsilon(a, new_start, right_start);
    for (StateId f : left_finals) add_epsilon(a, f, new_final);
    for (StateId f : right_finals) add_epsilon(a, f, new_final);
    a.start_states = {new_start};
    a.final_states = {new_final};
    return left;
}

CompileArtifacts compile_seq(CompileArtifacts left, CompileArtifacts right) {
    shift_ids(right, left);
    const StateId right_start = right.automaton.single_start();
    const auto right_finals = right.automaton.final_states;
    const auto left_finals = left.automaton.final_states;
    merge(left, std::move(right));

    auto& a = left.automaton;
    for (StateId f : left_finals) add_epsilon(a, f, right_start);
    a.final_states = right_finals;
    return left;
}

CompileArtifacts compile_iter(CompileArtifacts inner) {
    auto& a = inner.automaton;
    const StateId start = a.single_start();
    for (StateId f : a.final_states) add_epsilon(a, f, start);
    return inner;
}

NewSelection create_new_selection(CompileArtifacts& artifacts, std::size_t transition_index,
                                  std::span<const std::string> arg_vars) {
    NewSelection out;
    auto& a = artifacts.automaton;
    const auto own_var = artifacts.transition_var.at(transition_index);

    for (const auto& var : arg_vars) {
        if (var == own_var) {
            out.selection.push_back(RegRef::current());
            continue;
        }
        auto existing = std::find_if(artifacts.register_var.begin(), artifacts.register_var.end(),
                                     [&](const auto& kv) { return kv.second == var; });
        if (existing != artifacts.register_var.end()) {
            out.selection.push_back(RegRef::reg(existing->first));
            continue;
        }
        const RegisterId fresh = next_register_id(a);
        a.registers.insert(fresh);
        artifacts.register_var.emplace(fresh, var);
        out.new_registers.push_back(fresh);
        out.register_var_additions.emplace(fresh, var);
        // every transition consuming this variable writes the shared register
        for (const auto& [ti, v] : artifacts.transition_var) {
            if (v != var) continue;
            auto& writes = a.transitions[ti].guard->writes;
            writes.push_back(fresh);
            std::sort(writes.begin(), writes.end());
        }
        out.selection.push_back(RegRef::reg(fresh));
    }
    return out;
}

void apply_nary_filter(CompileArtifacts& artifacts, const Formula& filter,
                       std::span<const std::string> arg_vars) {
    if (filter.arity() != arg_vars.size())
        throw Error("filter arity does not match its argument variable list");

    // trail condition per argument variable, precomputed on the unmodified graph
    std::map<std::string, std::set<StateId>> avoid_reach;
    for (const auto& var : arg_vars) avoid_reach.emplace(var, reachable_avoiding_var(artifacts, var));

    std::vector<std::size_t> eligible;
    for (const auto& [ti, var] : artifacts.transition_var) {
        if (std::find(arg_vars.begin(), arg_vars.end(), var) == arg_vars.end()) continue;
        bool ok = true;
        for (const auto& other : arg_vars) {
            if (other == var) continue;
            // `other` must appear on every trail to the source state
            if (avoid_reach.at(other).count(artifacts.automaton.transitions[ti].source)) {
                ok = false;
                break;
            }
        }
        if (ok) eligible.push_back(ti);
    }
    if (eligible.empty())
        throw NoEligibleTransitionError("no transition satisfies the trail condition for filter " +
                                        filter.text());

    for (std::size_t ti : eligible) {
        NewSelection ns = create_new_selection(artifacts, ti, arg_vars);
        Guard& g = *artifacts.automaton.transitions[ti].guard;
        g.formula = conjoin_with_offset(g.formula, filter);
        g.selection.insert(g.selection.end(), ns.selection.begin(), ns.selection.end());
        collapse_selection(g);
    }
}

CompileArtifacts compile(const Pattern& p) {
    auto diags = check_bounded(p);
    if (!diags.empty()) throw NotBoundedError("pattern is not bounded:\n" + to_text(diags));

    struct Builder {
        CompileArtifacts operator()(const BasePattern& node) const {
            return compile_base(node.relation, node.var, std::nullopt);
        }
        CompileArtifacts operator()(const FilterPattern& node) const {
            CompileArtifacts art = std::visit(*this, node.child->node);
            apply_nary_filter(art, node.filter.formula, node.filter.arg_vars);
            return art;
        }
        CompileArtifacts operator()(const OrPattern& node) const {
            return compile_or(std::visit(*this, node.left->node), std::visit(*this, node.right->node));
        }
        CompileArtifacts operator()(const SeqPattern& node) const {
            return compile_seq(std::visit(*this, node.left->node), std::visit(*this, node.right->node));
        }
        CompileArtifacts operator()(const IterPattern& node) const {
            return compile_iter(std::visit(*this, node.child->node));
        }
    };
    CompileArtifacts art = std::visit(Builder{}, p.node);
    art.automaton.validate();
    return art;
}

} // namespace regcep
