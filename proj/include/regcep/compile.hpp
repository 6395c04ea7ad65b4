#ifndef REGCEP_COMPILE_HPP
#define REGCEP_COMPILE_HPP

#include <map>
#include <optional>
#include <span>
#include <string>

#include "regcep/automaton.hpp"
#include "regcep/pattern.hpp"

namespace regcep {

// Automaton plus the bookkeeping the construction threads through: which
// pattern variable a consuming transition belongs to, and which variable a
// register stores.
struct CompileArtifacts {
    RegisterAutomaton automaton;
    std::map<std::size_t, std::string> transition_var; // transition index -> variable
    std::map<RegisterId, std::string> register_var;    // register -> variable
};

// Bounded pattern to an equivalent automaton. Epsilon transitions are left
// in place; callers eliminate them when needed.
CompileArtifacts compile(const Pattern& p); // throws NotBoundedError

// Two states, a TRUE skip self-loop on the start, and one marking transition
// guarded by the relation test (conjoined with the optional unary filter).
CompileArtifacts compile_base(const std::string& relation, const std::string& var,
                              const std::optional<Formula>& unary_filter);

// Fresh start/final joined to both operands by epsilon transitions.
CompileArtifacts compile_or(CompileArtifacts left, CompileArtifacts right);

// Epsilon from every final of the left operand to the right operand's start.
CompileArtifacts compile_seq(CompileArtifacts left, CompileArtifacts right);

// Epsilon from every final back to the start.
CompileArtifacts compile_iter(CompileArtifacts inner);

// Conjoins the n-ary filter onto every transition whose variable is one of
// arg_vars and whose source sees every other argument variable on every
// trail from the start. Adds registers (shared per variable) and extends the
// modified transitions' selections; no states or transitions are added.
void apply_nary_filter(CompileArtifacts& artifacts, const Formula& filter,
                       std::span<const std::string> arg_vars); // throws NoEligibleTransitionError

struct NewSelection {
    std::vector<RegRef> selection;
    std::vector<RegisterId> new_registers;
    std::map<RegisterId, std::string> register_var_additions;
};

// Per argument variable: the current-event slot when the transition consumes
// it, the variable's existing register, or a fresh register that every
// transition of that variable is made to write.
NewSelection create_new_selection(CompileArtifacts& artifacts, std::size_t transition_index,
                                  std::span<const std::string> arg_vars);

} // namespace regcep

#endif
