#ifndef REGCEP_UNROLL_HPP
#define REGCEP_UNROLL_HPP

#include <cstdint>
#include <map>

#include "regcep/automaton.hpp"
#include "regcep/pattern.hpp"

namespace regcep {

// Unrolled automaton: a tree of walks of length <= w plus a TRUE skip
// self-loop on the start state. Every state and cloned register maps back to
// its original.
struct UnrollArtifacts {
    RegisterAutomaton automaton;
    std::map<StateId, StateId> state_origin;
    std::map<RegisterId, RegisterId> register_origin;
};

// Depth-by-depth frontier expansion of all walks up to length w; one fresh
// register clone per writing transition, selections rewritten to the latest
// clone on the unique root path; branches that cannot reach a final state
// are pruned. Throws NoAcceptingWalkError when no accepting walk fits in w.
// Input must be epsilon-free with a single start state; w >= 1.
UnrollArtifacts unroll(const RegisterAutomaton& a, std::uint64_t w);

// The clone of `original` written deepest on the unique path from the start
// to `state`. Throws RegisterCoverageError when no clone was written.
RegisterId find_last_appearance(const UnrollArtifacts& artifacts, RegisterId original,
                                StateId state);

// compile -> eliminate_epsilon -> unroll(w).
UnrollArtifacts compile_windowed(const WindowedPattern& p);

} // namespace regcep

#endif
