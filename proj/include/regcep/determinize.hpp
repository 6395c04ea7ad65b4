#ifndef REGCEP_DETERMINIZE_HPP
#define REGCEP_DETERMINIZE_HPP

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "regcep/automaton.hpp"

namespace regcep {

// Min-term with a fixed output; transitions of the subset automaton are
// created per marked min-term.
struct MarkedMinTerm {
    MinTerm min_term;
    Output output;
};

// |outputs| x |kept min-terms|, argument blocks laid out in the order the
// (formula, selection) pairs were gathered.
std::vector<MarkedMinTerm> marked_min_terms(
    std::span<const std::pair<Formula, std::vector<RegRef>>> formulas,
    std::span<const Output> outputs);

struct SubsetInfo {
    std::map<StateId, std::vector<StateId>> members; // subset state -> sorted source states
};

// Subset construction over reachable subsets. Transitions carry marked
// min-terms built from the members' outgoing guards (duplicate
// formula/selection pairs deduplicated); a transition targets the union of
// member targets entailed positively with a matching output and writes the
// union of their write registers. Per-output deterministic; registers are
// unchanged; matches are preserved. Input must be epsilon-free with a single
// start state.
RegisterAutomaton determinize(const RegisterAutomaton& a, SubsetInfo* info = nullptr);

// Min-terms without output marking: at most one transition applies per state
// regardless of output, so at most one run exists. A transition marks iff
// any entailed constituent marks. Input must be acyclic except for start
// self-loops (an unrolled automaton).
RegisterAutomaton determinize_output_agnostic(const RegisterAutomaton& a,
                                              SubsetInfo* info = nullptr);

} // namespace regcep

#endif
