#ifndef REGCEP_ORACLE_HPP
#define REGCEP_ORACLE_HPP

#include <map>
#include <set>
#include <string>

#include "regcep/automaton.hpp"
#include "regcep/events.hpp"
#include "regcep/pattern.hpp"

namespace regcep::oracle {

// Exhaustive reference evaluator for pattern semantics. Exponential by
// design; it is the ground truth the engine is tested against, not a
// production path.

using Valuation = std::map<std::string, std::size_t>;

struct Derivation {
    Match match;         // sorted stream indices
    Valuation valuation; // variable -> index bindings used by this derivation

    auto operator<=>(const Derivation&) const = default;
};

// Streams longer than this are rejected with OracleCapError.
inline constexpr std::size_t kMaxStreamLength = 12;

// Denotational evaluation of a bounded pattern starting at index i:
// base enumerates every later event of the relation, filter keeps
// derivations whose bound tuples satisfy the formula, sequence concatenates
// with min(right) > max(left), iteration concatenates 1..n copies under
// fresh valuation scopes.
std::set<Derivation> eval(const Pattern& p, const Stream& s, std::size_t i);

// Matches of the windowed pattern: max(M) - min(M) < w.
std::set<Match> eval_windowed(const WindowedPattern& p, const Stream& s, std::size_t i);

// Matches from any start index; skip semantics make i = 0 sufficient.
std::set<Match> all_matches(const Pattern& p, const Stream& s);
std::set<Match> all_matches(const WindowedPattern& p, const Stream& s);

// Matches grouped the way the engine reports them: a match lands at
// max(M) + 1, the index right after its last event.
MatchReport report(const Pattern& p, const Stream& s);
MatchReport report(const WindowedPattern& p, const Stream& s);

} // namespace regcep::oracle

#endif
