#ifndef REGCEP_PATTERN_HPP
#define REGCEP_PATTERN_HPP

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "regcep/formula.hpp"

namespace regcep {

struct Pattern;
using PatternPtr = std::shared_ptr<const Pattern>;

// R AS x — one event of relation R, bound to variable x.
struct BasePattern {
    std::string relation;
    std::string var;
};

// Formula plus the pattern variables feeding its argument slots, in order.
struct FilterSpec {
    Formula formula;
    std::vector<std::string> arg_vars; // |arg_vars| == formula.arity(), distinct
};

struct FilterPattern {
    PatternPtr child;
    FilterSpec filter;
};

struct OrPattern {
    PatternPtr left, right;
};

struct SeqPattern {
    PatternPtr left, right;
};

struct IterPattern {
    PatternPtr child;
};

struct Pattern {
    std::variant<BasePattern, FilterPattern, OrPattern, SeqPattern, IterPattern> node;
};

struct WindowedPattern {
    PatternPtr body;
    std::uint64_t window; // >= 1
};

using ParsedPattern = std::variant<PatternPtr, WindowedPattern>;

// Concrete syntax: keywords AS, FILTER, OR, WINDOW (case-sensitive),
// ';' sequence, postfix '+', parentheses. FILTER applies to the whole
// preceding sequence chain; parentheses override. WINDOW only at top level.
ParsedPattern parse_pattern(std::string_view text);

PatternPtr make_pattern(Pattern p);

// All variables occurring syntactically (AS declarations and FILTER uses).
std::set<std::string> vars(const Pattern& p);

// Variables guaranteed a binding by every derivation:
//   base {x} | filter -> child | or -> intersection | seq -> union | iter -> {}.
std::set<std::string> bound_vars(const Pattern& p);

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity;
    std::string where;
    std::string message;
};

using Diagnostics = std::vector<Diagnostic>;

std::string to_text(const Diagnostics& diags);

// Empty iff the pattern is well-formed and evaluable with finitely many
// registers: every filter uses only variables bound by its child, sequence
// operands share no variables, and duplicate AS declarations of one variable
// appear only in different branches of an OR.
Diagnostics check_bounded(const Pattern& p);

std::string pattern_text(const Pattern& p);
std::string pattern_text(const WindowedPattern& p);
std::string pattern_text(const ParsedPattern& p);

} // namespace regcep

#endif
