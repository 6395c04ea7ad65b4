#ifndef REGCEP_AUTOMATON_HPP
#define REGCEP_AUTOMATON_HPP

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "regcep/events.hpp"
#include "regcep/formula.hpp"
#include "regcep/pattern.hpp"

namespace regcep {

using StateId = std::uint32_t;
using RegisterId = std::uint32_t;

// Register selection entry: a register or the current event slot (~).
class RegRef {
public:
    static RegRef current() { return RegRef(kCurrent); }
    static RegRef reg(RegisterId id) { return RegRef(id); }

    bool is_current() const { return value_ == kCurrent; }
    RegisterId id() const { return value_; }

    auto operator<=>(const RegRef&) const = default;

private:
    explicit RegRef(std::uint32_t v) : value_(v) {}
    static constexpr std::uint32_t kCurrent = 0xffffffffu;
    std::uint32_t value_ = kCurrent;
};

// Transition output: the consumed event is part of the match, or skipped.
enum class Output { Mark, Skip };

struct Guard {
    Formula formula = Formula::truth(1);
    std::vector<RegRef> selection;    // |selection| == formula.arity()
    std::vector<RegisterId> writes;   // sorted, unique
    Output output = Output::Skip;

    bool operator==(const Guard&) const;
};

struct Transition {
    StateId source = 0;
    StateId target = 0;
    std::optional<Guard> guard;       // nullopt = epsilon

    bool is_epsilon() const { return !guard.has_value(); }
    bool operator==(const Transition&) const = default;
};

// Symbolic automaton with registers. Guarded transitions evaluate their
// formula over the current event and selected register contents, may write
// the consumed event to registers, and mark or skip it.
struct RegisterAutomaton {
    std::set<StateId> states;
    std::set<StateId> start_states;
    std::set<StateId> final_states;
    std::set<RegisterId> registers;
    std::vector<Transition> transitions;

    StateId single_start() const; // throws when |start_states| != 1
    void validate() const;        // structural invariants
};

// Register contents; a register absent from the map is empty.
using RegisterBank = std::map<RegisterId, Event>;

struct Configuration {
    std::size_t next_index = 0;     // next event to consume
    StateId state = 0;
    RegisterBank registers;
    std::set<std::size_t> marks;    // indices output as Mark so far

    bool operator==(const Configuration&) const = default;
    bool operator<(const Configuration& o) const {
        return std::tie(next_index, state, registers, marks) <
               std::tie(o.next_index, o.state, o.registers, o.marks);
    }
};

using Match = std::vector<std::size_t>; // sorted indices

struct MatchReport {
    // per_index[n] = matches completed after consuming the event at n-1.
    std::map<std::size_t, std::set<Match>> per_index;

    std::set<Match> all() const;
    std::string serialize() const;
    bool operator==(const MatchReport&) const = default;
};

// One-step successors: epsilon moves always, guarded moves when an event is
// supplied. Reading an empty register raises RegisterCoverageError.
std::vector<Configuration> successors(const RegisterAutomaton& a, const Configuration& c,
                                      const Event* next_event);

struct RunOptions {
    std::size_t max_configurations = 100000;
    bool dedup = true;
};

struct RunStats {
    std::size_t max_live = 0;
};

// Breadth-first closure over successors from every start state; reports a
// match at index n whenever a final-state configuration's last consumed
// transition marked event n-1.
MatchReport run_stream(const RegisterAutomaton& a, const Stream& s, std::size_t start_index = 0,
                       RunOptions options = {}, RunStats* stats = nullptr);

// Standard epsilon elimination; preserves matches. States that cannot take
// part in an accepting run are pruned (start states are always kept).
RegisterAutomaton eliminate_epsilon(const RegisterAutomaton& a);

// Empty iff every register read at a state is written on every trail from a
// start state to it, so no run can read an empty register.
Diagnostics validate_register_coverage(const RegisterAutomaton& a);

enum class DeterminismMode { PerOutput, OutputAgnostic };

struct Probe {
    RegisterBank registers;
    Event event;
};

// Empty iff on every probe at most one guarded transition per state applies
// (per output, or overall for OutputAgnostic), and the start state is unique.
Diagnostics check_deterministic(const RegisterAutomaton& a, DeterminismMode mode,
                                std::span<const Probe> probes);

// Deterministic Graphviz rendering; states sorted, edges labeled f/rs/R/o.
std::string to_dot(const RegisterAutomaton& a);

// Canonical line-oriented dump (states and registers renumbered, transitions
// sorted). Byte-stable across runs; parseable by parse_dump.
std::string to_dump(const RegisterAutomaton& a);
RegisterAutomaton parse_dump(std::string_view text);

} // namespace regcep

#endif
