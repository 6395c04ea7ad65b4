#ifndef REGCEP_ERRORS_HPP
#define REGCEP_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace regcep {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed textual input (schema, stream, pattern, formula, dump).
struct ParseError : Error {
    ParseError(const std::string& message, std::size_t offset)
        : Error(message + " (at offset " + std::to_string(offset) + ")"), offset(offset) {}
    explicit ParseError(const std::string& message) : Error(message), offset(0) {}
    std::size_t offset;
};

// Pattern cannot be evaluated with finitely many registers.
struct NotBoundedError : Error {
    using Error::Error;
};

// An n-ary filter found no transition satisfying the trail condition.
struct NoEligibleTransitionError : Error {
    using Error::Error;
};

// Window is shorter than the shortest accepting walk.
struct NoAcceptingWalkError : Error {
    using Error::Error;
};

// Output-agnostic determinization requires an unrolled automaton.
struct NotUnrolledError : Error {
    using Error::Error;
};

// Formula evaluation failure: ordered comparison on symbols, missing attribute.
struct EvaluationError : Error {
    using Error::Error;
};

// An empty register was read during a run; the automaton violates register coverage.
struct RegisterCoverageError : Error {
    using Error::Error;
};

struct ResourceExhaustedError : Error {
    explicit ResourceExhaustedError(std::size_t live)
        : Error("live configuration count " + std::to_string(live) + " exceeds the configured limit"),
          live_configurations(live) {}
    std::size_t live_configurations;
};

// The brute-force reference evaluator refuses streams past its cap.
struct OracleCapError : Error {
    using Error::Error;
};

} // namespace regcep

#endif
