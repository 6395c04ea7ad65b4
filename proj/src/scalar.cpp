#include "regcep/scalar.hpp"

#include <charconv>

#include "regcep/errors.hpp"

namespace regcep {

Kind kind_of(const Scalar& s) {
    switch (s.index()) {
    case 0: return Kind::Symbol;
    case 1: return Kind::Integer;
    default: return Kind::Real;
    }
}

std::string kind_name(Kind k) {
    switch (k) {
    case Kind::Symbol: return "symbol";
    case Kind::Integer: return "integer";
    default: return "real";
    }
}

std::string to_text(const Scalar& s) {
    if (const auto* sym = std::get_if<std::string>(&s)) return *sym;
    if (const auto* i = std::get_if<std::int64_t>(&s)) return std::to_string(*i);
    // Shortest round-trip representation keeps stream serialization stable.
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, std::get<double>(s));
    return std::string(buf, res.ptr);
}

namespace {

double as_real(const Scalar& s) {
    if (const auto* i = std::get_if<std::int64_t>(&s)) return static_cast<double>(*i);
    return std::get<double>(s);
}

} // namespace

bool scalar_equal(const Scalar& a, const Scalar& b) {
    const bool sym_a = kind_of(a) == Kind::Symbol;
    const bool sym_b = kind_of(b) == Kind::Symbol;
    if (sym_a != sym_b) return false; // symbol never equals a number
    if (sym_a) return std::get<std::string>(a) == std::get<std::string>(b);
    return as_real(a) == as_real(b);
}

bool scalar_less(const Scalar& a, const Scalar& b) {
    if (kind_of(a) == Kind::Symbol || kind_of(b) == Kind::Symbol)
        throw EvaluationError("ordered comparison is undefined on symbols");
    return as_real(a) < as_real(b);
}

} // namespace regcep
