#ifndef REGCEP_SCALAR_HPP
#define REGCEP_SCALAR_HPP

#include <cstdint>
#include <string>
#include <variant>

namespace regcep {

enum class Kind { Symbol, Integer, Real };

// Attribute value. Integer/real comparisons promote to real; symbols compare
// only by (in)equality.
using Scalar = std::variant<std::string, std::int64_t, double>;

Kind kind_of(const Scalar& s);
std::string kind_name(Kind k);
std::string to_text(const Scalar& s);

bool scalar_equal(const Scalar& a, const Scalar& b);
// Throws EvaluationError when either side is a symbol.
bool scalar_less(const Scalar& a, const Scalar& b);

} // namespace regcep

#endif
