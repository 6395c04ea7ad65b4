#ifndef REGCEP_SRC_FORMULA_PARSER_HPP
#define REGCEP_SRC_FORMULA_PARSER_HPP

#include "lexer.hpp"
#include "regcep/formula.hpp"

namespace regcep::detail {

// Parses a formula from the shared token stream, stopping at the first token
// that cannot extend it (';', ')', '+', uppercase pattern keywords, end).
// Variables are collected in order of first occurrence.
ParsedFilter parse_filter_formula(Lexer& lex);

} // namespace regcep::detail

#endif
