#ifndef REGCEP_SRC_LEXER_HPP
#define REGCEP_SRC_LEXER_HPP

#include <cstdint>
#include <string>
#include <string_view>

#include "regcep/errors.hpp"
#include "regcep/formula.hpp"

namespace regcep::detail {

// Shared token stream for the pattern and formula grammars.
struct Token {
    enum class Kind {
        End, Ident, Int, Real,
        LParen, RParen, Semi, Plus, Dot, Minus, Cmp
    };
    Kind kind = Kind::End;
    std::string text;       // Ident
    std::int64_t int_value = 0;
    double real_value = 0;
    CmpOp cmp = CmpOp::Eq;  // Cmp
    std::size_t offset = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view input) : input_(input) { advance(); }

    const Token& peek() const { return current_; }
    Token next() {
        Token t = current_;
        advance();
        return t;
    }

    bool at_ident(std::string_view word) const {
        return current_.kind == Token::Kind::Ident && current_.text == word;
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(message, current_.offset);
    }

private:
    void advance();

    std::string_view input_;
    std::size_t pos_ = 0;
    Token current_;
};

} // namespace regcep::detail

#endif
