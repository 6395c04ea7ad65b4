#include "lexer.hpp"

#include <cctype>
#include <charconv>

namespace regcep::detail {

void Lexer::advance() {
    while (pos_ < input_.size() && std::isspace(static_cast<unsigned char>(input_[pos_]))) ++pos_;
    current_ = Token{};
    current_.offset = pos_;
    if (pos_ >= input_.size()) {
        current_.kind = Token::Kind::End;
        return;
    }
    const char c = input_[pos_];
    auto single = [&](Token::Kind k) {
        current_.kind = k;
        ++pos_;
    };
    switch (c) {
    case '(': single(Token::Kind::LParen); return;
    case ')': single(Token::Kind::RParen); return;
    case ';': single(Token::Kind::Semi); return;
    case '+': single(Token::Kind::Plus); return;
    case '.': single(Token::Kind::Dot); return;
    case '-': single(Token::Kind::Minus); return;
    case '=': single(Token::Kind::Cmp); current_.cmp = CmpOp::Eq; return;
    case '!':
        if (pos_ + 1 < input_.size() && input_[pos_ + 1] == '=') {
            current_.kind = Token::Kind::Cmp;
            current_.cmp = CmpOp::Ne;
            pos_ += 2;
            return;
        }
        throw ParseError("unexpected '!'", pos_);
    case '<':
    case '>': {
        current_.kind = Token::Kind::Cmp;
        const bool le = pos_ + 1 < input_.size() && input_[pos_ + 1] == '=';
        current_.cmp = c == '<' ? (le ? CmpOp::Le : CmpOp::Lt) : (le ? CmpOp::Ge : CmpOp::Gt);
        pos_ += le ? 2 : 1;
        return;
    }
    default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t end = pos_;
        bool real = false;
        while (end < input_.size() &&
               (std::isdigit(static_cast<unsigned char>(input_[end])) || input_[end] == '.')) {
            if (input_[end] == '.') {
                // attribute access like "1.x" never occurs; dot inside digits is a decimal point
                if (end + 1 >= input_.size() || !std::isdigit(static_cast<unsigned char>(input_[end + 1]))) break;
                real = true;
            }
            ++end;
        }
        auto token = input_.substr(pos_, end - pos_);
        if (real) {
            double v = 0;
            std::from_chars(token.data(), token.data() + token.size(), v);
            current_.kind = Token::Kind::Real;
            current_.real_value = v;
        } else {
            std::int64_t v = 0;
            std::from_chars(token.data(), token.data() + token.size(), v);
            current_.kind = Token::Kind::Int;
            current_.int_value = v;
        }
        pos_ = end;
        return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t end = pos_;
        while (end < input_.size() &&
               (std::isalnum(static_cast<unsigned char>(input_[end])) || input_[end] == '_'))
            ++end;
        current_.kind = Token::Kind::Ident;
        current_.text = std::string(input_.substr(pos_, end - pos_));
        pos_ = end;
        return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
}

} // namespace regcep::detail
