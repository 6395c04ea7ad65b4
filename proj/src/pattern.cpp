#include "regcep/pattern.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "formula_parser.hpp"
#include "lexer.hpp"
#include "regcep/errors.hpp"

namespace regcep {

PatternPtr make_pattern(Pattern p) { return std::make_shared<const Pattern>(std::move(p)); }

namespace {

using detail::Lexer;
using detail::Token;

bool is_keyword(const std::string& word) {
    return word == "AS" || word == "FILTER" || word == "OR" || word == "WINDOW";
}

class PatternParser {
public:
    explicit PatternParser(std::string_view text) : lex_(text) {}

    ParsedPattern parse() {
        PatternPtr body = parse_or();
        if (lex_.at_ident("WINDOW")) {
            lex_.next();
            if (lex_.peek().kind != Token::Kind::Int) lex_.fail("expected window length");
            Token w = lex_.next();
            if (w.int_value <= 0) throw ParseError("window length must be positive", w.offset);
            expect_end();
            return WindowedPattern{std::move(body), static_cast<std::uint64_t>(w.int_value)};
        }
        expect_end();
        return body;
    }

private:
    void expect_end() {
        if (lex_.peek().kind != Token::Kind::End) lex_.fail("trailing input after pattern");
    }

    PatternPtr parse_or() {
        PatternPtr left = parse_chain();
        while (lex_.at_ident("OR")) {
            lex_.next();
            PatternPtr right = parse_chain();
            left = make_pattern(Pattern{OrPattern{std::move(left), std::move(right)}});
        }
        return left;
    }

    // Left-associative chain of ';' and FILTER; FILTER binds everything
    // parsed so far at this level.
    PatternPtr parse_chain() {
        PatternPtr e = parse_postfix();
        for (;;) {
            if (lex_.peek().kind == Token::Kind::Semi) {
                lex_.next();
                PatternPtr rhs = parse_postfix();
                e = make_pattern(Pattern{SeqPattern{std::move(e), std::move(rhs)}});
            } else if (lex_.at_ident("FILTER")) {
                lex_.next();
                auto parsed = detail::parse_filter_formula(lex_);
                e = make_pattern(Pattern{FilterPattern{
                    std::move(e), FilterSpec{std::move(parsed.formula), std::move(parsed.arg_vars)}}});
            } else {
                return e;
            }
        }
    }

    PatternPtr parse_postfix() {
        PatternPtr e = parse_primary();
        while (lex_.peek().kind == Token::Kind::Plus) {
            lex_.next();
            e = make_pattern(Pattern{IterPattern{std::move(e)}});
        }
        return e;
    }

    PatternPtr parse_primary() {
        const auto& tok = lex_.peek();
        if (tok.kind == Token::Kind::LParen) {
            lex_.next();
            PatternPtr inner = parse_or();
            if (lex_.at_ident("WINDOW")) lex_.fail("WINDOW is only allowed at the top level");
            if (lex_.peek().kind != Token::Kind::RParen) lex_.fail("expected ')'");
            lex_.next();
            return inner;
        }
        if (tok.kind != Token::Kind::Ident || is_keyword(tok.text))
            lex_.fail("expected a relation name or '('");
        Token relation = lex_.next();
        if (!lex_.at_ident("AS")) lex_.fail("expected AS after relation name");
        lex_.next();
        const auto& var = lex_.peek();
        if (var.kind != Token::Kind::Ident || is_keyword(var.text))
            lex_.fail("expected a variable name after AS");
        Token name = lex_.next();
        return make_pattern(Pattern{BasePattern{relation.text, name.text}});
    }

    Lexer lex_;
};

void collect_vars(const Pattern& p, std::set<std::string>& out) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, BasePattern>) {
                out.insert(node.var);
            } else if constexpr (std::is_same_v<T, FilterPattern>) {
                collect_vars(*node.child, out);
                out.insert(node.filter.arg_vars.begin(), node.filter.arg_vars.end());
            } else if constexpr (std::is_same_v<T, OrPattern> || std::is_same_v<T, SeqPattern>) {
                collect_vars(*node.left, out);
                collect_vars(*node.right, out);
            } else {
                collect_vars(*node.child, out);
            }
        },
        p.node);
}

// AS declarations only, with multiplicity tracking for well-formedness.
void collect_declarations(const Pattern& p, std::map<std::string, std::vector<const Pattern*>>& decls) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, BasePattern>) {
                decls[node.var].push_back(&p);
            } else if constexpr (std::is_same_v<T, FilterPattern> || std::is_same_v<T, IterPattern>) {
                collect_declarations(*node.child, decls);
            } else if constexpr (std::is_same_v<T, OrPattern> || std::is_same_v<T, SeqPattern>) {
                collect_declarations(*node.left, decls);
                collect_declarations(*node.right, decls);
            }
        },
        p.node);
}

bool subtree_contains(const Pattern& root, const Pattern* needle) {
    if (&root == needle) return true;
    return std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, BasePattern>) {
                return false;
            } else if constexpr (std::is_same_v<T, OrPattern> || std::is_same_v<T, SeqPattern>) {
                return subtree_contains(*node.left, needle) || subtree_contains(*node.right, needle);
            } else {
                return subtree_contains(*node.child, needle);
            }
        },
        root.node);
}

// Every pair of AS nodes declaring the same variable must sit in different
// branches of some OR; that keeps the compiler's transition-to-variable map
// single-valued along every branch.
void check_duplicate_declarations(const Pattern& root, Diagnostics& diags) {
    std::map<std::string, std::vector<const Pattern*>> decls;
    collect_declarations(root, decls);

    for (const auto& [var, nodes] : decls) {
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            for (std::size_t j = i + 1; j < nodes.size(); ++j) {
                // find whether some OR separates nodes[i] and nodes[j]
                std::function<bool(const Pattern&)> separated = [&](const Pattern& p) -> bool {
                    if (const auto* orn = std::get_if<OrPattern>(&p.node)) {
                        const bool i_left = subtree_contains(*orn->left, nodes[i]);
                        const bool j_left = subtree_contains(*orn->left, nodes[j]);
                        const bool i_right = subtree_contains(*orn->right, nodes[i]);
                        const bool j_right = subtree_contains(*orn->right, nodes[j]);
                        if ((i_left && j_right) || (i_right && j_left)) return true;
                        if (i_left && j_left) return separated(*orn->left);
                        if (i_right && j_right) return separated(*orn->right);
                        return false;
                    }
                    if (const auto* seq = std::get_if<SeqPattern>(&p.node)) {
                        if (subtree_contains(*seq->left, nodes[i]) &&
                            subtree_contains(*seq->left, nodes[j]))
                            return separated(*seq->left);
                        if (subtree_contains(*seq->right, nodes[i]) &&
                            subtree_contains(*seq->right, nodes[j]))
                            return separated(*seq->right);
                        return false;
                    }
                    if (const auto* filt = std::get_if<FilterPattern>(&p.node))
                        return separated(*filt->child);
                    if (const auto* iter = std::get_if<IterPattern>(&p.node))
                        return separated(*iter->child);
                    return false;
                };
                if (!separated(root))
                    diags.push_back({Severity::Error, pattern_text(root),
                                     "variable '" + var +
                                         "' is declared by two AS nodes outside distinct OR branches"});
            }
        }
    }
}

void check_bounded_rec(const Pattern& p, Diagnostics& diags) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, BasePattern>) {
                if (node.var.empty())
                    diags.push_back({Severity::Error, pattern_text(p), "empty variable name"});
            } else if constexpr (std::is_same_v<T, FilterPattern>) {
                check_bounded_rec(*node.child, diags);
                auto in_scope = vars(*node.child);
                auto bounded = bound_vars(*node.child);
                for (const auto& v : node.filter.arg_vars) {
                    if (!in_scope.count(v))
                        diags.push_back({Severity::Error, pattern_text(p),
                                         "filter variable '" + v +
                                             "' does not occur in the filtered sub-pattern"});
                    else if (!bounded.count(v))
                        diags.push_back({Severity::Error, pattern_text(p),
                                         "filter variable '" + v + "' is not bound in '" +
                                             pattern_text(*node.child) + "'"});
                }
                std::set<std::string> seen;
                for (const auto& v : node.filter.arg_vars)
                    if (!seen.insert(v).second)
                        diags.push_back({Severity::Error, pattern_text(p),
                                         "filter argument variables must be distinct ('" + v + "')"});
            } else if constexpr (std::is_same_v<T, OrPattern>) {
                check_bounded_rec(*node.left, diags);
                check_bounded_rec(*node.right, diags);
            } else if constexpr (std::is_same_v<T, SeqPattern>) {
                check_bounded_rec(*node.left, diags);
                check_bounded_rec(*node.right, diags);
                auto lv = vars(*node.left);
                auto rv = vars(*node.right);
                std::vector<std::string> shared;
                std::set_intersection(lv.begin(), lv.end(), rv.begin(), rv.end(),
                                      std::back_inserter(shared));
                for (const auto& v : shared)
                    diags.push_back({Severity::Error, pattern_text(p),
                                     "sequence operands share variable '" + v + "'"});
            } else {
                check_bounded_rec(*node.child, diags);
            }
        },
        p.node);
}

} // namespace

ParsedPattern parse_pattern(std::string_view text) { return PatternParser(text).parse(); }

std::set<std::string> vars(const Pattern& p) {
    std::set<std::string> out;
    collect_vars(p, out);
    return out;
}

std::set<std::string> bound_vars(const Pattern& p) {
    return std::visit(
        [&](const auto& node) -> std::set<std::string> {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, BasePattern>) {
                return {node.var};
            } else if constexpr (std::is_same_v<T, FilterPattern>) {
                return bound_vars(*node.child);
            } else if constexpr (std::is_same_v<T, OrPattern>) {
                auto l = bound_vars(*node.left);
                auto r = bound_vars(*node.right);
                std::set<std::string> out;
                std::set_intersection(l.begin(), l.end(), r.begin(), r.end(),
                                      std::inserter(out, out.begin()));
                return out;
            } else if constexpr (std::is_same_v<T, SeqPattern>) {
                auto l = bound_vars(*node.left);
                auto r = bound_vars(*node.right);
                l.insert(r.begin(), r.end());
                return l;
            } else {
                return {};
            }
        },
        p.node);
}

std::string to_text(const Diagnostics& diags) {
    std::string out;
    for (const auto& d : diags) {
        out += d.severity == Severity::Error ? "error: " : "warning: ";
        out += d.message;
        if (!d.where.empty()) out += " [in " + d.where + "]";
        out += '\n';
    }
    return out;
}

Diagnostics check_bounded(const Pattern& p) {
    Diagnostics diags;
    check_bounded_rec(p, diags);
    check_duplicate_declarations(p, diags);
    return diags;
}

namespace {

// precedence levels for printing: or(0) < chain(1: ';'/FILTER) < postfix(2) < primary
std::string render_pattern(const Pattern& p, int parent_prec) {
    return std::visit(
        [&](const auto& node) -> std::string {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, BasePattern>) {
                return node.relation + " AS " + node.var;
            } else if constexpr (std::is_same_v<T, FilterPattern>) {
                std::string out = render_pattern(*node.child, 1) + " FILTER " +
                                  node.filter.formula.text(node.filter.arg_vars);
                return parent_prec > 1 ? "(" + out + ")" : out;
            } else if constexpr (std::is_same_v<T, OrPattern>) {
                std::string out =
                    render_pattern(*node.left, 0) + " OR " + render_pattern(*node.right, 1);
                return parent_prec > 0 ? "(" + out + ")" : out;
            } else if constexpr (std::is_same_v<T, SeqPattern>) {
                std::string out =
                    render_pattern(*node.left, 1) + " ; " + render_pattern(*node.right, 2);
                return parent_prec > 1 ? "(" + out + ")" : out;
            } else {
                return "(" + render_pattern(*node.child, 0) + ")+";
            }
        },
        p.node);
}

} // namespace

std::string pattern_text(const Pattern& p) { return render_pattern(p, 0); }

std::string pattern_text(const WindowedPattern& p) {
    return pattern_text(*p.body) + " WINDOW " + std::to_string(p.window);
}

std::string pattern_text(const ParsedPattern& p) {
    if (const auto* w = std::get_if<WindowedPattern>(&p)) return pattern_text(*w);
    return pattern_text(*std::get<PatternPtr>(p));
}

} // namespace regcep
