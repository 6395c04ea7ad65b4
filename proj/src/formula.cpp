#include "regcep/formula.hpp"

#include <algorithm>
#include <functional>

#include "formula_parser.hpp"
#include "lexer.hpp"
#include "regcep/errors.hpp"

namespace regcep {

std::string_view cmp_op_text(CmpOp op) {
    switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    default: return ">=";
    }
}

std::string default_arg_name(std::size_t index) {
    static const char* first[] = {"z", "w", "u", "v"};
    if (index < 4) return first[index];
    return "a" + std::to_string(index);
}

namespace {

using Node = Formula::Node;
using NodePtr = Formula::NodePtr;
using NodeKind = Formula::NodeKind;

NodePtr make_node(Node n) { return std::make_shared<const Node>(std::move(n)); }

NodePtr leaf(NodeKind kind) {
    Node n;
    n.kind = kind;
    return make_node(std::move(n));
}

std::size_t max_arg(const Operand& o) {
    if (const auto* ref = std::get_if<AttrRef>(&o)) return std::size_t(ref->arg) + 1;
    return 0;
}

std::size_t min_arity(const NodePtr& n) {
    switch (n->kind) {
    case NodeKind::Compare: return std::max(max_arg(n->lhs), max_arg(n->rhs));
    case NodeKind::And:
    case NodeKind::Or:
    case NodeKind::Not: {
        std::size_t m = 0;
        for (const auto& c : n->children) m = std::max(m, min_arity(c));
        return m;
    }
    default: return 0;
    }
}

bool node_equal(const NodePtr& a, const NodePtr& b) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case NodeKind::Compare:
        return a->op == b->op && a->lhs == b->lhs && a->rhs == b->rhs;
    case NodeKind::And:
    case NodeKind::Or:
    case NodeKind::Not:
        if (a->children.size() != b->children.size()) return false;
        for (std::size_t i = 0; i < a->children.size(); ++i)
            if (!node_equal(a->children[i], b->children[i])) return false;
        return true;
    default:
        return true;
    }
}

Operand map_operand(const Operand& o, const std::function<std::uint32_t(std::uint32_t)>& f) {
    if (const auto* ref = std::get_if<AttrRef>(&o)) return AttrRef{f(ref->arg), ref->attr};
    return o;
}

NodePtr map_args(const NodePtr& n, const std::function<std::uint32_t(std::uint32_t)>& f) {
    switch (n->kind) {
    case NodeKind::Compare:
        return make_node(Node{NodeKind::Compare, n->op, map_operand(n->lhs, f), map_operand(n->rhs, f), {}});
    case NodeKind::And:
    case NodeKind::Or:
    case NodeKind::Not: {
        Node out;
        out.kind = n->kind;
        out.children.reserve(n->children.size());
        for (const auto& c : n->children) out.children.push_back(map_args(c, f));
        return make_node(std::move(out));
    }
    default:
        return n;
    }
}

const Scalar& resolve(const Operand& o, std::span<const Event* const> args, Scalar& storage) {
    if (const auto* ref = std::get_if<AttrRef>(&o)) return args[ref->arg]->at(ref->attr);
    storage = std::get<Scalar>(o);
    return storage;
}

bool eval_node(const NodePtr& n, std::span<const Event* const> args) {
    switch (n->kind) {
    case NodeKind::True: return true;
    case NodeKind::False: return false;
    case NodeKind::Compare: {
        Scalar ls, rs;
        const Scalar& l = resolve(n->lhs, args, ls);
        const Scalar& r = resolve(n->rhs, args, rs);
        switch (n->op) {
        case CmpOp::Eq: return scalar_equal(l, r);
        case CmpOp::Ne: return !scalar_equal(l, r);
        case CmpOp::Lt: return scalar_less(l, r);
        case CmpOp::Le: return !scalar_less(r, l);
        case CmpOp::Gt: return scalar_less(r, l);
        default: return !scalar_less(l, r);
        }
    }
    case NodeKind::And:
        for (const auto& c : n->children)
            if (!eval_node(c, args)) return false;
        return true;
    case NodeKind::Or:
        for (const auto& c : n->children)
            if (eval_node(c, args)) return true;
        return false;
    default:
        return !eval_node(n->children[0], args);
    }
}

NodePtr fold_node(const NodePtr& n) {
    switch (n->kind) {
    case NodeKind::And: {
        std::vector<NodePtr> kept;
        for (const auto& c : n->children) {
            auto fc = fold_node(c);
            if (fc->kind == NodeKind::False) return leaf(NodeKind::False);
            if (fc->kind == NodeKind::True) continue;
            kept.push_back(std::move(fc));
        }
        if (kept.empty()) return leaf(NodeKind::True);
        if (kept.size() == 1) return kept[0];
        Node out;
        out.kind = NodeKind::And;
        out.children = std::move(kept);
        return make_node(std::move(out));
    }
    case NodeKind::Or: {
        std::vector<NodePtr> kept;
        for (const auto& c : n->children) {
            auto fc = fold_node(c);
            if (fc->kind == NodeKind::True) return leaf(NodeKind::True);
            if (fc->kind == NodeKind::False) continue;
            kept.push_back(std::move(fc));
        }
        if (kept.empty()) return leaf(NodeKind::False);
        if (kept.size() == 1) return kept[0];
        Node out;
        out.kind = NodeKind::Or;
        out.children = std::move(kept);
        return make_node(std::move(out));
    }
    case NodeKind::Not: {
        auto fc = fold_node(n->children[0]);
        if (fc->kind == NodeKind::True) return leaf(NodeKind::False);
        if (fc->kind == NodeKind::False) return leaf(NodeKind::True);
        if (fc->kind == NodeKind::Not) return fc->children[0];
        Node out;
        out.kind = NodeKind::Not;
        out.children = {std::move(fc)};
        return make_node(std::move(out));
    }
    default:
        return n;
    }
}

std::string operand_text(const Operand& o, std::span<const std::string> names) {
    if (const auto* ref = std::get_if<AttrRef>(&o)) {
        std::string name = ref->arg < names.size() ? names[ref->arg] : default_arg_name(ref->arg);
        return name + "." + ref->attr;
    }
    return to_text(std::get<Scalar>(o));
}

// precedence: or(0) < and(1) < not(2) < atom(3)
std::string render(const NodePtr& n, int parent_prec, std::span<const std::string> names) {
    switch (n->kind) {
    case NodeKind::True: return "true";
    case NodeKind::False: return "false";
    case NodeKind::Compare:
        return operand_text(n->lhs, names) + ' ' + std::string(cmp_op_text(n->op)) + ' ' +
               operand_text(n->rhs, names);
    case NodeKind::And:
    case NodeKind::Or: {
        const int prec = n->kind == NodeKind::And ? 1 : 0;
        const char* sep = n->kind == NodeKind::And ? " and " : " or ";
        std::string out;
        for (std::size_t i = 0; i < n->children.size(); ++i) {
            if (i) out += sep;
            out += render(n->children[i], prec + 1, names);
        }
        if (parent_prec > prec) return "(" + out + ")";
        return out;
    }
    default:
        return "not " + render(n->children[0], 3, names);
    }
}

bool scan_negated_truth(const NodePtr& n) {
    if (n->kind == NodeKind::Not && n->children[0]->kind == NodeKind::True) return true;
    for (const auto& c : n->children)
        if (scan_negated_truth(c)) return true;
    return false;
}

} // namespace

Formula Formula::constant(bool value, std::size_t arity) {
    return Formula(leaf(value ? NodeKind::True : NodeKind::False), arity);
}

Formula Formula::compare(CmpOp op, Operand lhs, Operand rhs, std::size_t arity) {
    if (std::max(max_arg(lhs), max_arg(rhs)) > arity)
        throw EvaluationError("comparison references an argument beyond the declared arity");
    return Formula(make_node(Node{NodeKind::Compare, op, std::move(lhs), std::move(rhs), {}}), arity);
}

Formula Formula::conjunction(std::vector<Formula> parts) {
    if (parts.empty()) return constant(true, 0);
    if (parts.size() == 1) return parts[0];
    Node out;
        out.kind = NodeKind::And;
    std::size_t arity = 0;
    for (auto& p : parts) {
        arity = std::max(arity, p.arity_);
        out.children.push_back(p.root_);
    }
    return Formula(make_node(std::move(out)), arity);
}

Formula Formula::disjunction(std::vector<Formula> parts) {
    if (parts.empty()) return constant(false, 0);
    if (parts.size() == 1) return parts[0];
    Node out;
        out.kind = NodeKind::Or;
    std::size_t arity = 0;
    for (auto& p : parts) {
        arity = std::max(arity, p.arity_);
        out.children.push_back(p.root_);
    }
    return Formula(make_node(std::move(out)), arity);
}

Formula Formula::negation(Formula f) {
    Node out;
        out.kind = NodeKind::Not;
    out.children = {f.root_};
    return Formula(make_node(std::move(out)), f.arity_);
}

Formula Formula::with_arity(std::size_t arity) const {
    if (min_arity(root_) > arity)
        throw EvaluationError("formula references an argument beyond the requested arity");
    return Formula(root_, arity);
}

bool Formula::is_true_const() const { return root_->kind == NodeKind::True; }
bool Formula::is_false_const() const { return root_->kind == NodeKind::False; }
bool Formula::mentions_negated_truth() const { return scan_negated_truth(root_); }

std::string Formula::text(std::span<const std::string> arg_names) const {
    return render(root_, 0, arg_names);
}

bool Formula::operator==(const Formula& other) const {
    return arity_ == other.arity_ && node_equal(root_, other.root_);
}

bool evaluate(const Formula& f, std::span<const Event* const> args) {
    if (args.size() != f.arity())
        throw EvaluationError("formula of arity " + std::to_string(f.arity()) + " applied to " +
                              std::to_string(args.size()) + " arguments");
    return eval_node(f.root(), args);
}

Formula conjoin_with_offset(const Formula& base, const Formula& appended) {
    const std::size_t offset = base.arity();
    Formula shifted = shift_args(appended, offset, offset + appended.arity());
    return Formula::conjunction({base.with_arity(offset + appended.arity()), std::move(shifted)});
}

Formula negate(const Formula& f) { return Formula::negation(f); }

Formula fold_constants(const Formula& f) {
    return Formula(fold_node(f.root()), 0).with_arity(f.arity());
}

Formula shift_args(const Formula& f, std::size_t offset, std::size_t new_arity) {
    auto mapped = map_args(f.root(), [offset](std::uint32_t a) {
        return static_cast<std::uint32_t>(a + offset);
    });
    return Formula(mapped, 0).with_arity(new_arity);
}

Formula remap_args(const Formula& f, std::span<const std::uint32_t> mapping, std::size_t new_arity) {
    auto mapped = map_args(f.root(), [&mapping](std::uint32_t a) {
        if (a >= mapping.size()) throw EvaluationError("argument remap out of range");
        return mapping[a];
    });
    return Formula(mapped, 0).with_arity(new_arity);
}

Formula MinTerm::to_formula() const {
    std::vector<Formula> parts;
    parts.reserve(conjuncts.size());
    for (const auto& c : conjuncts) {
        Formula shifted = shift_args(c.formula, c.arg_offset, total_arity);
        parts.push_back(c.negated ? Formula::negation(std::move(shifted)) : std::move(shifted));
    }
    if (parts.empty()) return Formula::truth(total_arity);
    return fold_constants(Formula::conjunction(std::move(parts)).with_arity(total_arity));
}

std::vector<MinTerm> min_terms(std::span<const std::pair<Formula, std::size_t>> formulas_with_offsets) {
    const std::size_t n = formulas_with_offsets.size();
    if (n > 20) throw Error("min-term construction over " + std::to_string(n) + " formulas would not fit");
    std::size_t total = 0;
    for (const auto& [f, offset] : formulas_with_offsets) total = std::max(total, offset + f.arity());

    std::vector<MinTerm> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << n); ++mask) {
        MinTerm mt;
        mt.total_arity = total;
        mt.conjuncts.reserve(n);
        for (std::size_t j = 0; j < n; ++j)
            mt.conjuncts.push_back(SignedFormula{formulas_with_offsets[j].first,
                                                 (mask >> j & 1) != 0,
                                                 formulas_with_offsets[j].second});
        if (mt.to_formula().is_false_const()) continue; // unsatisfiable by constant folding
        out.push_back(std::move(mt));
    }
    return out;
}

namespace detail {

namespace {

// Recursive-descent formula parser over the shared lexer. The same grammar
// serves FILTER formulas (variables collected by first occurrence) and the
// positional rendering used in automaton dumps.
class FormulaParser {
public:
    FormulaParser(Lexer& lex, bool positional, std::size_t positional_arity)
        : lex_(lex), positional_(positional), positional_arity_(positional_arity) {}

    Formula parse() {
        Formula f = parse_or();
        const std::size_t arity = positional_ ? positional_arity_ : vars_.size();
        return f.with_arity(arity);
    }

    std::vector<std::string> vars() && { return std::move(vars_); }

private:
    static bool reserved(const std::string& word) {
        return word == "and" || word == "or" || word == "not" || word == "true" || word == "false" ||
               word == "AS" || word == "FILTER" || word == "OR" || word == "WINDOW";
    }

    std::uint32_t resolve_var(const std::string& name) {
        if (positional_) {
            for (std::size_t i = 0; i < positional_arity_; ++i)
                if (name == default_arg_name(i)) return static_cast<std::uint32_t>(i);
            lex_.fail("unknown positional argument '" + name + "'");
        }
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i] == name) return static_cast<std::uint32_t>(i);
        vars_.push_back(name);
        return static_cast<std::uint32_t>(vars_.size() - 1);
    }

    Formula parse_or() {
        std::vector<Formula> parts{parse_and()};
        while (lex_.at_ident("or")) {
            lex_.next();
            parts.push_back(parse_and());
        }
        return Formula::disjunction(std::move(parts));
    }

    Formula parse_and() {
        std::vector<Formula> parts{parse_unary()};
        while (lex_.at_ident("and")) {
            lex_.next();
            parts.push_back(parse_unary());
        }
        return Formula::conjunction(std::move(parts));
    }

    Formula parse_unary() {
        if (lex_.at_ident("not")) {
            lex_.next();
            return Formula::negation(parse_unary());
        }
        return parse_atom();
    }

    Formula parse_atom() {
        const auto& tok = lex_.peek();
        if (tok.kind == Token::Kind::LParen) {
            lex_.next();
            Formula inner = parse_or();
            if (lex_.peek().kind != Token::Kind::RParen) lex_.fail("expected ')' in formula");
            lex_.next();
            return inner;
        }
        if (tok.kind == Token::Kind::Ident && tok.text == "true") {
            lex_.next();
            return Formula::truth(0);
        }
        if (tok.kind == Token::Kind::Ident && tok.text == "false") {
            lex_.next();
            return Formula::constant(false, 0);
        }
        Operand lhs = parse_operand();
        if (lex_.peek().kind != Token::Kind::Cmp) lex_.fail("expected comparison operator");
        CmpOp op = lex_.next().cmp;
        Operand rhs = parse_operand();
        std::size_t arity = std::max(max_arg(lhs), max_arg(rhs));
        return Formula::compare(op, std::move(lhs), std::move(rhs), arity);
    }

    Operand parse_operand() {
        const auto& tok = lex_.peek();
        if (tok.kind == Token::Kind::Minus) {
            lex_.next();
            const auto& num = lex_.peek();
            if (num.kind == Token::Kind::Int) return Scalar(-lex_.next().int_value);
            if (num.kind == Token::Kind::Real) return Scalar(-lex_.next().real_value);
            lex_.fail("expected number after '-'");
        }
        if (tok.kind == Token::Kind::Int) return Scalar(lex_.next().int_value);
        if (tok.kind == Token::Kind::Real) return Scalar(lex_.next().real_value);
        if (tok.kind == Token::Kind::Ident) {
            if (reserved(tok.text)) lex_.fail("reserved word '" + tok.text + "' cannot be an operand");
            Token name = lex_.next();
            if (lex_.peek().kind == Token::Kind::Dot) {
                lex_.next();
                if (lex_.peek().kind != Token::Kind::Ident) lex_.fail("expected attribute name after '.'");
                Token attr = lex_.next();
                return AttrRef{resolve_var(name.text), attr.text};
            }
            return Scalar(name.text); // bare symbol literal
        }
        lex_.fail("expected operand");
    }

    Lexer& lex_;
    bool positional_;
    std::size_t positional_arity_;
    std::vector<std::string> vars_;
};

} // namespace

ParsedFilter parse_filter_formula(Lexer& lex) {
    FormulaParser parser(lex, false, 0);
    Formula f = parser.parse();
    return ParsedFilter{std::move(f), std::move(parser).vars()};
}

} // namespace detail

ParsedFilter parse_filter_formula(std::string_view text) {
    detail::Lexer lex(text);
    auto parsed = detail::parse_filter_formula(lex);
    if (lex.peek().kind != detail::Token::Kind::End) lex.fail("trailing input after formula");
    return parsed;
}

Formula parse_positional_formula(std::string_view text, std::size_t arity) {
    detail::Lexer lex(text);
    detail::FormulaParser parser(lex, true, arity);
    Formula f = parser.parse();
    if (lex.peek().kind != detail::Token::Kind::End) lex.fail("trailing input after formula");
    return f;
}

} // namespace regcep
