#ifndef REGCEP_FORMULA_HPP
#define REGCEP_FORMULA_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "regcep/events.hpp"
#include "regcep/scalar.hpp"

namespace regcep {

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

std::string_view cmp_op_text(CmpOp op);

// Reference to an attribute of the i-th formula argument.
struct AttrRef {
    std::uint32_t arg;
    std::string attr;
    bool operator==(const AttrRef&) const = default;
};

using Operand = std::variant<AttrRef, Scalar>;

// Immutable n-ary boolean predicate over positional event arguments.
// Nodes are shared, so copies are cheap.
class Formula {
public:
    enum class NodeKind { True, False, Compare, And, Or, Not };

    struct Node;
    using NodePtr = std::shared_ptr<const Node>;

    struct Node {
        NodeKind kind = NodeKind::True;
        CmpOp op = CmpOp::Eq;        // Compare only
        Operand lhs = Scalar(std::int64_t(0));
        Operand rhs = Scalar(std::int64_t(0));
        std::vector<NodePtr> children; // And/Or (>=2), Not (1)
    };

    static Formula constant(bool value, std::size_t arity = 1);
    static Formula truth(std::size_t arity = 1) { return constant(true, arity); }
    static Formula compare(CmpOp op, Operand lhs, Operand rhs, std::size_t arity);
    static Formula conjunction(std::vector<Formula> parts); // arity = max of parts
    static Formula disjunction(std::vector<Formula> parts);
    static Formula negation(Formula f);

    std::size_t arity() const { return arity_; }
    Formula with_arity(std::size_t arity) const;

    bool is_true_const() const;
    bool is_false_const() const;
    // Whether any node is Not(True); used to detect unsimplified min-terms.
    bool mentions_negated_truth() const;

    const NodePtr& root() const { return root_; }

    // Rendering uses arg_names positionally; missing names fall back to the
    // default positional scheme (z, w, u, v, a4, ...).
    std::string text(std::span<const std::string> arg_names = {}) const;

    bool operator==(const Formula& other) const;

private:
    Formula(NodePtr root, std::size_t arity) : root_(std::move(root)), arity_(arity) {}

    friend Formula fold_constants(const Formula&);
    friend Formula shift_args(const Formula&, std::size_t, std::size_t);
    friend Formula remap_args(const Formula&, std::span<const std::uint32_t>, std::size_t);

    NodePtr root_;
    std::size_t arity_ = 1;
};

std::string default_arg_name(std::size_t index);

// Standard boolean evaluation; |args| must equal the formula arity.
bool evaluate(const Formula& f, std::span<const Event* const> args);

// Appended formula's arguments are renumbered to follow the base block:
// result(a0..ak-1, b0..bm-1) == base(a...) && appended(b...).
Formula conjoin_with_offset(const Formula& base, const Formula& appended);

Formula negate(const Formula& f);

// Semantics-preserving TRUE/FALSE simplification.
Formula fold_constants(const Formula& f);

// Rebuild with every argument index shifted by `offset`.
Formula shift_args(const Formula& f, std::size_t offset, std::size_t new_arity);

// Rebuild with argument index i replaced by mapping[i].
Formula remap_args(const Formula& f, std::span<const std::uint32_t> mapping, std::size_t new_arity);

// One conjunct of a min-term: a source formula in positive or negated form,
// its argument block placed at arg_offset in the combined argument tuple.
struct SignedFormula {
    Formula formula;
    bool negated;
    std::size_t arg_offset;
};

struct MinTerm {
    std::vector<SignedFormula> conjuncts;
    std::size_t total_arity = 0;

    // Folded conjunction of the signed, shifted conjuncts.
    Formula to_formula() const;
};

// All satisfiable-looking sign assignments over the given formulas; offsets
// must be the cumulative arities. Assignments whose folded conjunction is
// constant FALSE are dropped. 2^n pre-drop min-terms, in sign-mask order
// (bit j set = formula j negated).
std::vector<MinTerm> min_terms(std::span<const std::pair<Formula, std::size_t>> formulas_with_offsets);

// Textual formula parsing. Filter form collects variable names in order of
// first occurrence; positional form resolves the default argument names.
struct ParsedFilter {
    Formula formula;
    std::vector<std::string> arg_vars;
};

ParsedFilter parse_filter_formula(std::string_view text);
Formula parse_positional_formula(std::string_view text, std::size_t arity);

} // namespace regcep

#endif
