#include <doctest.h>

#include <random>

#include "regcep/errors.hpp"
#include "regcep/formula.hpp"
#include "test_util.hpp"

using namespace regcep;
using namespace regcep::testutil;

namespace {

bool eval2(const Formula& f, const Event& a, const Event& b) {
    const Event* args[] = {&a, &b};
    return evaluate(f, args);
}

bool eval1(const Formula& f, const Event& a) {
    const Event* args[] = {&a};
    return evaluate(f, args);
}

// f'(z, w) := z.type = H and z.id = w.id
Formula h_same_id() {
    return Formula::conjunction(
        {Formula::compare(CmpOp::Eq, AttrRef{0, "type"}, Scalar(std::string("H")), 2),
         Formula::compare(CmpOp::Eq, AttrRef{0, "id"}, AttrRef{1, "id"}, 2)});
}

std::vector<Event> sample_events() {
    std::vector<Event> out;
    for (const char* type : {"T", "H"})
        for (std::int64_t id : {1, 2})
            for (double value : {10.0, 20.0, 30.0}) out.push_back(ev(type, id, value));
    return out;
}

} // namespace

TEST_SUITE("formula") {

TEST_CASE("evaluate on the example tuples") {
    Stream s = table1();
    Formula f = h_same_id();
    CHECK(eval2(f, s[3], s[1]));   // (H,1,70) vs (T,1,24)
    CHECK(!eval2(f, s[3], s[2]));  // ids 1 vs 2
    CHECK(eval1(Formula::truth(1), s[0]));
}

TEST_CASE("evaluate error paths") {
    Stream s = table1();
    Formula ordered_symbols =
        Formula::compare(CmpOp::Lt, AttrRef{0, "type"}, Scalar(std::string("T")), 1);
    CHECK_THROWS_AS(eval1(ordered_symbols, s[0]), EvaluationError);
    Formula missing = Formula::compare(CmpOp::Eq, AttrRef{0, "nope"}, Scalar(std::int64_t(1)), 1);
    CHECK_THROWS_AS(eval1(missing, s[0]), EvaluationError);
    CHECK_THROWS_AS(evaluate(h_same_id(), std::vector<const Event*>{}), EvaluationError);
}

TEST_CASE("conjoin_with_offset concatenates argument blocks") {
    Formula base = Formula::compare(CmpOp::Eq, AttrRef{0, "type"}, Scalar(std::string("T")), 1);
    Formula appended = Formula::compare(CmpOp::Eq, AttrRef{0, "id"}, AttrRef{1, "id"}, 2);
    Formula joined = conjoin_with_offset(base, appended);
    REQUIRE(joined.arity() == 3);

    for (const auto& a : sample_events())
        for (const auto& b : sample_events())
            for (const auto& c : sample_events()) {
                const Event* args[] = {&a, &b, &c};
                const Event* base_args[] = {&a};
                const Event* app_args[] = {&b, &c};
                CHECK(evaluate(joined, args) ==
                      (evaluate(base, base_args) && evaluate(appended, app_args)));
            }
}

TEST_CASE("conjoin with TRUE is the identity on the base block") {
    Formula f = Formula::compare(CmpOp::Ge, AttrRef{0, "value"}, Scalar(20.0), 1);
    Formula with_true = conjoin_with_offset(f, Formula::truth(1));
    REQUIRE(with_true.arity() == 2);
    for (const auto& a : sample_events())
        for (const auto& b : sample_events()) {
            CHECK(eval2(with_true, a, b) == eval1(f, a));
        }
    Formula both_true = conjoin_with_offset(Formula::truth(1), Formula::truth(1));
    REQUIRE(both_true.arity() == 2);
    CHECK(eval2(both_true, sample_events()[0], sample_events()[1]));
}

TEST_CASE("negate") {
    CHECK(fold_constants(negate(Formula::truth(1))).is_false_const());
    Formula id_is_1 = Formula::compare(CmpOp::Eq, AttrRef{0, "id"}, Scalar(std::int64_t(1)), 1);
    CHECK(!eval1(negate(id_is_1), ev("T", 1, 5)));
    CHECK(eval1(negate(id_is_1), ev("T", 2, 5)));
    for (const auto& e : sample_events())
        CHECK(eval1(negate(negate(id_is_1)), e) == eval1(id_is_1, e));
}

TEST_CASE("fold_constants") {
    Formula f = Formula::compare(CmpOp::Eq, AttrRef{0, "id"}, Scalar(std::int64_t(1)), 1);

    Formula f_and_not_true = Formula::conjunction({f, Formula::negation(Formula::truth(1))});
    CHECK(fold_constants(f_and_not_true).is_false_const());

    Formula f_and_true = Formula::conjunction({f, Formula::truth(1)});
    CHECK(fold_constants(f_and_true) == f);

    Formula or_false = Formula::disjunction({Formula::constant(false, 1), Formula::constant(false, 1)});
    CHECK(fold_constants(or_false).is_false_const());

    // semantics preserved on a nested sample
    Formula nested = Formula::disjunction(
        {Formula::conjunction({f, Formula::truth(1)}),
         Formula::negation(Formula::conjunction({Formula::truth(1), Formula::negation(f)}))});
    Formula folded = fold_constants(nested);
    for (const auto& e : sample_events()) CHECK(eval1(folded, e) == eval1(nested, e));
}

TEST_CASE("min_terms counts and pruning") {
    Formula f = Formula::compare(CmpOp::Eq, AttrRef{0, "type"}, Scalar(std::string("T")), 1);

    SUBCASE("TRUE and f: the two assignments negating TRUE are dropped") {
        std::vector<std::pair<Formula, std::size_t>> input{{Formula::truth(1), 0}, {f, 1}};
        auto mts = min_terms(input);
        REQUIRE(mts.size() == 2);
        CHECK(!mts[0].conjuncts[1].negated);
        CHECK(mts[1].conjuncts[1].negated);
        for (auto& mt : mts) CHECK(!mt.conjuncts[0].negated); // TRUE never negated in kept terms
    }
    SUBCASE("empty input yields the vacuous min-term") {
        auto mts = min_terms(std::vector<std::pair<Formula, std::size_t>>{});
        REQUIRE(mts.size() == 1);
        CHECK(mts[0].to_formula().is_true_const());
    }
    SUBCASE("single formula yields positive and negative") {
        std::vector<std::pair<Formula, std::size_t>> input{{f, 0}};
        auto mts = min_terms(input);
        REQUIRE(mts.size() == 2);
        CHECK(!mts[0].conjuncts[0].negated);
        CHECK(mts[1].conjuncts[0].negated);
    }
}

TEST_CASE("min_terms are mutually exclusive and pre-drop exhaustive") {
    // three formulas over a two-event argument tuple
    std::vector<std::pair<Formula, std::size_t>> input{
        {Formula::compare(CmpOp::Eq, AttrRef{0, "type"}, Scalar(std::string("T")), 1), 0},
        {Formula::compare(CmpOp::Eq, AttrRef{0, "id"}, AttrRef{1, "id"}, 2), 1},
        {Formula::truth(1), 3}};
    auto kept = min_terms(input);

    auto events = sample_events();
    std::mt19937 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<const Event*> args;
        for (int k = 0; k < 4; ++k) args.push_back(&events[rng() % events.size()]);

        int applicable = 0;
        for (const auto& mt : kept)
            if (evaluate(mt.to_formula(), args)) ++applicable;
        CHECK(applicable <= 1);

        // pre-drop exhaustiveness: the satisfied sign assignment always exists
        int total = 0;
        for (std::uint64_t mask = 0; mask < 8; ++mask) {
            bool sat = true;
            for (std::size_t j = 0; j < input.size() && sat; ++j) {
                Formula shifted = shift_args(input[j].first, input[j].second, 4);
                bool value = evaluate(shifted, args);
                if (((mask >> j) & 1) != 0) value = !value;
                sat = value;
            }
            if (sat) ++total;
        }
        CHECK(total == 1);
    }
}

TEST_CASE("filter formula parsing collects variables in first-occurrence order") {
    auto parsed = parse_filter_formula("x.id = y.id");
    CHECK(parsed.arg_vars == std::vector<std::string>{"x", "y"});
    CHECK(parsed.formula.arity() == 2);
    Stream s = table1();
    CHECK(eval2(parsed.formula, s[0], s[1]));  // ids 1,1
    CHECK(!eval2(parsed.formula, s[0], s[2])); // ids 1,2

    auto complex = parse_filter_formula("y.value < -40 or not (y.type = H and y.id != 2)");
    CHECK(complex.arg_vars == std::vector<std::string>{"y"});
    CHECK(complex.formula.arity() == 1);
}

TEST_CASE("positional formula parsing matches rendered text") {
    Formula f = h_same_id();
    Formula reparsed = parse_positional_formula(f.text(), 2);
    CHECK(reparsed == f);

    CHECK(parse_positional_formula("true", 1).is_true_const());
    CHECK_THROWS_AS(parse_positional_formula("q.id = 1", 1), ParseError);
    CHECK_THROWS_AS(parse_positional_formula("w.id = 1", 1), ParseError); // w is arity 2+
}

TEST_CASE("rendering round-trips through the parser on random formulas") {
    Gen gen(11);
    for (int trial = 0; trial < 100; ++trial) {
        Formula f = gen.atom(0, 2);
        if (gen.pick(2)) f = Formula::conjunction({f, gen.binary_atom(2)});
        if (gen.pick(3) == 0) f = Formula::negation(f);
        if (gen.pick(3) == 0) f = Formula::disjunction({f, gen.atom(1, 2)});
        Formula reparsed = parse_positional_formula(f.text(), 2);
        auto events = sample_events();
        for (const auto& a : events)
            for (const auto& b : events) CHECK(eval2(reparsed, a, b) == eval2(f, a, b));
    }
}

} // TEST_SUITE
