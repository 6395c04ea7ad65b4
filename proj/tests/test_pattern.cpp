#include <doctest.h>

#include <functional>

#include "regcep/errors.hpp"
#include "regcep/pattern.hpp"
#include "test_util.hpp"

using namespace regcep;
using namespace regcep::testutil;

namespace {

const char* kFiltered = "(T AS x) ; (H AS y) FILTER x.id = y.id";
const char* kUnbounded = "(T AS x FILTER x.id = y.id)+ ; (H AS y)";
const char* kNestedKleene =
    "((T AS x1 ; T AS x2 FILTER x1.value = x2.value) ; "
    "(H AS x3 ; H AS x4 FILTER x3.value = x4.value)+)+";

PatternPtr body(std::string_view text) { return std::get<PatternPtr>(parse_pattern(text)); }

} // namespace

TEST_SUITE("pattern") {

TEST_CASE("filtered sequence parses with the filter over the whole chain") {
    PatternPtr p = body(kFiltered);
    const auto* filter = std::get_if<FilterPattern>(&p->node);
    REQUIRE(filter);
    CHECK(filter->filter.arg_vars == std::vector<std::string>{"x", "y"});
    CHECK(filter->filter.formula.arity() == 2);
    const auto* seq = std::get_if<SeqPattern>(&filter->child->node);
    REQUIRE(seq);
    const auto* left = std::get_if<BasePattern>(&seq->left->node);
    const auto* right = std::get_if<BasePattern>(&seq->right->node);
    REQUIRE(left);
    REQUIRE(right);
    CHECK(left->relation == "T");
    CHECK(left->var == "x");
    CHECK(right->relation == "H");
    CHECK(right->var == "y");
}

TEST_CASE("base pattern and nested Kleene parse") {
    PatternPtr base = body("T AS x");
    const auto* as = std::get_if<BasePattern>(&base->node);
    REQUIRE(as);
    CHECK(as->relation == "T");
    CHECK(as->var == "x");

    PatternPtr nested = body(kNestedKleene);
    const auto* outer = std::get_if<IterPattern>(&nested->node);
    REQUIRE(outer);
    const auto* seq = std::get_if<SeqPattern>(&outer->child->node);
    REQUIRE(seq);
    CHECK(std::get_if<IterPattern>(&seq->right->node));
}

TEST_CASE("filter binds tighter than OR and looser than ';'") {
    PatternPtr p = body("T AS x FILTER x.value < -40 OR T AS y FILTER y.value > 50");
    const auto* disj = std::get_if<OrPattern>(&p->node);
    REQUIRE(disj);
    CHECK(std::get_if<FilterPattern>(&disj->left->node));
    CHECK(std::get_if<FilterPattern>(&disj->right->node));

    PatternPtr q = body("T AS a ; H AS b FILTER a.id = b.id ; T AS c");
    const auto* seq = std::get_if<SeqPattern>(&q->node);
    REQUIRE(seq);
    CHECK(std::get_if<FilterPattern>(&seq->left->node));
}

TEST_CASE("WINDOW at top level only, positive") {
    auto parsed = parse_pattern("(T AS x) ; (H AS y) WINDOW 3");
    const auto* w = std::get_if<WindowedPattern>(&parsed);
    REQUIRE(w);
    CHECK(w->window == 3);
    CHECK_THROWS_AS(parse_pattern("(T AS x WINDOW 2) ; (H AS y)"), ParseError);
    CHECK_THROWS_AS(parse_pattern("T AS x WINDOW 0"), ParseError);
}

TEST_CASE("syntax errors carry an offset") {
    try {
        parse_pattern("T AS ; H AS y");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset == 5);
    }
    CHECK_THROWS_AS(parse_pattern("(T AS x"), ParseError);
    CHECK_THROWS_AS(parse_pattern("T AS x extra"), ParseError);
}

TEST_CASE("vars") {
    CHECK(vars(*body(kFiltered)) == std::set<std::string>{"x", "y"});
    CHECK(vars(*body("T AS x")) == std::set<std::string>{"x"});
    CHECK(vars(*body("(T AS x) OR (T AS x)")) == std::set<std::string>{"x"});
}

TEST_CASE("bound_vars") {
    CHECK(bound_vars(*body("(T AS x) ; (H AS y)")) == std::set<std::string>{"x", "y"});
    CHECK(bound_vars(*body("(T AS x)+")).empty());
    CHECK(bound_vars(*body("(T AS x) OR (H AS y)")).empty());
    CHECK(bound_vars(*body("(T AS x) OR (H AS x)")) == std::set<std::string>{"x"});
}

TEST_CASE("check_bounded") {
    CHECK(check_bounded(*body(kFiltered)).empty());
    CHECK(check_bounded(*body(kNestedKleene)).empty());

    auto diags = check_bounded(*body(kUnbounded));
    REQUIRE(!diags.empty());
    bool mentions_y = false;
    for (const auto& d : diags)
        if (d.message.find("'y'") != std::string::npos) mentions_y = true;
    CHECK(mentions_y);

    // variables may not span sequence operands
    CHECK(!check_bounded(*body("(T AS x) ; (H AS x)")).empty());
    // duplicate declarations are fine across OR branches only
    CHECK(check_bounded(*body("(T AS x) OR (H AS x)")).empty());
}

TEST_CASE("bound is a subset of vars on random patterns") {
    Gen gen(23);
    for (int trial = 0; trial < 200; ++trial) {
        PatternPtr p = gen.random_bounded_pattern(4);
        auto b = bound_vars(*p);
        auto v = vars(*p);
        for (const auto& name : b) CHECK(v.count(name));
        CHECK(check_bounded(*p).empty());
    }
}

TEST_CASE("boundedness is monotone over sub-patterns") {
    Gen gen(29);
    std::function<void(const Pattern&)> verify = [&](const Pattern& p) {
        CHECK(check_bounded(p).empty());
        if (const auto* f = std::get_if<FilterPattern>(&p.node)) verify(*f->child);
        if (const auto* o = std::get_if<OrPattern>(&p.node)) {
            verify(*o->left);
            verify(*o->right);
        }
        if (const auto* s = std::get_if<SeqPattern>(&p.node)) {
            verify(*s->left);
            verify(*s->right);
        }
        if (const auto* i = std::get_if<IterPattern>(&p.node)) verify(*i->child);
    };
    for (int trial = 0; trial < 50; ++trial) verify(*gen.random_bounded_pattern(4));
}

TEST_CASE("pretty-printing round-trips") {
    for (const char* text : {kFiltered, kUnbounded, kNestedKleene, "T AS x",
                             "((T AS a ; H AS b) FILTER a.id = b.id) OR (T AS c)"}) {
        ParsedPattern first = parse_pattern(text);
        std::string printed = pattern_text(first);
        ParsedPattern second = parse_pattern(printed);
        CHECK(pattern_text(second) == printed);
    }

    Gen gen(31);
    for (int trial = 0; trial < 200; ++trial) {
        PatternPtr p = gen.random_bounded_pattern(4);
        std::string printed = pattern_text(*p);
        ParsedPattern reparsed = parse_pattern(printed);
        CHECK(pattern_text(reparsed) == printed);
    }

    auto windowed = parse_pattern("(T AS x) ; (H AS y) WINDOW 3");
    CHECK(pattern_text(windowed) == pattern_text(parse_pattern(pattern_text(windowed))));
}

} // TEST_SUITE
