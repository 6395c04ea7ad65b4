#include <doctest.h>

#include <algorithm>

#include "regcep/compile.hpp"
#include "regcep/errors.hpp"
#include "regcep/oracle.hpp"
#include "test_util.hpp"

using namespace regcep;
using namespace regcep::testutil;

namespace {

PatternPtr body(std::string_view text) { return std::get<PatternPtr>(parse_pattern(text)); }

const char* kFiltered = "(T AS x) ; (H AS y) FILTER x.id = y.id";
const char* kDisjunctive =
    "(T AS x FILTER x.value < -40 OR T AS x FILTER x.value > 50) ; (T AS y) FILTER y.id = x.id";

std::size_t guarded_count(const RegisterAutomaton& a) {
    return static_cast<std::size_t>(
        std::count_if(a.transitions.begin(), a.transitions.end(),
                      [](const Transition& t) { return !t.is_epsilon(); }));
}

std::size_t epsilon_count(const RegisterAutomaton& a) {
    return a.transitions.size() - guarded_count(a);
}

} // namespace

TEST_SUITE("compile") {

TEST_CASE("filtered sequence compiles to the known three-state machine") {
    CompileArtifacts art = compile(*body(kFiltered));
    RegisterAutomaton flat = eliminate_epsilon(art.automaton);

    CHECK(flat.states.size() == 3);
    CHECK(flat.registers.size() == 1);
    REQUIRE(flat.transitions.size() == 4);

    const StateId start = flat.single_start();
    const RegisterId reg = *flat.registers.begin();

    std::size_t self_loops = 0, writes = 0, binary = 0;
    for (const auto& t : flat.transitions) {
        REQUIRE(!t.is_epsilon());
        const auto& g = *t.guard;
        if (t.source == t.target) {
            ++self_loops;
            CHECK(g.formula.is_true_const());
            CHECK(g.output == Output::Skip);
        }
        if (!g.writes.empty()) {
            ++writes;
            CHECK(g.writes == std::vector<RegisterId>{reg});
            CHECK(t.source == start);
            CHECK(g.output == Output::Mark);
            CHECK(g.formula.arity() == 1);
        }
        if (g.selection.size() == 2) {
            ++binary;
            CHECK(g.selection[0].is_current());
            CHECK(g.selection[1] == RegRef::reg(reg));
            CHECK(g.output == Output::Mark);
            CHECK(flat.final_states.count(t.target));
        }
    }
    CHECK(self_loops == 2);
    CHECK(writes == 1);
    CHECK(binary == 1);
}

TEST_CASE("base pattern compiles to two states and no registers") {
    CompileArtifacts art = compile(*body("T AS x"));
    const auto& a = art.automaton;
    CHECK(a.states.size() == 2);
    CHECK(a.registers.empty());
    REQUIRE(a.transitions.size() == 2);
    CHECK(run_stream(a, table1().prefix(3)).all() == oracle::all_matches(*body("T AS x"), table1().prefix(3)));
}

TEST_CASE("compile_base fuses the relation test with a unary filter") {
    Formula cold = Formula::compare(CmpOp::Lt, AttrRef{0, "value"}, Scalar(-40.0), 1);
    CompileArtifacts art = compile_base("T", "x", cold);

    const auto& a = art.automaton;
    REQUIRE(a.transitions.size() == 2);
    const auto& guard = *a.transitions[1].guard;
    CHECK(guard.output == Output::Mark);
    CHECK(guard.formula.arity() == 1);
    CHECK(art.transition_var.at(1) == "x");

    Event freezing = ev("T", 1, -50);
    Event warm = ev("T", 1, 10);
    Event humid = ev("H", 1, -50);
    const Event* f[] = {&freezing};
    const Event* w[] = {&warm};
    const Event* h[] = {&humid};
    CHECK(evaluate(guard.formula, f));
    CHECK(!evaluate(guard.formula, w));
    CHECK(!evaluate(guard.formula, h));

    CompileArtifacts plain = compile_base("H", "y", std::nullopt);
    const Event* args[] = {&humid};
    CHECK(evaluate(plain.automaton.transitions[1].guard->formula, args));
}

TEST_CASE("compile_or joins operands with four fresh epsilon transitions") {
    CompileArtifacts left = compile_base("T", "x", std::nullopt);
    CompileArtifacts right = compile_base("H", "y", std::nullopt);
    CompileArtifacts joined = compile_or(std::move(left), std::move(right));

    CHECK(epsilon_count(joined.automaton) == 4);
    CHECK(joined.automaton.states.size() == 6);
    CHECK(joined.automaton.start_states.size() == 1);
    CHECK(joined.automaton.final_states.size() == 1);
}

TEST_CASE("or compiles to the union of operand matches") {
    Gen gen(61);
    for (int trial = 0; trial < 25; ++trial) {
        PatternPtr l = gen.random_bounded_pattern(2);
        PatternPtr r = gen.random_bounded_pattern(2);
        Pattern both{OrPattern{l, r}};
        Stream s = gen.random_stream(6);
        auto engine = run_stream(compile(both).automaton, s).all();
        auto expect = oracle::all_matches(*l, s);
        auto right = oracle::all_matches(*r, s);
        expect.insert(right.begin(), right.end());
        CHECK(engine == expect);
    }
}

TEST_CASE("seq concatenates with strictly increasing segments") {
    Gen gen(67);
    for (int trial = 0; trial < 25; ++trial) {
        PatternPtr l = gen.random_bounded_pattern(2);
        PatternPtr r = gen.random_bounded_pattern(2);
        Pattern both{SeqPattern{l, r}};
        if (!check_bounded(both).empty()) continue; // fresh vars make this unreachable
        Stream s = gen.random_stream(6);
        auto engine = run_stream(compile(both).automaton, s).all();

        std::set<Match> expect;
        for (const auto& ml : oracle::all_matches(*l, s))
            for (const auto& mr : oracle::all_matches(*r, s))
                if (mr.front() > ml.back()) {
                    Match joined = ml;
                    joined.insert(joined.end(), mr.begin(), mr.end());
                    expect.insert(joined);
                }
        CHECK(engine == expect);

        // two-term sequences always consume at least two events
        for (const auto& m : engine) CHECK(m.size() >= 2);
    }
}

TEST_CASE("seq adds no states, iter adds one epsilon per final") {
    CompileArtifacts l = compile_base("T", "x", std::nullopt);
    CompileArtifacts r = compile_base("H", "y", std::nullopt);
    const std::size_t before = l.automaton.states.size() + r.automaton.states.size();
    CompileArtifacts seq = compile_seq(std::move(l), std::move(r));
    CHECK(seq.automaton.states.size() == before);
    CHECK(epsilon_count(seq.automaton) == 1);

    const std::size_t eps_before = epsilon_count(seq.automaton);
    CompileArtifacts iter = compile_iter(std::move(seq));
    CHECK(epsilon_count(iter.automaton) == eps_before + iter.automaton.final_states.size());
}

TEST_CASE("iteration accepts one or more repetitions") {
    PatternPtr p = body("(T AS x)+");
    Stream s = stream_of({ev("T", 1, 1), ev("H", 1, 2), ev("T", 2, 3)});
    auto engine = run_stream(compile(*p).automaton, s).all();
    CHECK(engine == oracle::all_matches(*p, s));
    CHECK(engine.count(match_of({0, 2})));

    // single-iteration behavior matches the child when only one fits
    Stream one = stream_of({ev("T", 1, 1)});
    CHECK(run_stream(compile(*p).automaton, one).all() ==
          run_stream(compile(*body("T AS x")).automaton, one).all());
}

TEST_CASE("nested Kleene pattern compiles and runs") {
    const char* nested =
        "((T AS x1 ; T AS x2 FILTER x1.value = x2.value) ; "
        "(H AS x3 ; H AS x4 FILTER x3.value = x4.value)+)+";
    PatternPtr p = body(nested);
    CompileArtifacts art = compile(*p);
    Stream s = stream_of({ev("T", 1, 5), ev("T", 2, 5), ev("H", 1, 7), ev("H", 2, 7)});
    CHECK(run_stream(art.automaton, s).all() == oracle::all_matches(*p, s));
}

TEST_CASE("unbounded patterns are rejected") {
    CHECK_THROWS_AS(compile(*body("(T AS x FILTER x.id = y.id)+ ; (H AS y)")), NotBoundedError);
}

TEST_CASE("the disjunctive example shares one register across branches") {
    CompileArtifacts art = compile(*body(kDisjunctive));
    const auto& a = art.automaton;

    REQUIRE(a.registers.size() == 1);
    const RegisterId reg = *a.registers.begin();
    CHECK(art.register_var.at(reg) == "x");

    // both branch transitions write the shared register
    std::vector<const Transition*> writers;
    for (const auto& t : a.transitions)
        if (t.guard && !t.guard->writes.empty()) writers.push_back(&t);
    REQUIRE(writers.size() == 2);
    for (const auto* t : writers) {
        CHECK(t->guard->writes == std::vector<RegisterId>{reg});
        CHECK(art.transition_var.at(static_cast<std::size_t>(t - a.transitions.data())) == "x");
    }

    // exactly one transition gained the binary conjoined formula
    std::vector<const Transition*> binary;
    for (const auto& t : a.transitions)
        if (t.guard && t.guard->selection.size() == 2) binary.push_back(&t);
    REQUIRE(binary.size() == 1);
    const auto& g = *binary.front()->guard;
    CHECK(g.selection[0].is_current());
    CHECK(g.selection[1] == RegRef::reg(reg));
    CHECK(g.output == Output::Mark);

    // f(z, w) := z.type = T and z.id = w.id
    Event t_match = ev("T", 1, 60);
    Event t_other = ev("T", 2, 60);
    Event stored = ev("T", 1, -50);
    const Event* yes[] = {&t_match, &stored};
    const Event* no[] = {&t_other, &stored};
    CHECK(evaluate(g.formula, yes));
    CHECK(!evaluate(g.formula, no));
}

TEST_CASE("unary filters degenerate to conjunction on the variable's transition") {
    CompileArtifacts art = compile(*body("T AS x FILTER x.value < 25"));
    const auto& a = art.automaton;
    CHECK(a.registers.empty());
    REQUIRE(a.transitions.size() == 2);
    const auto& g = *a.transitions[1].guard;
    CHECK(g.selection.size() == 1);
    CHECK(g.selection[0].is_current());

    Stream s = table1().prefix(3); // values 22, 24, 32
    CHECK(run_stream(a, s).all() == std::set<Match>{{0}, {1}});
}

TEST_CASE("create_new_selection reuses existing registers") {
    CompileArtifacts art = compile(*body(kDisjunctive));
    // find the y transition: the one the filter extended
    std::size_t yi = art.automaton.transitions.size();
    for (const auto& [ti, var] : art.transition_var)
        if (var == "y") yi = ti;
    REQUIRE(yi < art.automaton.transitions.size());

    const std::size_t regs_before = art.automaton.registers.size();
    NewSelection ns = create_new_selection(art, yi, std::vector<std::string>{"y", "x"});
    CHECK(ns.selection.size() == 2);
    CHECK(ns.selection[0].is_current());             // y is the transition's own variable
    CHECK(!ns.selection[1].is_current());            // x already has its register
    CHECK(ns.new_registers.empty());
    CHECK(art.automaton.registers.size() == regs_before);
}

TEST_CASE("a filter with no eligible transition is an error") {
    CompileArtifacts art = compile_base("T", "x", std::nullopt);
    Formula f = Formula::compare(CmpOp::Eq, AttrRef{0, "id"}, Scalar(std::int64_t(1)), 1);
    CHECK_THROWS_AS(apply_nary_filter(art, f, std::vector<std::string>{"q"}),
                    NoEligibleTransitionError);
}

TEST_CASE("structural properties of compiled automata") {
    Gen gen(71);
    for (int trial = 0; trial < 60; ++trial) {
        PatternPtr p = gen.random_bounded_pattern(4);
        CompileArtifacts art = compile(*p);
        const auto& a = art.automaton;

        a.validate();
        CHECK(validate_register_coverage(a).empty());
        CHECK(a.start_states.size() == 1);

        // transitions out of the start never reference registers
        for (const auto& t : a.transitions)
            if (t.guard && a.start_states.count(t.source))
                for (const auto& sel : t.guard->selection) CHECK(sel.is_current());

        // transitions of one variable share one write register, or none
        std::map<std::string, std::set<std::vector<RegisterId>>> write_sets;
        for (const auto& [ti, var] : art.transition_var)
            write_sets[var].insert(a.transitions[ti].guard->writes);
        for (const auto& [var, sets] : write_sets) {
            CHECK(sets.size() == 1); // identical across the variable's transitions
            auto registered = std::find_if(art.register_var.begin(), art.register_var.end(),
                                           [&](const auto& kv) { return kv.second == var; });
            if (registered == art.register_var.end())
                CHECK(sets.begin()->empty());
            else
                CHECK(*sets.begin() == std::vector<RegisterId>{registered->first});
        }

        // every register maps back to a variable
        for (RegisterId r : a.registers) CHECK(art.register_var.count(r));
    }
}

TEST_CASE("bound variables fire exactly once per accepting run of Kleene-free patterns") {
    Gen gen(73);
    int checked = 0;
    for (int trial = 0; trial < 120 && checked < 25; ++trial) {
        PatternPtr p = gen.random_bounded_pattern(3);
        if (pattern_text(*p).find('+') != std::string::npos) continue;
        ++checked;
        CompileArtifacts art = compile(*p);
        Stream s = gen.random_stream(6);
        auto bounded = bound_vars(*p);

        for (const auto& run : enumerate_accepting_runs(art.automaton, s, 0)) {
            std::map<std::string, int> fired;
            std::map<RegisterId, std::vector<std::size_t>> writes_at;
            for (const auto& step : run.steps) {
                if (!step.index) continue;
                auto it = art.transition_var.find(step.transition);
                if (it != art.transition_var.end()) fired[it->second]++;
                for (RegisterId r : art.automaton.transitions[step.transition].guard->writes)
                    writes_at[r].push_back(*step.index);
            }
            for (const auto& var : bounded) CHECK(fired[var] == 1);
            // registers are written at most once per run and keep that event
            for (const auto& [r, positions] : writes_at) CHECK(positions.size() == 1);
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("engine equals oracle across a random corpus") {
    Gen gen(79);
    for (int trial = 0; trial < 60; ++trial) {
        PatternPtr p = gen.random_bounded_pattern(4);
        Stream s = gen.random_stream(8);
        CompileArtifacts art = compile(*p);
        CHECK(run_stream(art.automaton, s) == oracle::report(*p, s));
    }
}

} // TEST_SUITE
