#include "regcep/oracle.hpp"

#include <algorithm>

#include "regcep/errors.hpp"

namespace regcep::oracle {

namespace {

Valuation merge_valuations(const Valuation& a, const Valuation& b) {
    Valuation out = a;
    for (const auto& [var, idx] : b) {
        auto [it, inserted] = out.emplace(var, idx);
        if (!inserted && it->second != idx)
            throw Error("conflicting bindings for variable '" + var +
                        "' while merging derivations; boundedness check should have rejected this");
    }
    return out;
}

Match merge_matches(const Match& a, const Match& b) {
    Match out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

} // namespace

std::set<Derivation> eval(const Pattern& p, const Stream& s, std::size_t i) {
    return std::visit(
        [&](const auto& node) -> std::set<Derivation> {
            using T = std::decay_t<decltype(node)>;
            std::set<Derivation> out;
            if constexpr (std::is_same_v<T, BasePattern>) {
                for (std::size_t j = i; j < s.size(); ++j) {
                    const Scalar& type = s[j].at("type");
                    if (scalar_equal(type, Scalar(node.relation)))
                        out.insert(Derivation{{j}, {{node.var, j}}});
                }
            } else if constexpr (std::is_same_v<T, FilterPattern>) {
                for (const auto& d : eval(*node.child, s, i)) {
                    std::vector<const Event*> args;
                    args.reserve(node.filter.arg_vars.size());
                    for (const auto& var : node.filter.arg_vars) {
                        auto it = d.valuation.find(var);
                        if (it == d.valuation.end())
                            throw Error("filter variable '" + var +
                                        "' has no binding; boundedness check should have "
                                        "rejected this pattern");
                        args.push_back(&s[it->second]);
                    }
                    if (evaluate(node.filter.formula, args)) out.insert(d);
                }
            } else if constexpr (std::is_same_v<T, OrPattern>) {
                out = eval(*node.left, s, i);
                auto right = eval(*node.right, s, i);
                out.insert(right.begin(), right.end());
            } else if constexpr (std::is_same_v<T, SeqPattern>) {
                for (const auto& dl : eval(*node.left, s, i)) {
                    for (const auto& dr : eval(*node.right, s, dl.match.back() + 1)) {
                        out.insert(Derivation{merge_matches(dl.match, dr.match),
                                              merge_valuations(dl.valuation, dr.valuation)});
                    }
                }
            } else { // IterPattern: 1..n repetitions, fresh scope per repetition
                std::set<Derivation> frontier;
                for (const auto& d : eval(*node.child, s, i)) frontier.insert(d);
                out = frontier;
                while (!frontier.empty()) {
                    std::set<Derivation> next;
                    for (const auto& d : frontier) {
                        for (const auto& rep : eval(*node.child, s, d.match.back() + 1)) {
                            // valuation of the first repetition is kept; later
                            // scopes are private to their repetition
                            Derivation combined{merge_matches(d.match, rep.match), d.valuation};
                            if (!out.count(combined)) next.insert(std::move(combined));
                        }
                    }
                    out.insert(next.begin(), next.end());
                    frontier = std::move(next);
                }
            }
            return out;
        },
        p.node);
}

std::set<Match> eval_windowed(const WindowedPattern& p, const Stream& s, std::size_t i) {
    std::set<Match> out;
    for (const auto& d : eval(*p.body, s, i))
        if (d.match.back() - d.match.front() < p.window) out.insert(d.match);
    return out;
}

namespace {

void check_cap(const Stream& s) {
    if (s.size() > kMaxStreamLength)
        throw OracleCapError("stream of length " + std::to_string(s.size()) +
                             " exceeds the oracle cap of " + std::to_string(kMaxStreamLength));
}

} // namespace

std::set<Match> all_matches(const Pattern& p, const Stream& s) {
    check_cap(s);
    std::set<Match> out;
    for (const auto& d : eval(p, s, 0)) out.insert(d.match);
    return out;
}

std::set<Match> all_matches(const WindowedPattern& p, const Stream& s) {
    check_cap(s);
    return eval_windowed(p, s, 0);
}

MatchReport report(const Pattern& p, const Stream& s) {
    MatchReport out;
    for (const auto& m : all_matches(p, s)) out.per_index[m.back() + 1].insert(m);
    return out;
}

MatchReport report(const WindowedPattern& p, const Stream& s) {
    MatchReport out;
    for (const auto& m : all_matches(p, s)) out.per_index[m.back() + 1].insert(m);
    return out;
}

} // namespace regcep::oracle
