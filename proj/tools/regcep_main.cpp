// Command-line front end: compile patterns to register automata, transform
// them, evaluate them over event streams, and diff against the reference
// semantics.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "regcep/automaton.hpp"
#include "regcep/compile.hpp"
#include "regcep/determinize.hpp"
#include "regcep/errors.hpp"
#include "regcep/events.hpp"
#include "regcep/oracle.hpp"
#include "regcep/pattern.hpp"
#include "regcep/unroll.hpp"

namespace {

using namespace regcep;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;       // generic failure / failed checks
constexpr int kExitAnalysis = 2;      // parse or boundedness failure
constexpr int kExitIo = 3;
constexpr int kExitExhausted = 4;     // configuration limit hit
constexpr int kExitMismatch = 5;      // diff found differences
constexpr int kExitOracleCap = 6;

struct IoError : Error {
    using Error::Error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path == "-" || path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IoError("failed writing '" + path + "'");
}

struct PatternOptions {
    std::string expr_text;
    std::string expr_file;
    std::uint64_t window_flag = 0;

    void attach(CLI::App& cmd, bool with_window = true) {
        auto* text = cmd.add_option("--expr", expr_text, "pattern text");
        auto* file = cmd.add_option("--expr-file", expr_file, "file containing the pattern");
        text->excludes(file);
        if (with_window)
            cmd.add_option("--window", window_flag,
                           "window length (alternative to WINDOW in the pattern)");
    }

    // Parsed body plus the window from either the pattern or the flag.
    std::pair<PatternPtr, std::optional<std::uint64_t>> load() const {
        std::string text = expr_text;
        if (!expr_file.empty()) text = read_file(expr_file);
        if (text.empty()) throw ParseError("no pattern given; use --expr or --expr-file");
        ParsedPattern parsed = parse_pattern(text);
        if (const auto* w = std::get_if<WindowedPattern>(&parsed)) {
            if (window_flag != 0)
                throw ParseError("--window conflicts with a WINDOW clause in the pattern");
            return {w->body, w->window};
        }
        PatternPtr b = std::get<PatternPtr>(parsed);
        if (window_flag != 0) return {b, window_flag};
        return {b, std::nullopt};
    }
};

void require_bounded(const Pattern& p) {
    auto diags = check_bounded(p);
    if (!diags.empty()) throw NotBoundedError("pattern is not bounded:\n" + to_text(diags));
}

Stream load_stream_from(const std::string& path) { return load_stream_file(read_file(path)); }

// compile -> eliminate -> [unroll] -> [determinize]
RegisterAutomaton build_pipeline(const PatternPtr& body, std::optional<std::uint64_t> window,
                                 bool do_determinize, bool output_agnostic) {
    require_bounded(*body);
    RegisterAutomaton a = eliminate_epsilon(compile(*body).automaton);
    if (window) a = unroll(a, *window).automaton;
    if (output_agnostic) {
        if (!window)
            throw ParseError("--output-agnostic requires a windowed pattern");
        a = determinize_output_agnostic(a);
    } else if (do_determinize) {
        a = determinize(a);
    }
    return a;
}

int cmd_compile(const PatternOptions& pattern, bool eliminate, const std::string& dot_path,
                const std::string& out_path) {
    auto [body, window] = pattern.load();
    if (window)
        throw ParseError("compile ignores windows; use the unroll subcommand for windowed patterns");
    require_bounded(*body);
    RegisterAutomaton a = compile(*body).automaton;
    if (eliminate) a = eliminate_epsilon(a);
    if (!dot_path.empty()) write_output(dot_path, to_dot(a));
    if (dot_path.empty() || !out_path.empty()) write_output(out_path, to_dump(a));
    return kExitOk;
}

int cmd_transform(const PatternOptions& pattern, bool output_agnostic, bool unroll_only,
                  const std::string& dot_path, const std::string& out_path) {
    auto [body, window] = pattern.load();
    RegisterAutomaton a;
    if (unroll_only) {
        if (!window) throw ParseError("unroll requires a window (WINDOW clause or --window)");
        a = build_pipeline(body, window, false, false);
    } else {
        a = build_pipeline(body, window, !output_agnostic, output_agnostic);
    }
    if (!dot_path.empty()) write_output(dot_path, to_dot(a));
    if (dot_path.empty() || !out_path.empty()) write_output(out_path, to_dump(a));
    return kExitOk;
}

int cmd_run(const PatternOptions& pattern, const std::string& stream_path, std::size_t start_index,
            std::size_t max_configs, bool do_determinize, bool output_agnostic,
            const std::string& out_path) {
    auto [body, window] = pattern.load();
    RegisterAutomaton a = build_pipeline(body, window, do_determinize, output_agnostic);
    Stream s = load_stream_from(stream_path);
    RunOptions opts;
    opts.max_configurations = max_configs;
    MatchReport report = run_stream(a, s, start_index, opts);
    write_output(out_path, report.serialize());
    return kExitOk;
}

int cmd_check(const PatternOptions& pattern, const std::string& stream_path, bool output_agnostic) {
    auto [body, window] = pattern.load();
    bool all_pass = true;

    auto diags = check_bounded(*body);
    std::cout << "boundedness: " << (diags.empty() ? "PASS" : "FAIL") << '\n';
    if (!diags.empty()) {
        std::cout << to_text(diags);
        return kExitFailure;
    }

    RegisterAutomaton a = eliminate_epsilon(compile(*body).automaton);
    if (window) a = unroll(a, *window).automaton;

    auto coverage = validate_register_coverage(a);
    std::cout << "register-coverage: " << (coverage.empty() ? "PASS" : "FAIL") << '\n';
    if (!coverage.empty()) {
        std::cout << to_text(coverage);
        all_pass = false;
    }

    if (!stream_path.empty()) {
        Stream s = load_stream_from(stream_path);
        std::vector<Probe> probes;
        for (const auto& current : s.events()) {
            for (const auto& content : s.events()) {
                RegisterBank bank;
                for (RegisterId r : a.registers) bank.emplace(r, content);
                probes.push_back(Probe{std::move(bank), current});
            }
        }
        auto per_output = check_deterministic(a, DeterminismMode::PerOutput, probes);
        std::cout << "determinism(per-output): " << (per_output.empty() ? "PASS" : "FAIL") << '\n';
        if (!per_output.empty()) {
            std::cout << to_text(per_output);
            all_pass = false;
        }
        if (output_agnostic) {
            auto agnostic = check_deterministic(a, DeterminismMode::OutputAgnostic, probes);
            std::cout << "determinism(output-agnostic): " << (agnostic.empty() ? "PASS" : "FAIL")
                      << '\n';
            if (!agnostic.empty()) {
                std::cout << to_text(agnostic);
                all_pass = false;
            }
        }
    }
    return all_pass ? kExitOk : kExitFailure;
}

int cmd_oracle(const PatternOptions& pattern, const std::string& stream_path,
               const std::string& out_path) {
    auto [body, window] = pattern.load();
    require_bounded(*body);
    Stream s = load_stream_from(stream_path);
    MatchReport report = window ? oracle::report(WindowedPattern{body, *window}, s)
                                : oracle::report(*body, s);
    write_output(out_path, report.serialize());
    return kExitOk;
}

int cmd_diff(const PatternOptions& pattern, const std::string& stream_path,
             const std::string& rma_path, std::size_t start_index, std::size_t max_configs) {
    auto [body, window] = pattern.load();
    require_bounded(*body);
    Stream s = load_stream_from(stream_path);

    RegisterAutomaton a;
    if (!rma_path.empty()) {
        a = parse_dump(read_file(rma_path));
    } else {
        a = build_pipeline(body, window, false, false);
    }
    RunOptions opts;
    opts.max_configurations = max_configs;
    MatchReport engine = run_stream(a, s, start_index, opts);
    MatchReport expected =
        window ? oracle::report(WindowedPattern{body, *window}, s) : oracle::report(*body, s);

    if (engine == expected) {
        std::cout << "match sets are identical (" << expected.all().size() << " matches)\n";
        return kExitOk;
    }
    auto print_set = [](const char* title, const std::set<Match>& matches) {
        std::cout << title << '\n';
        for (const auto& m : matches) {
            std::cout << "  {";
            for (std::size_t i = 0; i < m.size(); ++i) {
                if (i) std::cout << ',';
                std::cout << m[i];
            }
            std::cout << "}\n";
        }
    };
    auto engine_all = engine.all();
    auto expected_all = expected.all();
    std::set<Match> engine_only, expected_only;
    for (const auto& m : engine_all)
        if (!expected_all.count(m)) engine_only.insert(m);
    for (const auto& m : expected_all)
        if (!engine_all.count(m)) expected_only.insert(m);
    print_set("engine-only matches:", engine_only);
    print_set("reference-only matches:", expected_only);
    if (engine_only.empty() && expected_only.empty())
        std::cout << "same match sets, different completion indices\n";
    return kExitMismatch;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"register-automata pattern matching over event streams"};
    app.require_subcommand(1);

    PatternOptions compile_pattern, run_pattern, det_pattern, unroll_pattern, check_pattern,
        oracle_pattern, diff_pattern;

    // compile
    auto* compile_cmd = app.add_subcommand("compile", "compile a pattern to an automaton dump");
    compile_pattern.attach(*compile_cmd, false);
    bool eliminate = false;
    std::string compile_dot, compile_out;
    compile_cmd->add_flag("--eliminate-epsilon", eliminate, "eliminate epsilon transitions");
    compile_cmd->add_option("--dot", compile_dot, "write Graphviz output to this path ('-' = stdout)");
    compile_cmd->add_option("--out", compile_out, "write the automaton dump to this path");

    // run
    auto* run_cmd = app.add_subcommand("run", "evaluate a pattern over a stream");
    run_pattern.attach(*run_cmd);
    std::string run_stream_path, run_out;
    std::size_t run_start = 0, run_max = 100000;
    bool run_det = false, run_oa = false;
    run_cmd->add_option("--stream", run_stream_path, "stream file")->required();
    run_cmd->add_option("--start-index", run_start, "first stream index to consume");
    run_cmd->add_option("--max-configs", run_max, "live configuration limit");
    run_cmd->add_flag("--determinize", run_det, "determinize before running");
    run_cmd->add_flag("--output-agnostic", run_oa, "output-agnostic determinization (windowed)");
    run_cmd->add_option("--out", run_out, "write the match report to this path");

    // determinize
    auto* det_cmd = app.add_subcommand("determinize", "compile and determinize");
    det_pattern.attach(*det_cmd);
    bool det_oa = false;
    std::string det_dot, det_out;
    det_cmd->add_flag("--output-agnostic", det_oa, "output-agnostic determinization (windowed)");
    det_cmd->add_option("--dot", det_dot, "write Graphviz output");
    det_cmd->add_option("--out", det_out, "write the automaton dump");

    // unroll
    auto* unroll_cmd = app.add_subcommand("unroll", "compile and unroll a windowed pattern");
    unroll_pattern.attach(*unroll_cmd);
    std::string unroll_dot, unroll_out;
    unroll_cmd->add_option("--dot", unroll_dot, "write Graphviz output");
    unroll_cmd->add_option("--out", unroll_out, "write the automaton dump");

    // check
    auto* check_cmd = app.add_subcommand("check", "boundedness, coverage and determinism checks");
    check_pattern.attach(*check_cmd);
    std::string check_stream;
    bool check_oa = false;
    check_cmd->add_option("--stream", check_stream, "stream file used to build determinism probes");
    check_cmd->add_flag("--output-agnostic", check_oa, "also check output-agnostic determinism");

    // oracle
    auto* oracle_cmd = app.add_subcommand("oracle", "reference matches by exhaustive evaluation");
    oracle_pattern.attach(*oracle_cmd);
    std::string oracle_stream, oracle_out;
    oracle_cmd->add_option("--stream", oracle_stream, "stream file")->required();
    oracle_cmd->add_option("--out", oracle_out, "write the match report to this path");

    // diff
    auto* diff_cmd = app.add_subcommand("diff", "compare engine matches against the reference");
    diff_pattern.attach(*diff_cmd);
    std::string diff_stream, diff_rma;
    std::size_t diff_start = 0, diff_max = 100000;
    diff_cmd->add_option("--stream", diff_stream, "stream file")->required();
    diff_cmd->add_option("--rma", diff_rma, "run this automaton dump instead of compiling");
    diff_cmd->add_option("--start-index", diff_start, "first stream index to consume");
    diff_cmd->add_option("--max-configs", diff_max, "live configuration limit");

    CLI11_PARSE(app, argc, argv);

    try {
        if (compile_cmd->parsed())
            return cmd_compile(compile_pattern, eliminate, compile_dot, compile_out);
        if (run_cmd->parsed())
            return cmd_run(run_pattern, run_stream_path, run_start, run_max, run_det, run_oa,
                           run_out);
        if (det_cmd->parsed()) return cmd_transform(det_pattern, det_oa, false, det_dot, det_out);
        if (unroll_cmd->parsed())
            return cmd_transform(unroll_pattern, false, true, unroll_dot, unroll_out);
        if (check_cmd->parsed()) return cmd_check(check_pattern, check_stream, check_oa);
        if (oracle_cmd->parsed()) return cmd_oracle(oracle_pattern, oracle_stream, oracle_out);
        if (diff_cmd->parsed())
            return cmd_diff(diff_pattern, diff_stream, diff_rma, diff_start, diff_max);
    } catch (const NotBoundedError& e) {
        std::cerr << e.what() << '\n';
        return kExitAnalysis;
    } catch (const ParseError& e) {
        std::cerr << e.what() << '\n';
        return kExitAnalysis;
    } catch (const NoAcceptingWalkError& e) {
        std::cerr << e.what() << '\n';
        return kExitAnalysis;
    } catch (const IoError& e) {
        std::cerr << e.what() << '\n';
        return kExitIo;
    } catch (const ResourceExhaustedError& e) {
        std::cerr << e.what() << '\n';
        return kExitExhausted;
    } catch (const OracleCapError& e) {
        std::cerr << e.what() << '\n';
        return kExitOracleCap;
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}
