#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "lmlab/config.hpp"
#include "lmlab/runner.hpp"

namespace lmlab {

namespace {

struct CliState {
    std::string config_file;
    std::optional<u64> seed;
    std::optional<unsigned> threads;
    std::string out;
    std::string format;
    json params = json::object();
    std::string command;
};

// Flags override config-file values; both funnel into one ExperimentConfig.
ExperimentConfig assemble(const CliState& st) {
    json base;
    if (!st.config_file.empty()) {
        base = serialize_config(load_config_file(st.config_file));
    } else {
        base["command"] = st.command;
        base["params"] = json::object();
    }
    if (!st.command.empty()) base["command"] = st.command;
    if (st.seed) base["seed"] = *st.seed;
    if (st.threads) base["threads"] = *st.threads;
    if (!st.out.empty()) base["out"] = st.out;
    if (!st.format.empty()) base["format"] = st.format;
    for (auto& [key, value] : st.params.items()) base["params"][key] = value;
    return parse_config(base);
}

int dispatch(const CliState& st) {
    ExperimentConfig config;
    try {
        config = assemble(st);
    } catch (const config_error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitConfig;
    }
    RunOutcome outcome = run(config);
    if (!outcome.error.empty()) std::fprintf(stderr, "%s\n", outcome.error.c_str());
    if (!outcome.stdout_text.empty()) std::fputs(outcome.stdout_text.c_str(), stdout);
    if (!outcome.result_path.empty())
        std::fprintf(stderr, "wrote %s (manifest %s)\n", outcome.result_path.c_str(),
                     outcome.manifest_path.c_str());
    return outcome.exit_code;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"empirical laboratory for Liouville/Moebius sign patterns"};
    app.require_subcommand(0, 1);
    app.fallthrough(false);
    app.set_help_flag("--help", "print help");

    CliState st;
    app.add_option("--config", st.config_file, "JSON config file (flags override its values)");

    auto add_common = [&](CLI::App* sub) {
        sub->set_help_flag("--help", "print help");
        sub->add_option_function<u64>("--seed", [&](u64 v) { st.seed = v; },
                                      "master seed (required for stochastic commands)");
        sub->add_option_function<unsigned>("--threads", [&](unsigned v) { st.threads = v; },
                                           "worker pool size (outputs are degree-independent)");
        sub->add_option("--out", st.out, "output file (default stdout); manifest written alongside");
        sub->add_option("--format", st.format, "json|jsonl|csv|edgelist|text");
        sub->add_option("--config", st.config_file, "JSON config file");
    };
    auto p_u64 = [&](CLI::App* sub, const std::string& flag, const std::string& key,
                     const std::string& help) {
        sub->add_option_function<u64>(flag, [&st, key](u64 v) { st.params[key] = v; }, help);
    };
    auto p_i64 = [&](CLI::App* sub, const std::string& flag, const std::string& key,
                     const std::string& help) {
        sub->add_option_function<i64>(flag, [&st, key](i64 v) { st.params[key] = v; }, help);
    };
    auto p_str = [&](CLI::App* sub, const std::string& flag, const std::string& key,
                     const std::string& help) {
        sub->add_option_function<std::string>(
            flag, [&st, key](const std::string& v) { st.params[key] = v; }, help);
    };

    auto* sieve = app.add_subcommand("sieve", "sieve lambda/mu over a range, optionally cache it");
    add_common(sieve);
    p_u64(sieve, "--start", "start", "first integer of the range");
    p_u64(sieve, "--len", "len", "range length");
    p_u64(sieve, "--w", "w", "squarefree truncation bound (0 = off)");
    p_str(sieve, "--cache", "cache", "binary segment cache path (LMLAB_CACHE_DIR-relative)");

    auto* pattern = app.add_subcommand("pattern", "sign-pattern density over a scale ladder");
    add_common(pattern);
    p_str(pattern, "--expr", "expr", "pattern, '^' marks the position (e.g. \"^+++\")");
    p_str(pattern, "--fn", "fn", "lambda|mu|musq");
    p_u64(pattern, "--n", "n", "top scale; ladder N/2^j, j=0..6");
    pattern->add_option_function<std::vector<u64>>(
        "--scales", [&st](const std::vector<u64>& v) { st.params["scales"] = v; },
        "explicit ascending scale list");

    auto* pairs = app.add_subcommand("pairs", "3x3 table of (mu(n), mu(n+1))");
    add_common(pairs);
    p_u64(pairs, "--n", "n", "count pairs over n in [1, N-1]");

    auto* interval = app.add_subcommand("interval", "short-interval average profile");
    add_common(interval);
    p_str(interval, "--fn", "fn", "lambda|mu");
    p_str(interval, "--twist", "twist", "none|chi3|chi+|chi-");
    p_u64(interval, "--h", "h", "terms per window");
    p_u64(interval, "--n", "n", "slide n over [1, N]");
    p_u64(interval, "--lo", "lo", "window start (default 1)");
    p_u64(interval, "--hi", "hi", "window end (alternative to --n)");

    auto* rundensity = app.add_subcommand("rundensity", "density of all-+1 lambda windows");
    add_common(rundensity);
    rundensity->add_option_function<double>(
        "--a", [&st](double v) { st.params["a"] = v; }, "half-width of the open window");
    p_u64(rundensity, "--n", "n", "t ranges over (a, N]");

    auto* graph = app.add_subcommand("graph", "sample the squarefree-shift graph");
    add_common(graph);
    p_str(graph, "--mode", "mode", "profinite|integer");
    p_u64(graph, "--x", "x", "connectivity is queried between 0 and X");
    p_u64(graph, "--w", "w", "square truncation bound (default 50)");
    p_u64(graph, "--p", "p", "prime bound (default max(window diameter, w))");
    p_u64(graph, "--trials", "trials", "independent samples");
    p_i64(graph, "--window-lo", "window_lo", "window start (default 0)");
    p_i64(graph, "--window-hi", "window_hi", "window end (default 2X)");
    p_u64(graph, "--n0", "n0", "integer mode: the concrete integer n0");
    p_str(graph, "--vertex-rule", "vertex_rule", "truncated|exact (exact needs integer mode)");

    auto* ensemble = app.add_subcommand("ensemble", "weighted path ensemble statistics");
    add_common(ensemble);
    p_u64(ensemble, "--k", "k", "path length (odd)");
    p_u64(ensemble, "--imin", "imin", "prime interval lower end");
    p_u64(ensemble, "--imax", "imax", "prime interval upper end");
    p_u64(ensemble, "--trials", "trials", "conditioned samples");
    p_u64(ensemble, "--w", "w", "square truncation bound (default 50)");
    p_u64(ensemble, "--p", "p", "prime bound (default max(imax, w))");
    p_i64(ensemble, "--start", "start", "start vertex (default 0)");

    auto* triples = app.add_subcommand("triples", "constrained prime-triple count vs main term");
    add_common(triples);
    p_u64(triples, "--x", "x", "scale (intervals (X,3X], (5X,7X], (3X,5X])");
    p_i64(triples, "--m", "m", "odd target, -p1+p2-p3 = m");
    p_i64(triples, "--shift", "shift", "shift A in the squarefree conditions");
    p_u64(triples, "--w", "w", "squarefree truncation bound (1 = off)");
    p_u64(triples, "--k", "k", "congruence modulus (squarefree; classes mod k^2)");
    p_u64(triples, "--a1", "a1", "class of p1 mod k^2");
    p_u64(triples, "--a2", "a2", "class of p2 mod k^2");

    auto* report = app.add_subcommand("report", "claim table over result files");
    add_common(report);
    report->add_option_function<std::vector<std::string>>(
        "--in", [&st](const std::vector<std::string>& v) { st.params["in"] = v; },
        "result JSON files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    for (auto* sub : app.get_subcommands()) st.command = sub->get_name();
    if (st.command.empty() && st.config_file.empty()) {
        std::fputs(app.help().c_str(), stderr);
        return kExitConfig;
    }
    if (st.command == "report" && st.format.empty()) st.format = "text";
    return dispatch(st);
}

}  // namespace lmlab
