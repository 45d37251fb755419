// setforge: validation, fuzzing, exhaustive checking, and benchmarking
// for the persistent set structures.
//
// Exit codes: 0 ok, 1 invariant or property failure, 2 usage/parse error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <regex>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "setforge/faults.hpp"
#include "setforge/harness.hpp"
#include "setforge/script.hpp"
#include "setforge/textio.hpp"
#include "setforge/validity.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_usage = 2;

struct options {
    bool quiet = false;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

std::uint64_t effective_seed(const options& opt) {
    if (opt.seed_given) return opt.seed;
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

void echo_seed(const options& opt, std::uint64_t seed) {
    if (!opt.quiet) std::printf("seed=%016llx\n", static_cast<unsigned long long>(seed));
}

std::optional<std::string> read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cmd_check(const options& opt, const std::string& kind, const std::string& input_path) {
    const auto text = read_input(input_path);
    if (!text) {
        std::fprintf(stderr, "error: cannot read '%s'\n", input_path.c_str());
        return exit_usage;
    }
    setforge::validity::report rep;
    try {
        if (kind == "wb") {
            rep = setforge::validity::check_wbset(setforge::textio::parse_wbset(*text));
        } else {
            rep = setforge::validity::check_patricia(setforge::textio::parse_pset(*text));
        }
    } catch (const setforge::textio::parse_error& e) {
        std::fprintf(stderr, "parse error at %s\n", e.what());
        return exit_usage;
    }
    for (const auto& f : rep.failures)
        std::printf("%s\n", setforge::validity::format_failure(f).c_str());
    if (rep.ok()) {
        if (!opt.quiet) std::printf("ok\n");
        return exit_ok;
    }
    return exit_failure;
}

void print_counterexample(const setforge::harness::property_result& res) {
    if (!res.counterexample) return;
    std::printf("minimal counterexample (%zu ops):\n%s", res.counterexample->ops.size(),
                setforge::script::to_text(*res.counterexample).c_str());
    if (!res.diagnostics.empty()) std::printf("diagnostics: %s\n", res.diagnostics.c_str());
}

int cmd_fuzz(const options& opt, const std::string& kind, int cases, int ops) {
    const std::uint64_t seed = effective_seed(opt);
    echo_seed(opt, seed);
    const auto res = kind == "wb"
                         ? setforge::harness::run_fuzz<setforge::harness::wb_adapter>(cases, seed, ops)
                         : setforge::harness::run_fuzz<setforge::harness::pt_adapter>(cases, seed, ops);
    if (res.passed) {
        if (!opt.quiet)
            std::printf("%s: %d scripts of %d ops: all laws hold\n", res.id.c_str(), cases, ops);
        return exit_ok;
    }
    std::printf("%s: FAILED\n", res.id.c_str());
    print_counterexample(res);
    return exit_failure;
}

int cmd_exhaustive(const options& opt, int bits) {
    const auto res = setforge::harness::run_exhaustive(bits);
    if (res.passed) {
        if (!opt.quiet)
            std::printf("exhaustive --bits %d: %d checks, all structures agree with the model\n",
                        bits, res.cases_run);
        return exit_ok;
    }
    std::printf("exhaustive --bits %d: FAILED: %s\n", bits, res.diagnostics.c_str());
    return exit_failure;
}

int cmd_bench(const options& opt, const std::string& op, std::uint64_t size, int reps) {
    const std::uint64_t seed = effective_seed(opt);
    echo_seed(opt, seed);
    try {
        const auto rows = setforge::harness::run_bench(op, size, reps, seed);
        std::printf("%s\n", setforge::harness::bench_csv_header().c_str());
        for (const auto& row : rows)
            std::printf("%s\n", setforge::harness::bench_csv_row(row).c_str());
        return exit_ok;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        std::fprintf(stderr, "registered ops:");
        for (const auto& name : setforge::harness::bench_ops())
            std::fprintf(stderr, " %s", name.c_str());
        std::fprintf(stderr, "\n");
        return exit_usage;
    } catch (const std::runtime_error& e) {
        std::fprintf(stderr, "bench failure: %s\n", e.what());
        return exit_failure;
    }
}

int cmd_props(const options& opt, const std::string& filter, int cases,
              const std::string& inject) {
    std::regex re;
    try {
        re = std::regex(filter.empty() ? std::string(".*") : filter);
    } catch (const std::regex_error&) {
        std::fprintf(stderr, "error: bad --filter regex\n");
        return exit_usage;
    }
    std::atomic<bool>* fault = nullptr;
    if (!inject.empty()) {
        fault = setforge::faults::fault_by_name(inject);
        if (!fault) {
            std::fprintf(stderr, "error: unknown fault '%s'; known:", inject.c_str());
            for (const auto name : setforge::faults::fault_names)
                std::fprintf(stderr, " %s", std::string(name).c_str());
            std::fprintf(stderr, "\n");
            return exit_usage;
        }
    }
    const std::uint64_t seed = effective_seed(opt);
    echo_seed(opt, seed);

    int failures = 0;
    int matched = 0;
    for (const auto& prop : setforge::harness::catalog()) {
        if (!std::regex_search(prop.id, re)) continue;
        ++matched;
        std::optional<setforge::faults::scoped_fault> guard;
        if (fault) guard.emplace(*fault);
        const auto res = setforge::harness::run_property(prop.id, cases, seed);
        if (res.passed) {
            if (!opt.quiet)
                std::printf("PASS %-22s %5d cases  %s\n", res.id.c_str(), res.cases_run,
                            prop.description.c_str());
        } else {
            ++failures;
            std::printf("FAIL %-22s %5d cases  %s\n", res.id.c_str(), res.cases_run,
                        prop.description.c_str());
            print_counterexample(res);
        }
    }
    if (matched == 0) {
        std::fprintf(stderr, "error: no property matches '%s'\n", filter.c_str());
        return exit_usage;
    }
    if (!opt.quiet)
        std::printf("%d/%d properties passed\n", matched - failures, matched);
    return failures == 0 ? exit_ok : exit_failure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"persistent finite-set structures: checkers, fuzzing, benchmarks"};
    app.require_subcommand(1);

    options opt;
    std::string seed_hex;
    app.add_flag("--quiet", opt.quiet, "suppress non-essential output");
    app.add_option("--seed", seed_hex, "64-bit hex seed for all randomness");

    auto* check = app.add_subcommand("check", "validate a tree dump");
    std::string check_kind;
    std::string check_input = "-";
    check->add_option("--kind", check_kind, "wb or pt")
        ->required()
        ->check(CLI::IsMember({"wb", "pt"}));
    check->add_option("input", check_input, "file path or - for stdin");

    auto* fuzz = app.add_subcommand("fuzz", "random differential scripts against the model");
    std::string fuzz_kind;
    int fuzz_cases = 200;
    int fuzz_ops = 100;
    fuzz->add_option("--kind", fuzz_kind, "wb or pt")
        ->required()
        ->check(CLI::IsMember({"wb", "pt"}));
    fuzz->add_option("--cases", fuzz_cases, "number of scripts")->check(CLI::PositiveNumber);
    fuzz->add_option("--ops", fuzz_ops, "ops per script")->check(CLI::PositiveNumber);

    auto* exhaustive = app.add_subcommand("exhaustive", "all subsets and pairs of a small universe");
    int bits = 6;
    exhaustive->add_option("--bits", bits, "universe size in bits (max 8)")
        ->check(CLI::Range(0, 8));

    auto* bench = app.add_subcommand("bench", "microbenchmark a registered operation");
    std::string bench_op;
    std::uint64_t bench_size = 10000;
    int bench_reps = 50;
    bench->add_option("--op", bench_op, "operation name")->required();
    bench->add_option("--size", bench_size, "input size");
    bench->add_option("--reps", bench_reps, "repetitions")->check(CLI::PositiveNumber);

    auto* props = app.add_subcommand("props", "run the registered property catalog");
    std::string props_filter;
    int props_cases = 1000;
    std::string props_inject;
    props->add_option("--filter", props_filter, "regex over property ids");
    props->add_option("--cases", props_cases, "cases per property")->check(CLI::PositiveNumber);
    props->add_option("--inject", props_inject, "enable a documented fault while running");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return exit_usage;
    }

    if (!seed_hex.empty()) {
        try {
            std::size_t used = 0;
            opt.seed = std::stoull(seed_hex, &used, 16);
            if (used != seed_hex.size()) throw std::invalid_argument("seed");
            opt.seed_given = true;
        } catch (const std::exception&) {
            std::fprintf(stderr, "error: --seed must be a hex 64-bit value\n");
            return exit_usage;
        }
    }

    if (check->parsed()) return cmd_check(opt, check_kind, check_input);
    if (fuzz->parsed()) return cmd_fuzz(opt, fuzz_kind, fuzz_cases, fuzz_ops);
    if (exhaustive->parsed()) return cmd_exhaustive(opt, bits);
    if (bench->parsed()) return cmd_bench(opt, bench_op, bench_size, bench_reps);
    if (props->parsed()) return cmd_props(opt, props_filter, props_cases, props_inject);
    return exit_usage;
}
