#include <gtest/gtest.h>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "setforge/harness.hpp"
#include "setforge/script.hpp"
#include "setforge/textio.hpp"
#include "setforge/validity.hpp"

// Drives the installed binary end to end: exit codes, dump checking over
// a generated fixture corpus, property filtering, fault injection, and
// the bench CSV shape.

namespace {

struct run_result {
    int exit_code = -1;
    std::string output;
};

std::string unique_name(const std::string& stem) {
    static std::atomic<int> counter{0};
    return stem + "." + std::to_string(getpid()) + "." + std::to_string(counter.fetch_add(1));
}

run_result run_cli(const std::string& args, const std::string& stdin_text = {}) {
    const std::string in_path = ::testing::TempDir() + "/" + unique_name("cli_stdin");
    {
        std::ofstream out(in_path, std::ios::binary);
        out << stdin_text;
    }
    const std::string cmd =
        std::string(SETFORGE_CLI_PATH) + " " + args + " < " + in_path + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    EXPECT_NE(pipe, nullptr);
    run_result res;
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) res.output.append(buf, n);
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string write_temp(const std::string& name, const std::string& text) {
    const std::string path = ::testing::TempDir() + "/" + unique_name(name);
    std::ofstream out(path, std::ios::binary);
    out << text;
    return path;
}

}  // namespace

TEST(Cli, CheckValidFromStdin) {
    const auto res = run_cli("check --kind=wb -", "tip");
    EXPECT_EQ(res.exit_code, 0);
    EXPECT_NE(res.output.find("ok"), std::string::npos);
    EXPECT_EQ(run_cli("check --kind=pt -", "nil").exit_code, 0);
}

TEST(Cli, CheckWrongSizeField) {
    const auto res = run_cli("check --kind=wb -", "(bin 3 7 (bin 1 1 tip tip) tip)");
    EXPECT_EQ(res.exit_code, 1);
    EXPECT_NE(res.output.find("wb.size at <root>: stored 3, computed 2"), std::string::npos);
}

TEST(Cli, CheckParseError) {
    const auto res = run_cli("check --kind=wb -", "(bin oops 5 tip tip)");
    EXPECT_EQ(res.exit_code, 2);
    EXPECT_NE(res.output.find("line 1"), std::string::npos);
    EXPECT_NE(res.output.find("column"), std::string::npos);
}

TEST(Cli, CheckFixtureCorpus) {
    setforge::script::rng r(0xc0de);
    int wrote = 0;
    for (int i = 0; i < 10; ++i) {
        // wb: one valid and one corrupted dump per round
        const auto wt = setforge::harness::random_wb_tree(r, 3, 60, 1 << 12);
        const auto good = write_temp("wb_good_" + std::to_string(i) + ".txt",
                                     setforge::textio::print_wbset(wt));
        EXPECT_EQ(run_cli("--quiet check --kind=wb " + good).exit_code, 0);
        const int kind = static_cast<int>(r.below(setforge::harness::wb_mutation_kinds));
        if (auto bad = setforge::harness::mutate_wb(wt, kind, r)) {
            const auto path = write_temp("wb_bad_" + std::to_string(i) + ".txt",
                                         setforge::textio::print_wbset(*bad));
            EXPECT_EQ(run_cli("--quiet check --kind=wb " + path).exit_code, 1);
            ++wrote;
        }

        const auto ptree =
            setforge::harness::random_pt_tree(r, 3, 60, std::uint64_t{1} << 24, true);
        const auto pgood = write_temp("pt_good_" + std::to_string(i) + ".txt",
                                      setforge::textio::print_pset(ptree));
        EXPECT_EQ(run_cli("--quiet check --kind=pt " + pgood).exit_code, 0);
        const int pkind = static_cast<int>(r.below(setforge::harness::pt_mutation_kinds));
        if (auto bad = setforge::harness::mutate_pt(ptree, pkind, r)) {
            const auto path = write_temp("pt_bad_" + std::to_string(i) + ".txt",
                                         setforge::textio::print_pset(*bad));
            EXPECT_EQ(run_cli("--quiet check --kind=pt " + path).exit_code, 1);
            ++wrote;
        }
    }
    EXPECT_EQ(wrote, 20);  // ten corrupted dumps per kind
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run_cli("check --kind=bogus -", "tip").exit_code, 2);
    EXPECT_EQ(run_cli("definitely-not-a-command").exit_code, 2);
    EXPECT_EQ(run_cli("check --kind=wb /nonexistent/file").exit_code, 2);
    EXPECT_EQ(run_cli("--seed zz check --kind=wb -", "tip").exit_code, 2);
    EXPECT_EQ(run_cli("props --filter '('").exit_code, 2);
    EXPECT_EQ(run_cli("props --filter no-such-property").exit_code, 2);
    EXPECT_EQ(run_cli("props --inject bogus.fault").exit_code, 2);
    EXPECT_EQ(run_cli("bench --op wb.nonsense").exit_code, 2);
}

TEST(Cli, ExhaustiveSmall) {
    const auto res = run_cli("exhaustive --bits 4");
    EXPECT_EQ(res.exit_code, 0);
    EXPECT_NE(res.output.find("agree"), std::string::npos);
    EXPECT_EQ(run_cli("exhaustive --bits 9").exit_code, 2);
}

TEST(Cli, FuzzSeededAndQuiet) {
    const auto res = run_cli("--seed 00000000000000aa fuzz --kind=pt --cases 20 --ops 40");
    EXPECT_EQ(res.exit_code, 0);
    EXPECT_NE(res.output.find("seed=00000000000000aa"), std::string::npos);
    const auto quiet = run_cli("--quiet --seed aa fuzz --kind=wb --cases 10 --ops 30");
    EXPECT_EQ(quiet.exit_code, 0);
    EXPECT_TRUE(quiet.output.empty()) << quiet.output;
}

TEST(Cli, PropsFilterRunsOnlyMatching) {
    const auto res = run_cli("--seed 1f props --filter union --cases 40");
    EXPECT_EQ(res.exit_code, 0);
    EXPECT_NE(res.output.find("wb.union-assoc"), std::string::npos);
    EXPECT_NE(res.output.find("pt.union-assoc"), std::string::npos);
    EXPECT_EQ(res.output.find("bit.rev-oracle"), std::string::npos);
}

TEST(Cli, PropsWithInjectedFaultFails) {
    const auto res = run_cli(
        "--seed 2f props --filter 'pt\\.(oracle-equiv|wf-after-ops)' --cases 300 "
        "--inject pt.union.drop-nomatch");
    EXPECT_EQ(res.exit_code, 1);
    EXPECT_NE(res.output.find("FAIL"), std::string::npos);
    EXPECT_NE(res.output.find("minimal counterexample"), std::string::npos);
    EXPECT_NE(res.output.find("seed="), std::string::npos);
}

TEST(Cli, BenchCsv) {
    const auto res = run_cli("--seed 3c bench --op pt.member --size 2000 --reps 5");
    EXPECT_EQ(res.exit_code, 0);
    EXPECT_NE(res.output.find("op,size,reps,ns_per_op_median,checksum"), std::string::npos);
    EXPECT_NE(res.output.find("pt.member,2000,5,"), std::string::npos);
    const auto both = run_cli("--seed 3c bench --op wb.union.singleton --size 1000 --reps 3");
    EXPECT_EQ(both.exit_code, 0);
    EXPECT_NE(both.output.find("wb.union.singleton.fast,"), std::string::npos);
    EXPECT_NE(both.output.find("wb.union.singleton.generic,"), std::string::npos);
}

TEST(Cli, CheckRoundTripThroughFiles) {
    // print -> check -> reprint is stable for a tree with negative elements
    const auto t = setforge::wb::from_list(std::vector<std::int64_t>{-3, 0, 14, -100});
    const auto path = write_temp("wb_neg.txt", setforge::textio::print_wbset(t));
    EXPECT_EQ(run_cli("--quiet check --kind=wb " + path).exit_code, 0);
}
