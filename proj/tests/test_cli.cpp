#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "cob.hpp"
#include "json.hpp"

using json = nlohmann::json;

namespace {

const std::string kCli = COB_CLI_PATH;
const std::string kCorpus = COB_CORPUS_DIR;

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CliResult run_cli(const std::string& args) {
    static int serial = 0;
    const std::string base =
        std::string(::testing::TempDir()) + "cli_" + std::to_string(serial++);
    const std::string cmd =
        kCli + " " + args + " >" + base + ".out 2>" + base + ".err";
    const int rc = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(base + ".out");
    r.err = slurp(base + ".err");
    return r;
}

std::string corpus(const std::string& name) { return kCorpus + "/" + name; }

std::string temp_path(const std::string& name) {
    return std::string(::testing::TempDir()) + name;
}

}  // namespace

TEST(Cli, AbstractDemoSummaryAndExitZero) {
    const auto r = run_cli("abstract " + corpus("demo.cob") + " --degree-init 3");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.out.find("space at main: dimension 3"), std::string::npos);
    EXPECT_NE(r.out.find("w1' = w2 + 2*w1"), std::string::npos);
    EXPECT_NE(r.out.find("w2' = 1/2*w3 + 9*w2 + w1"), std::string::npos);
    EXPECT_NE(r.out.find("w3' = 16*w3 + 2*w2"), std::string::npos);
    EXPECT_NE(r.out.find("w1 in [0, 1]"), std::string::npos);
}

TEST(Cli, TrivialResultExitThree) {
    const auto r =
        run_cli("abstract " + corpus("vanderpol.cob") + " --degree-init 8");
    EXPECT_EQ(r.exit_code, 3);
    EXPECT_NE(r.out.find("trivial"), std::string::npos);
}

TEST(Cli, NonAffineInvariantsExitTwo) {
    const auto r = run_cli("invariants " + corpus("demo.cob") +
                           " --degree-init 3 --degree-out 2");
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.err.find("degree-out 1"), std::string::npos);
}

TEST(Cli, MissingFileExitOne) {
    const auto r = run_cli("abstract " + corpus("no_such_model.cob"));
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST(Cli, ParseErrorExitOne) {
    const std::string bad = temp_path("bad.cob");
    std::ofstream(bad) << "continuous broken { vars: x; field { x' = ; } }";
    const auto r = run_cli("abstract " + bad);
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST(Cli, ReportRoundTripAndTamperedMatrix) {
    const std::string rep = temp_path("demo_report.json");
    auto r = run_cli("invariants " + corpus("demo.cob") +
                     " --degree-init 3 --out " + rep);
    ASSERT_EQ(r.exit_code, 0);

    auto j = json::parse(slurp(rep));
    EXPECT_EQ(j["abstraction"]["arity"], 3u);
    EXPECT_EQ(j["options"]["degree_init"], 3u);
    EXPECT_EQ(j["system"]["source"], slurp(corpus("demo.cob")));

    // the genuine report validates clean
    r = run_cli("validate " + rep);
    EXPECT_EQ(r.exit_code, 0);

    // a corrupted flow matrix must fail the numeric probes
    j["abstraction"]["locations"][0]["a"][0][0] = "5";
    const std::string bad = temp_path("demo_tampered.json");
    std::ofstream(bad) << j.dump();
    r = run_cli("validate " + bad);
    EXPECT_EQ(r.exit_code, 4);
    EXPECT_NE(r.out.find("overall: FAIL"), std::string::npos);
}

TEST(Cli, JsonStdoutIsMachineReadable) {
    const auto r = run_cli("abstract " + corpus("quartic.cob") +
                           " --degree-init 4 --out -");
    ASSERT_EQ(r.exit_code, 0);
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["abstraction"]["arity"], 1u);
    EXPECT_EQ(j["abstraction"]["init_box"][0]["lo"], "16");
    EXPECT_EQ(j["abstraction"]["init_box"][0]["hi"], "18");
    EXPECT_EQ(j["closure"]["spaces"][0]["dim"], 1u);
}

TEST(Cli, ReportsAreDeterministicUpToTimings) {
    auto a = run_cli("validate " + corpus("sumsquares.cob") +
                     " --degree-init 3 --out -");
    auto b = run_cli("validate " + corpus("sumsquares.cob") +
                     " --degree-init 3 --out -");
    ASSERT_EQ(a.exit_code, 0);
    ASSERT_EQ(b.exit_code, 0);
    auto ja = json::parse(a.out);
    auto jb = json::parse(b.out);
    EXPECT_EQ(ja["digest"], jb["digest"]);
    ja.erase("timings_ms");
    jb.erase("timings_ms");
    EXPECT_EQ(ja.dump(), jb.dump());
}

TEST(Cli, MultilinearizeOutputReparses) {
    const std::string out = temp_path("vdp_multi.cob");
    auto r = run_cli("multilinearize " + corpus("vanderpol.cob") + " --out " + out);
    ASSERT_EQ(r.exit_code, 0);
    const auto m = cob::model::parse_system(slurp(out));
    EXPECT_EQ(m.vars.size(), 4u);
    EXPECT_EQ(m.num_state_vars, 4u);
    for (const auto& f : m.locations[0].field)
        for (const auto& [mo, c] : f.terms())
            for (std::size_t k = 0; k < m.vars.size(); ++k)
                EXPECT_LE(mo.e[k], 1u);
}

TEST(Cli, CorpusTableRuns) {
    const auto r = run_cli("corpus " + kCorpus + " --table");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.out.find("ID"), std::string::npos);
    EXPECT_NE(r.out.find("demo"), std::string::npos);
    EXPECT_NE(r.out.find("toda3"), std::string::npos);
    EXPECT_EQ(r.out.find("drifted"), std::string::npos);
}

TEST(Pipeline, WithClockLayout) {
    const auto m = cob::model::parse_system(slurp(corpus("twospring.cob")));
    const auto c = cob::pipeline::with_clock(m);
    ASSERT_EQ(c.vars.size(), m.vars.size() + 1);
    EXPECT_EQ(c.num_state_vars, m.num_state_vars + 1);
    EXPECT_EQ(c.vars.name(c.num_state_vars - 1), "t");
    EXPECT_EQ(c.vars.name(c.vars.size() - 1), "k");  // params stay last
    const auto& f = c.locations[0].field;
    ASSERT_EQ(f.size(), c.num_state_vars);
    EXPECT_EQ(f.back(),
              cob::poly::Polynomial::constant(c.vars.size(),
                                              cob::exactalg::Rational(1)));
    ASSERT_TRUE(c.init_box.iv[c.num_state_vars - 1].is_point());
    EXPECT_EQ(*c.init_box.iv[c.num_state_vars - 1].lo,
              cob::exactalg::Rational(0));
}

TEST(Pipeline, WithClockLeavesDiscreteAlone) {
    const auto m = cob::model::parse_system(slurp(corpus("sumsquares.cob")));
    const auto c = cob::pipeline::with_clock(m);
    EXPECT_EQ(c.vars.size(), m.vars.size());
}

TEST(Pipeline, InitGridSolvesEqualitiesAndSweepsFreeVars) {
    const auto m = cob::model::parse_system(slurp(corpus("sumsquares.cob")));
    const auto grid = cob::pipeline::init_grid(m, 5);
    ASSERT_EQ(grid.size(), 5u);  // x = y = 0 fixed, k in {1..5}
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_EQ(grid[i][0], cob::exactalg::Rational(0));
        EXPECT_EQ(grid[i][1], cob::exactalg::Rational(0));
        EXPECT_EQ(grid[i][2], cob::exactalg::Rational(1 + int(i)));
    }
}

TEST(Pipeline, StateRelevantDimDropsParameterOnlyElements) {
    const auto m = cob::model::parse_system(slurp(corpus("geo.cob")));
    cob::pipeline::Options opt;
    const auto r = cob::pipeline::run_abstraction(m, opt);
    const auto& span = r.closure.spaces[r.m.init_location];
    EXPECT_EQ(span.dim(), 15u);
    EXPECT_EQ(cob::pipeline::state_relevant_dim(span, m.num_state_vars), 6u);
}

TEST(Report, DigestIgnoresTimings) {
    const auto src = slurp(corpus("powersum2.cob"));
    const auto m = cob::model::parse_system(src);
    cob::pipeline::Options opt;
    const auto r1 = cob::pipeline::run_abstraction(m, opt);
    const auto r2 = cob::pipeline::run_abstraction(m, opt);
    const auto j1 = cob::report::build_report(r1, nullptr, nullptr, opt, src);
    const auto j2 = cob::report::build_report(r2, nullptr, nullptr, opt, src);
    EXPECT_EQ(j1["digest"], j2["digest"]);
    auto a = j1;
    auto b = j2;
    a.erase("timings_ms");
    b.erase("timings_ms");
    EXPECT_EQ(a.dump(), b.dump());

    cob::pipeline::Options other = opt;
    other.degree_init = 3;
    const auto r3 = cob::pipeline::run_abstraction(m, other);
    const auto j3 = cob::report::build_report(r3, nullptr, nullptr, other, src);
    EXPECT_NE(j1["digest"], j3["digest"]);
}
