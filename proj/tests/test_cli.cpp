#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "friable/cli.hpp"

using namespace friable;
using Json = nlohmann::ordered_json;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "friable_lab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run_command(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("friable_cli_" + std::to_string(::getpid()) + "_" + name);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

TEST(Cli, CountPolyExact) {
    const auto r = run({"count", "--kind", "poly", "--q", "3", "--n", "4", "--m", "2", "--oracle"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = Json::parse(r.out);
    EXPECT_EQ(j["psi"], "39");
    EXPECT_EQ(j["total"], "81");
    EXPECT_EQ(j["prob_num"], "13");
    EXPECT_EQ(j["prob_den"], "27");
    EXPECT_TRUE(j["oracle_agrees"].get<bool>());
    EXPECT_NEAR(j["prob_float"]["approx"].get<double>(), 13.0 / 27, 1e-16);
    EXPECT_EQ(j["config"]["command"], "count");
    EXPECT_EQ(j["config"]["oracle"], true);
    EXPECT_EQ(j["config"]["float"], false);
}

TEST(Cli, CountPermFloat) {
    const auto r = run({"count", "--kind", "perm", "--n", "6", "--m", "3", "--float"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = Json::parse(r.out);
    EXPECT_EQ(j["mode"], "float");
    EXPECT_NEAR(j["prob_float"]["approx"].get<double>(), 276.0 / 720, 1e-15);
}

TEST(Cli, Dickman) {
    const auto r = run({"dickman", "--u", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = Json::parse(r.out);
    EXPECT_NEAR(j["rho"]["approx"].get<double>(), 1.0 - std::log(2.0), 1e-15);
    EXPECT_NEAR(j["xi"]["approx"].get<double>(), 1.2564312086261697, 1e-14);
    EXPECT_NEAR(j["config"]["rho_tolerance"].get<double>(), 1e-14, 0);

    const auto grid = run({"dickman", "--u-grid", "1:3:0.5"});
    ASSERT_EQ(grid.code, 0) << grid.err;
    const auto t = chart::parse_csv(grid.out);
    EXPECT_EQ(t.rows.size(), 5u);
    EXPECT_EQ(run({"dickman", "--u", "2", "--tol", "1e-20"}).code, 2);
}

TEST(Cli, SaddleAndRatio) {
    const auto s = run({"saddle", "--q", "2", "--n", "30", "--m", "15"});
    ASSERT_EQ(s.code, 0) << s.err;
    EXPECT_EQ(Json::parse(s.out)["applicable_theorem"], "Thm1.2");
    const auto r = run({"ratio", "--q", "2", "--n", "30", "--m", "15"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(Json::parse(r.out)["ratio_minus_one"]["approx"].get<double>(), 0.0014204810900164632, 1e-17);
}

TEST(Cli, Gap) {
    const auto r = run({"gap", "--q", "2", "--n", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = Json::parse(r.out);
    EXPECT_EQ(j["gap_num"], "1");
    EXPECT_EQ(j["gap_den"], "4");
}

TEST(Cli, VerifyCounterexample) {
    const auto r = run({"verify", "--suite", "counterexample", "--report", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = Json::parse(r.out);
    EXPECT_TRUE(j["passed"].get<bool>());
    EXPECT_FALSE(j["exact_failure"].get<bool>());
    EXPECT_EQ(j["suites"][0]["suite_id"], "counterexample");
    const auto csv = run({"verify", "--suite", "gap", "--n-max", "12", "--report", "csv"});
    ASSERT_EQ(csv.code, 0) << csv.err;
    const auto table = chart::parse_csv(csv.out);
    EXPECT_EQ(table.header.size(), 7u);
    EXPECT_NO_THROW(table.column("detail"));
}

TEST(Cli, CensusCsv) {
    const auto r = run({"census", "--q", "2", "--d-max", "5"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "d,pi_q_d\n1,2\n2,1\n3,2\n4,3\n5,6\n");
}

TEST(Cli, SweepThenChart) {
    const auto csv = temp_path("sweep.csv");
    const auto svg = temp_path("chart.svg");
    const auto s = run({"sweep", "--kind", "gap", "--q-list", "2,3", "--n-range", "2:12", "--out", csv.string()});
    ASSERT_EQ(s.code, 0) << s.err;
    const auto table = chart::parse_csv(slurp(csv));
    EXPECT_EQ(table.rows.size(), 22u);
    const auto c = run({"chart", "--in", csv.string(), "--x", "n", "--y", table.header.back(), "--out", svg.string()});
    ASSERT_EQ(c.code, 0) << c.err;
    const auto first = slurp(svg);
    EXPECT_EQ(first.rfind("<svg", 0), 0u);
    ASSERT_EQ(run({"chart", "--in", csv.string(), "--x", "n", "--y", table.header.back(), "--out", svg.string()}).code, 0);
    EXPECT_EQ(slurp(svg), first);
    std::filesystem::remove(csv);
    std::filesystem::remove(svg);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"count", "--kind", "perm", "--n", "5"}).code, 2);
    const auto bad_q = run({"saddle", "--q", "6", "--n", "5", "--m", "2"});
    EXPECT_EQ(bad_q.code, 2);
    EXPECT_NE(bad_q.err.find("NotAPrimePower"), std::string::npos);
    EXPECT_EQ(run({"chart", "--in", "/nonexistent.csv", "--x", "a", "--y", "b"}).code, 2);
    EXPECT_EQ(run({"sweep", "--kind", "count", "--m-rule", "wat"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, MRules) {
    EXPECT_EQ(cli::apply_m_rule("all", 3), (std::vector<unsigned>{1, 2, 3}));
    EXPECT_EQ(cli::apply_m_rule("fixed:4", 10), (std::vector<unsigned>{4}));
    EXPECT_EQ(cli::apply_m_rule("40", 10), (std::vector<unsigned>{10}));
    EXPECT_EQ(cli::apply_m_rule("2*log n", 100), (std::vector<unsigned>{9}));
    EXPECT_THROW(cli::apply_m_rule("0", 5), Error);
    EXPECT_EQ(cli::parse_range("3:7"), (std::pair<unsigned, unsigned>{3, 7}));
    EXPECT_THROW(cli::parse_range("7:3"), Error);
}

TEST(Cli, BinaryExitStatus) {
    const std::string exe = FRIABLE_LAB_EXE;
    const std::string sink = " > /dev/null 2>&1";
    auto status = [](int raw) { return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1; };
    EXPECT_EQ(status(std::system((exe + " count --kind poly --q 3 --n 4 --m 2" + sink).c_str())), 0);
    EXPECT_EQ(status(std::system((exe + " count --kind poly --q 6 --n 4 --m 2" + sink).c_str())), 2);
    EXPECT_EQ(status(std::system((exe + " verify --suite counterexample" + sink).c_str())), 0);
}
