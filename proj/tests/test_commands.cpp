#include "dsde/commands.hpp"
#include "dsde/error.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using dsde::CommandInput;
using dsde::MethodSelection;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("dsde_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Data rows of a CSV, with '#' lines and the column header removed.
std::vector<std::vector<double>> rows(const fs::path& p, std::string* header = nullptr) {
    std::ifstream in(p);
    std::string line;
    std::vector<std::vector<double>> out;
    bool seen_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!seen_header) {
            seen_header = true;
            if (header) *header = line;
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            row.push_back(cell.empty() || *end != '\0' ? NAN : v);
        }
        out.push_back(row);
    }
    return out;
}

CommandInput example_input(const std::string& id, const fs::path& out) {
    CommandInput in;
    in.config.example = id;
    in.config.out = out;
    return in;
}

}  // namespace

TEST(TransformCommand, DumpShape) {
    const auto dir = fresh_dir("dump_shape");
    const auto path = dsde::cmd_transform(example_input("ex2", dir));
    EXPECT_EQ(path, dir / "transform_dump.csv");
    std::string header;
    const auto r = rows(path, &header);
    EXPECT_EQ(header, "x,g,g_prime,g_second_left,g_second_right,mu,sigma,mu_tilde,sigma_tilde");
    ASSERT_EQ(r.size(), 2001u);
    EXPECT_EQ(r.front()[0], -3.0);
    EXPECT_EQ(r.back()[0], 3.0);
    for (const auto& row : r) ASSERT_EQ(row.size(), 9u);
    EXPECT_NE(slurp(path).find("# kappa: 0.0625"), std::string::npos);
}

TEST(TransformCommand, TransformedDriftHasNoJumps) {
    const auto dir = fresh_dir("dump_jumps");
    const auto r = rows(dsde::cmd_transform(example_input("ex2", dir)));
    int mu_jumps = 0;
    double max_tilde_step = 0.0;
    for (std::size_t i = 1; i < r.size(); ++i) {
        if (std::fabs(r[i][5] - r[i - 1][5]) > 0.5) ++mu_jumps;
        max_tilde_step = std::max(max_tilde_step, std::fabs(r[i][7] - r[i - 1][7]));
    }
    EXPECT_EQ(mu_jumps, 4);
    // Grid spacing 0.003 times the steepest slope of μ̃ (≈ 180 near −1).
    EXPECT_LT(max_tilde_step, 0.75);
}

TEST(TransformCommand, IdentityWithoutJumps) {
    const auto dir = fresh_dir("dump_identity");
    CommandInput in;
    in.config.out = dir;
    in.file_problem = dsde::SdeProblem{dsde::PiecewiseFn::parse({0.0}, {"-x", "-x"}),
                                       dsde::PiecewiseFn::constant(1.0), 0.0, 1.0, 1e-6};
    const auto r = rows(dsde::cmd_transform(in));
    for (const auto& row : r) {
        EXPECT_EQ(row[1], row[0]);
        EXPECT_EQ(row[2], 1.0);
        EXPECT_EQ(row[3], 0.0);
        EXPECT_EQ(row[4], 0.0);
        EXPECT_EQ(row[7], row[5]);
    }
}

TEST(TransformCommand, CurvatureAtBreakpointIsAlpha) {
    const auto dir = fresh_dir("dump_alpha");
    const auto r = rows(dsde::cmd_transform(example_input("ex1", dir)));
    const auto& mid = r[1000];
    EXPECT_EQ(mid[0], 0.0);
    EXPECT_EQ(mid[4], 2.0);
    EXPECT_EQ(mid[3], -2.0);
    EXPECT_EQ(mid[7], 0.0);
}

TEST(TransformCommand, RejectsSeveralKappas) {
    auto in = example_input("ex1", fresh_dir("dump_kappas"));
    in.config.kappas = {0.5, 0.25};
    EXPECT_THROW(dsde::cmd_transform(in), dsde::ValidationError);
}

TEST(ConvergenceCommand, OutputsAreDeterministic) {
    auto in = example_input("ex1", fresh_dir("conv_a"));
    in.config.paths = 64;
    in.config.levels = std::pair{3, 7};
    in.config.kappas = {1.0 / 16.0, 1.0 / 64.0};
    const auto reports = dsde::cmd_convergence(in);
    ASSERT_EQ(reports.size(), 3u);
    EXPECT_EQ(reports[0].method, dsde::Method::Em);

    const auto first_csv = slurp(in.config.out / "errors.csv");
    const auto first_json = slurp(in.config.out / "summary.json");
    in.config.out = fresh_dir("conv_b");
    in.config.threads = 3;
    dsde::cmd_convergence(in);
    EXPECT_EQ(slurp(in.config.out / "errors.csv"), first_csv);
    EXPECT_EQ(slurp(in.config.out / "summary.json"), first_json);

    std::string header;
    const auto r = rows(in.config.out / "errors.csv", &header);
    EXPECT_EQ(header, "method,kappa,level,delta,l2_error,paths,seed");
    EXPECT_EQ(r.size(), 12u);
    EXPECT_NE(first_csv.find("\nem,,4,0.0625,"), std::string::npos);
    EXPECT_NE(first_csv.find("\nemt,0.015625,7,0.0078125,"), std::string::npos);
}

TEST(ConvergenceCommand, SummaryFields) {
    auto in = example_input("ex3", fresh_dir("conv_summary"));
    in.config.paths = 32;
    in.config.levels = std::pair{2, 5};
    in.config.method = MethodSelection::Emt;
    dsde::cmd_convergence(in);
    const auto j = nlohmann::json::parse(slurp(in.config.out / "summary.json"));
    EXPECT_EQ(j["config"]["problem"], "ex3");
    EXPECT_EQ(j["config"]["paths"], "32");
    EXPECT_EQ(j["config"]["seed"], "42");
    ASSERT_EQ(j["results"].size(), 1u);
    const auto& res = j["results"][0];
    EXPECT_EQ(res["method"], "emt");
    EXPECT_EQ(res["kappa"], 0.0625);
    EXPECT_TRUE(res["fitted_order"].is_number());
    EXPECT_EQ(res["levels"].size(), 3u);
    EXPECT_TRUE(res["levels"][0].contains("sq_diff_stderr"));
    EXPECT_TRUE(res["warnings"].is_array());
    const auto defaults = j["non_paper_defaults"].get<std::vector<std::string>>();
    EXPECT_NE(std::find(defaults.begin(), defaults.end(), "seed"), defaults.end());
}

TEST(SimulateCommand, RowsAndMeans) {
    auto in = example_input("ex1", fresh_dir("simulate"));
    in.config.paths = 4000;
    in.config.level = 6;
    in.config.x0 = 0.0;
    const auto emt = rows(dsde::cmd_simulate(in));
    ASSERT_EQ(emt.size(), 4000u);
    double sum_emt = 0.0;
    for (std::size_t i = 0; i < emt.size(); ++i) {
        EXPECT_EQ(emt[i][0], double(i));
        sum_emt += emt[i][1];
    }
    // Symmetric drift and start: mean zero, terminal sd below 1.
    EXPECT_NEAR(sum_emt / 4000.0, 0.0, 4.0 / std::sqrt(4000.0));

    in.config.method = MethodSelection::Em;
    const auto em = rows(dsde::cmd_simulate(in));
    double sum_em = 0.0;
    for (const auto& row : em) sum_em += row[1];
    EXPECT_NEAR(sum_em / 4000.0, sum_emt / 4000.0, 0.05);

    in.config.method = MethodSelection::Both;
    EXPECT_THROW(dsde::cmd_simulate(in), dsde::ValidationError);
}

TEST(Commands, DescribeRunEchoesSettings) {
    dsde::RunConfig c;
    c.example = "ex2";
    const auto e = dsde::resolve(c, MethodSelection::Both);
    std::vector<std::string> d;
    const auto p = dsde::resolve_problem(c, std::nullopt, d);
    const auto echo = dsde::describe_run(e, p);
    std::vector<std::string> keys;
    for (const auto& kv : echo) keys.push_back(kv.first);
    for (const char* k : {"problem", "drift.breakpoints", "x0", "T", "method", "kappa", "paths", "levels", "seed"}) {
        EXPECT_NE(std::find(keys.begin(), keys.end(), k), keys.end()) << k;
    }
}
