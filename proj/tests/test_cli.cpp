#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "orliczlab/app.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "orliczlab");
    std::ostringstream out, err;
    const int code = orlicz::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path temp(const std::string& name) { return fs::temp_directory_path() / ("orliczlab_test_" + name); }

}  // namespace

TEST(Cli, NfunReportQuadratic) {
    const Result r = run({"nfun-report", "--phi", "power:2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_NEAR(j["delta2"].get<double>(), 4.0, 1e-9);
    EXPECT_EQ(j["seed"].get<int>(), 1);
}

TEST(Cli, UnknownFlagFails) {
    const Result r = run({"nfun-report", "--phi", "power:2", "--bogus", "1"});
    EXPECT_EQ(r.code, 1);
    EXPECT_FALSE(r.err.empty());
    EXPECT_EQ(run({"nfun-report", "--phi", "cubic"}).code, 1);
}

TEST(Cli, AffineEllipticPipeline) {
    const fs::path field = temp("affine.fld");
    const Result solve = run({"solve-elliptic", "--phi", "power:3", "--grid", "33", "--bc", "affine", "--tol", "1e-12",
                              "--out", field.string()});
    ASSERT_EQ(solve.code, 0) << solve.err;
    const fs::path report = temp("affine.json");
    const Result verify =
        run({"verify-degiorgi", "--phi", "power:3", "--field", field.string(), "--report", report.string()});
    ASSERT_EQ(verify.code, 0) << verify.err << verify.out;
    EXPECT_EQ(verify.out.rfind("k,W_k,Y_k,Z_k,C_k\n", 0), 0u);
    std::ifstream in(report);
    const json j = json::parse(in);
    EXPECT_NEAR(j["bound_ratio"].get<double>(), 1.0, 1e-8);
    EXPECT_TRUE(j["passed"].get<bool>());
    fs::remove(field);
    fs::remove(report);
}

TEST(Cli, ScanCsvIsReproducible) {
    const std::vector<std::string> args{"equivalence-scan", "--phi", "power:1.5", "--which", "d2",
                                        "--trials", "300", "--seed", "42", "--format", "csv"};
    const Result a = run(args);
    const Result b = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out.find(",42\n"), std::string::npos);
    auto other = args;
    other[8] = "43";
    EXPECT_NE(run(other).out, a.out);
}

TEST(Cli, ConfigFilePrecedence) {
    const fs::path cfg = temp("run.cfg");
    {
        std::ofstream f(cfg);
        f << "# defaults for the report\nphi = power:3\nsamples = 32\n";
    }
    const Result from_file = run({"nfun-report", "--config", cfg.string()});
    ASSERT_EQ(from_file.code, 0) << from_file.err;
    EXPECT_NEAR(json::parse(from_file.out)["delta2"].get<double>(), 8.0, 1e-9);
    EXPECT_EQ(json::parse(from_file.out)["samples"].get<int>(), 32);
    const Result flag_wins = run({"nfun-report", "--config", cfg.string(), "--phi", "power:2"});
    EXPECT_NEAR(json::parse(flag_wins.out)["delta2"].get<double>(), 4.0, 1e-9);
    fs::remove(cfg);
}

TEST(Cli, MissingFieldFileIsAnError) {
    EXPECT_EQ(run({"verify-degiorgi", "--phi", "power:2", "--field", temp("missing.fld").string()}).code, 1);
}
