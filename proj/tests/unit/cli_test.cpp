#include <sstream>

#include <gtest/gtest.h>

#include "genbench/cli.hpp"
#include "genbench/util/files.hpp"
#include "support.hpp"

namespace genbench {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

TEST(Cli, HelpAndUsageErrors) {
    EXPECT_EQ(cli({"--help"}).code, 0);
    const auto unknown = cli({"frobnicate"});
    EXPECT_EQ(unknown.code, 1);
    EXPECT_NE(unknown.err.find("Usage"), std::string::npos) << unknown.err;
    EXPECT_EQ(cli({}).code, 1);
    EXPECT_EQ(cli({"ingest", "--images", "x"}).code, 1);
}

TEST(Cli, InvalidConfigNamesTheField) {
    TempDir dir;
    auto cfg = util::read_json(testing::config_file("genbench.toy.json"));
    cfg["seed"] = "forty-two";
    util::write_json(dir / "bad.json", cfg);
    const auto r = cli({"--out", (dir / "out").string(), "--config", (dir / "bad.json").string(), "plan"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("seed"), std::string::npos) << r.err;
    const auto missing = cli({"--config", (dir / "none.json").string(), "plan"});
    EXPECT_NE(missing.code, 0);
}

TEST(Cli, PlanListsEveryGridPoint) {
    TempDir dir;
    const auto r = cli({"--out", dir.path().string(), "--config", testing::config_file("genbench.toy.json").string(), "plan"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("toyflow|cfg=3|steps=25|toy4|seed=42\t200 samples"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("6 runs"), std::string::npos);
}

TEST(Cli, ScoreTableOneAgainstBoundsFixture) {
    const auto r = cli({"score", "--metrics", testing::fixture("table1.csv").string(), "--bounds",
                        testing::fixture("bounds_imagenet.json").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 26);
    EXPECT_NE(r.out.find("MeanFlow (B/4)|cfg=7|steps=25|imagenet|seed=42\t0.8560"), std::string::npos) << r.out;
}

TEST(Cli, ScoreWithoutBoundsFails) {
    TempDir dir;
    const auto r = cli({"--out", dir.path().string(), "score", "--metrics", testing::fixture("table1.csv").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("bounds"), std::string::npos) << r.err;
}

TEST(Cli, HeatmapWritesTenFiles) {
    TempDir dir;
    fs::copy_file(testing::fixture("meanflow_ablation.csv"), dir / "metrics.csv");
    fs::copy_file(testing::fixture("bounds_imagenet.json"), dir / "bounds.json");
    const auto r = cli({"heatmap", "--grid", dir.path().string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dir / "heatmaps")) files += e.is_regular_file();
    EXPECT_EQ(files, 10u);
    EXPECT_TRUE(fs::exists(dir / "heatmaps" / "heatmap_mmhm.csv"));
    EXPECT_TRUE(fs::exists(dir / "heatmaps" / "heatmap_fid.svg"));
}

TEST(Cli, BoundsAndReportFromMetricsCsv) {
    TempDir dir;
    const auto out = dir.path().string();
    const auto csv = testing::fixture("table1.csv").string();
    ASSERT_EQ(cli({"--out", out, "bounds", "--metrics", csv, "--dataset", "imagenet"}).code, 0);
    const auto reg = util::read_json(dir / "bounds.json");
    EXPECT_EQ(reg.at("metrics").at("FID").at("min"), 2.61);
    const auto r = cli({"--out", out, "report", "--metrics", csv});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto first = util::read_text(dir / "report" / "table.csv");
    ASSERT_EQ(cli({"--out", out, "report", "--metrics", csv}).code, 0);
    EXPECT_EQ(util::read_text(dir / "report" / "table.csv"), first);
    EXPECT_TRUE(fs::exists(dir / "report" / "table.txt"));
}

}  // namespace
}  // namespace genbench
