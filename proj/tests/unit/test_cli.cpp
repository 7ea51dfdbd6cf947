#include <cstdlib>
#include <regex>

#include <gtest/gtest.h>
#include <sys/wait.h>

#include "reconeval/pipeline/commands.hpp"
#include "support/fixtures.hpp"

using namespace reconeval;
using reconeval::testing::snapshot_tree;
using reconeval::testing::TempDir;

namespace {

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string("\"") + RECONEVAL_CLI_PATH + "\" " + args + " >\"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST(Cli, SynthThenEvaluate) {
    TempDir tmp;
    ASSERT_EQ(run_cli("synth --points 40 --cameras 3 --width 160 --height 120 --out " + q(tmp / "m"), tmp / "log"), 0);
    ASSERT_EQ(run_cli("evaluate --model " + q(tmp / "m") + " --skip-difps --skip-lpips --out " + q(tmp / "e"),
                      tmp / "log"),
              0);
    const auto report = nlohmann::json::parse(read_file_bytes(tmp / "e/report.json"));
    EXPECT_NEAR(report["rows"][0]["reprojection_error_recomputed"].get<double>(), 0.0, 1e-9);
    EXPECT_NE(read_file_bytes(tmp / "log").find("Reprojection Error"), std::string::npos);
}

TEST(Cli, InputErrorsExitTwo) {
    TempDir tmp;
    EXPECT_EQ(run_cli("", tmp / "log"), 2);
    EXPECT_EQ(run_cli("evaluate --model " + q(tmp / "nope") + " --skip-difps --skip-lpips --out " + q(tmp / "e"),
                      tmp / "log"),
              2);
    EXPECT_EQ(run_cli("synth --camera-model FISHEYE --out " + q(tmp / "m"), tmp / "log"), 2);
    EXPECT_EQ(run_cli("extract-frames --input " + q(tmp.path()) + " --stride 1 --exclude 5 --out " + q(tmp / "x"),
                      tmp / "log"),
              2);
    EXPECT_EQ(run_cli("preprocess --method wb-sky --frames " + q(tmp.path()) + " --out " + q(tmp / "p"), tmp / "log"), 2);
    EXPECT_NE(read_file_bytes(tmp / "log").find("preprocess/wb-sky"), std::string::npos);
}

TEST(Cli, StageFailureExitsThree) {
    TempDir tmp;
    ASSERT_EQ(run_cli("synth --points 20 --out " + q(tmp / "m"), tmp / "log"), 0);
    EXPECT_EQ(run_cli("evaluate --model " + q(tmp / "m") + " --out " + q(tmp / "e"), tmp / "log"), 3);
    EXPECT_NE(read_file_bytes(tmp / "log").find("metrics/difps"), std::string::npos);
}

TEST(Cli, ConfigFileSuppliesOptions) {
    TempDir tmp;
    write_file_bytes(tmp / "c.ini", "[synth]\npoints=25\ncameras=2\nseed=3\ntext=true\nout=" + (tmp / "m").string() + "\n");
    ASSERT_EQ(run_cli("--config " + q(tmp / "c.ini") + " synth", tmp / "log"), 0);
    const auto b = parse_sparse_model(tmp / "m", SparseFormat::Text);
    EXPECT_EQ(b.scene.points.size(), 25u);
    EXPECT_EQ(b.scene.frames.size(), 2u);
}

TEST(Cli, EffectiveConfigReproducesRun) {
    TempDir tmp;
    ASSERT_EQ(run_cli("synth --points 30 --cameras 3 --width 120 --height 90 --out " + q(tmp / "m"), tmp / "log"), 0);
    ASSERT_EQ(run_cli("evaluate --model " + q(tmp / "m") +
                          " --skip-difps --skip-lpips --background 10,20,30 --splat-radius 2 --workers 2 --out " +
                          q(tmp / "a"),
                      tmp / "log"),
              0);
    const auto ini = read_file_bytes(tmp / "a/effective_config.ini");
    EXPECT_EQ(ini.rfind("[evaluate]\n", 0), 0u);
    EXPECT_NE(ini.find("background=\"10,20,30\"\n"), std::string::npos);
    EXPECT_NE(ini.find("splat-radius=2\n"), std::string::npos);
    EXPECT_EQ(ini.find("workers"), std::string::npos);

    const std::string rerun = std::regex_replace(ini, std::regex("\nout=[^\n]*"), "\nout=" + (tmp / "b").string());
    write_file_bytes(tmp / "rerun.ini", rerun);
    ASSERT_EQ(run_cli("--config " + q(tmp / "rerun.ini") + " evaluate", tmp / "log"), 0);
    auto a = snapshot_tree(tmp / "a");
    auto b = snapshot_tree(tmp / "b");
    a.erase("effective_config.ini");
    b.erase("effective_config.ini");
    EXPECT_EQ(a, b);
}

TEST(Cli, ExtractFramesWithExclusion) {
    TempDir tmp;
    fs::create_directories(tmp / "src");
    for (int i = 0; i < 10; ++i) write_png(tmp / "src" / ("f" + std::to_string(i) + ".png"), Image(4, 4, 3, 1));
    ASSERT_EQ(run_cli("extract-frames --input " + q(tmp / "src") + " --stride 1 --exclude 0:5 --out " + q(tmp / "x"),
                      tmp / "log"),
              0);
    EXPECT_EQ(load_manifest(tmp / "x/manifest.json").included_count(), 5u);
}
