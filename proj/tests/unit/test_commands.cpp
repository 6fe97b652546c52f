#include "sarquad/commands.hpp"

#include "sarquad/outputs.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

using namespace sarquad;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

class Commands : public ::testing::Test {
protected:
    void SetUp() override {
        root_ = fs::temp_directory_path() /
                ("sarquad_cmd_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(root_);
        fs::create_directories(root_);
    }
    void TearDown() override { fs::remove_all(root_); }

    fs::path write_config(const std::string& name, const std::string& text) {
        const fs::path p = root_ / name;
        std::ofstream(p) << text;
        return p;
    }

    fs::path shipped(const std::string& name) const {
        const char* dir = std::getenv("SARQUAD_CONFIG_DIR");
        return fs::path(dir ? dir : "configs") / name;
    }

    CommandOptions options(const fs::path& config, const std::string& out) {
        CommandOptions o;
        o.config_path = config;
        o.out_dir = root_ / out;
        return o;
    }

    fs::path root_;
    std::ostringstream out_, err_;
};

const char* kSmall =
    "world.width = 16\n"
    "world.height = 6\n"
    "endurance = 120\n"
    "target.1.x = 6\n"
    "target.1.y = 1.5\n"
    "detector.false_positive_rate = 0.5\n";

nlohmann::json manifest(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "manifest.json")); }

}  // namespace

TEST_F(Commands, SimulateWritesArtifactsWithMatchingChecksums) {
    const fs::path cfg = write_config("small.cfg", kSmall);
    ASSERT_EQ(cmd_simulate(options(cfg, "a"), out_, err_), kExitOk) << err_.str();
    const fs::path dir = root_ / "a";
    const auto m = manifest(dir);
    EXPECT_EQ(m["seed"], 1);
    EXPECT_EQ(m["config_path"], cfg.string());
    EXPECT_EQ(m["config"]["world.width"], "16");
    for (const char* name : {"telemetry.csv", "detections.csv", "metrics.txt"}) {
        ASSERT_TRUE(fs::exists(dir / name)) << name;
        EXPECT_EQ(m["files"][name]["sha256"], sha256_hex(slurp(dir / name))) << name;
    }
    const std::string telemetry = slurp(dir / "telemetry.csv");
    EXPECT_EQ(telemetry.substr(0, telemetry.find('\n')), kTelemetryHeader);
    const std::string detections = slurp(dir / "detections.csv");
    EXPECT_EQ(detections.substr(0, detections.find('\n')), kDetectionsHeader);
    for (const auto& entry : fs::directory_iterator(dir)) {
        EXPECT_NE(entry.path().extension(), ".tmp");
    }
}

TEST_F(Commands, SimulateTwiceGivesIdenticalChecksums) {
    const fs::path cfg = write_config("small.cfg", kSmall);
    CommandOptions a = options(cfg, "a"), b = options(cfg, "b");
    a.seed = b.seed = 77;
    ASSERT_EQ(cmd_simulate(a, out_, err_), kExitOk);
    ASSERT_EQ(cmd_simulate(b, out_, err_), kExitOk);
    EXPECT_EQ(manifest(root_ / "a")["files"], manifest(root_ / "b")["files"]);
    EXPECT_EQ(manifest(root_ / "a")["seed"], 77);
}

TEST_F(Commands, SeedChangesOutputs) {
    const fs::path cfg = write_config("small.cfg", kSmall);
    CommandOptions a = options(cfg, "a"), b = options(cfg, "b");
    b.seed = 2;
    ASSERT_EQ(cmd_simulate(a, out_, err_), kExitOk);
    ASSERT_EQ(cmd_simulate(b, out_, err_), kExitOk);
    EXPECT_NE(manifest(root_ / "a")["files"]["telemetry.csv"], manifest(root_ / "b")["files"]["telemetry.csv"]);
}

TEST_F(Commands, ConfigErrorExitsTwoAndWritesNothing) {
    const fs::path cfg = write_config("bad.cfg", "cruise_speed = 5.0\n");
    EXPECT_EQ(cmd_simulate(options(cfg, "a"), out_, err_), kExitConfigError);
    EXPECT_NE(err_.str().find("cruise_speed"), std::string::npos);
    EXPECT_FALSE(fs::exists(root_ / "a"));
}

TEST_F(Commands, MissingConfigExitsOne) {
    EXPECT_EQ(cmd_simulate(options(root_ / "nope.cfg", "a"), out_, err_), kExitFailure);
}

TEST_F(Commands, DivergenceExitsThree) {
    const fs::path cfg = write_config("wild.cfg",
                                      "world.width = 16\nworld.height = 6\n"
                                      "pid.pitch.kp = 40\npid.pitch.kd = 0\npid.pitch.output_limit = 1\n");
    EXPECT_EQ(cmd_simulate(options(cfg, "a"), out_, err_), kExitDiverged) << err_.str();
    EXPECT_NE(err_.str().find("tick"), std::string::npos);
}

TEST_F(Commands, CompareTableListsPresetRates) {
    ASSERT_EQ(cmd_compare(options(shipped("default_mission.cfg"), "cmp"), {"ssd", "haar", "hog"}, out_, err_),
              kExitOk)
        << err_.str();
    std::istringstream table(slurp(root_ / "cmp" / "comparison.csv"));
    std::string line;
    std::getline(table, line);
    EXPECT_EQ(line.rfind("method,fps,sec_per_image,targets_detected,time_to_first_detection", 0), 0u);
    std::vector<std::string> fps;
    while (std::getline(table, line)) {
        const auto a = line.find(','), b = line.find(',', a + 1);
        fps.push_back(line.substr(a + 1, b - a - 1));
    }
    EXPECT_EQ(fps, (std::vector<std::string>{"3.003", "1.000", "0.053"}));
    for (const char* p : {"ssd", "haar", "hog"}) EXPECT_TRUE(fs::exists(root_ / "cmp" / p / "manifest.json"));
}

TEST_F(Commands, CompareRejectsUnknownProfile) {
    const fs::path cfg = write_config("small.cfg", kSmall);
    EXPECT_EQ(cmd_compare(options(cfg, "cmp"), {"ssd", "yolo"}, out_, err_), kExitConfigError);
}

TEST_F(Commands, SweepOverAlpha) {
    const fs::path cfg = write_config("small.cfg", kSmall);
    ASSERT_EQ(cmd_sweep(options(cfg, "sw"), "filter.alpha", {"0.9", "0.98"}, out_, err_), kExitOk) << err_.str();
    std::istringstream summary(slurp(root_ / "sw" / "summary.csv"));
    std::string header, r1, r2, extra;
    std::getline(summary, header);
    std::getline(summary, r1);
    std::getline(summary, r2);
    EXPECT_FALSE(std::getline(summary, extra));
    EXPECT_EQ(header.rfind("filter.alpha,", 0), 0u);
    EXPECT_NE(header.find("rms_roll_error"), std::string::npos);
    EXPECT_EQ(r1.rfind("0.9,", 0), 0u);
    EXPECT_EQ(r2.rfind("0.98,", 0), 0u);
    auto tail = [](const std::string& row) { return row.substr(row.rfind(',', row.rfind(',') - 1)); };
    EXPECT_NE(tail(r1), tail(r2));
    EXPECT_EQ(manifest(root_ / "sw" / "filter.alpha=0.9")["config"]["filter.alpha"], "0.9");
}

TEST_F(Commands, SweepRejectsBadValue) {
    const fs::path cfg = write_config("small.cfg", kSmall);
    EXPECT_EQ(cmd_sweep(options(cfg, "sw"), "filter.alpha", {"0.9", "7"}, out_, err_), kExitConfigError);
    EXPECT_EQ(cmd_sweep(options(cfg, "sw"), "filter.alpah", {"0.9"}, out_, err_), kExitConfigError);
}

TEST_F(Commands, OutputDirectoryResolution) {
    CommandOptions o;
    o.config_path = "some/where/mission_a.cfg";
    o.out_dir = "explicit";
    EXPECT_EQ(resolve_output_dir(o), fs::path("explicit"));
    o.out_dir.reset();
    ::setenv("SAR_QUAD_OUT", root_.c_str(), 1);
    EXPECT_EQ(resolve_output_dir(o), root_ / "mission_a");
    ::unsetenv("SAR_QUAD_OUT");
    EXPECT_EQ(resolve_output_dir(o), fs::path("sar_quad_out") / "mission_a");
}
