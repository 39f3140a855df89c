// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <sys/wait.h>
#include <unistd.h>

#include "test_support.hpp"
#include "vmetrics/flo_io.hpp"
#include "vmetrics/frame_io.hpp"
#include "vmetrics/runner.hpp"

using namespace vmetrics;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir(const std::string &tag) {
        path = fs::temp_directory_path() /
               ("vmetrics_test_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

// Writes a short textured sequence with per-frame cyclic drift.
void write_sequence(const fs::path &dir, int length, int h, int w,
                    int dx_per_frame, uint32_t seed = 7) {
    fs::create_directories(dir);
    Image base = testsupport::textured_image(h, w, seed);
    for (int t = 0; t < length; ++t) {
        Image frame = testsupport::cyclic_shift(base, 0, t * dx_per_frame);
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%04d.pgm", t);
        write_pnm_file(frame, (dir / name).string());
    }
}

void write_masks(const fs::path &dir, int length, int h, int w) {
    fs::create_directories(dir);
    for (int t = 0; t < length; ++t) {
        Image gray(h, w, 1);
        for (int y = h / 4; y < 3 * h / 4; ++y)
            for (int x = w / 4; x < 3 * w / 4; ++x) gray.at(y, x) = 1.0;
        char name[32];
        std::snprintf(name, sizeof(name), "mask_%04d.pgm", t);
        write_pnm_file(gray, (dir / name).string());
    }
}

std::vector<uint8_t> slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::vector<uint8_t>(std::istreambuf_iterator<char>(in), {});
}

FlowParams fast_params() {
    FlowParams p;
    p.pyramid_levels = 2;
    p.iterations_per_level = 30;
    return p;
}

} // namespace

TEST_CASE("run_flow_export") {
    TempDir tmp("flowexp");
    write_sequence(tmp.path / "frames", 4, 32, 32, 1);

    SUBCASE("file naming covers t = T .. L-1 per horizon") {
        run_flow_export((tmp.path / "frames").string(),
                        (tmp.path / "flows").string(), {1, 2}, fast_params());
        for (const char *name : {"flow_T1_00001.flo", "flow_T1_00002.flo",
                                 "flow_T1_00003.flo", "flow_T2_00002.flo",
                                 "flow_T2_00003.flo"})
            CHECK(fs::exists(tmp.path / "flows" / name));
        CHECK_FALSE(fs::exists(tmp.path / "flows" / "flow_T1_00000.flo"));
        CHECK_FALSE(fs::exists(tmp.path / "flows" / "flow_T2_00001.flo"));
        FlowField f = read_flo_file((tmp.path / "flows" / "flow_T1_00001.flo").string());
        CHECK(f.height == 32);
        CHECK(f.width == 32);
    }
    SUBCASE("reruns produce identical bytes, any thread count") {
        run_flow_export((tmp.path / "frames").string(),
                        (tmp.path / "flows_a").string(), {1}, fast_params(), 1);
        run_flow_export((tmp.path / "frames").string(),
                        (tmp.path / "flows_b").string(), {1}, fast_params(), 4);
        for (int t = 1; t <= 3; ++t) {
            auto name = imported_flow_name(1, t);
            CHECK(slurp(tmp.path / "flows_a" / name) ==
                  slurp(tmp.path / "flows_b" / name));
        }
    }
    SUBCASE("horizon exceeding the sequence is a validation error") {
        CHECK_THROWS_WITH_AS(
            run_flow_export((tmp.path / "frames").string(),
                            (tmp.path / "bad").string(), {4}, fast_params()),
            doctest::Contains("horizon exceeds sequence"), ValidationError);
    }
}

TEST_CASE("run_report") {
    TempDir tmp("report");
    const int length = 4, h = 32, w = 32;
    write_sequence(tmp.path / "gt", length, h, w, 1);
    write_masks(tmp.path / "masks", length, h, w);

    RunSpec spec;
    spec.gt_dir = (tmp.path / "gt").string();
    spec.gen_dir = (tmp.path / "gt").string();
    spec.mask_gt_dir = (tmp.path / "masks").string();
    spec.mask_gen_dir = (tmp.path / "masks").string();
    spec.horizons = {1, 2};
    spec.flow_params = fast_params();

    SUBCASE("self comparison yields exact zeros and perfect scores") {
        MetricReport report = run_report(spec);
        for (int T : {1, 2})
            for (MaskMode mode : {MaskMode::fullframe, MaskMode::foreground}) {
                auto v = report.find("dfci", T, mode);
                REQUIRE(v.has_value());
                CHECK(*v == 0.0);
            }
        CHECK(*report.find("silhouette", std::nullopt, MaskMode::foreground) == 1.0);
        CHECK(*report.find("l1", std::nullopt, MaskMode::fullframe) == 0.0);
        CHECK(*report.find("psnr", std::nullopt, MaskMode::fullframe) == kPsnrCapDb);
        CHECK(*report.find("ssim", std::nullopt, MaskMode::fullframe) ==
              doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("validation failures leave no output behind") {
        spec.mask_gt_dir = (tmp.path / "no_such_masks").string();
        spec.out_path = (tmp.path / "out.json").string();
        CHECK_THROWS_AS(run_report_to_file(spec), ValidationError);
        CHECK_FALSE(fs::exists(spec.out_path));
    }
    SUBCASE("imported flow requires every .flo to exist up front") {
        spec.use_imported_flow = true;
        spec.gt_flow_dir = (tmp.path / "flows_gt").string();
        spec.gen_flow_dir = (tmp.path / "flows_gt").string();
        run_flow_export(spec.gt_dir, spec.gt_flow_dir, {1}, fast_params());
        // horizon 2 files were never exported
        CHECK_THROWS_AS(run_report(spec), ValidationError);
        spec.horizons = {1};
        MetricReport report = run_report(spec);
        CHECK(*report.find("dfci", 1, MaskMode::fullframe) == 0.0);
    }
}

TEST_CASE("parse_run_spec_json") {
    const char *text = R"({
        "gt": "a", "gen": "b", "masks_gt": "c", "masks_gen": "d",
        "horizons": [2, 4], "mode": "foreground", "flow": "imported",
        "flows_gt": "e", "flows_gen": "f", "threads": 3,
        "mask_threshold": 200, "format": "csv",
        "flow_params": {"smoothness_alpha": 20.0, "iterations_per_level": 60}
    })";
    RunSpec spec = parse_run_spec_json(text);
    CHECK(spec.gt_dir == "a");
    CHECK(spec.gen_dir == "b");
    CHECK(spec.mask_gt_dir == "c");
    CHECK(spec.mask_gen_dir == "d");
    CHECK(spec.horizons == std::vector<int>{2, 4});
    REQUIRE(spec.modes.size() == 1);
    CHECK(spec.modes[0] == MaskMode::foreground);
    CHECK(spec.use_imported_flow);
    CHECK(spec.gt_flow_dir == "e");
    CHECK(spec.gen_flow_dir == "f");
    CHECK(spec.threads == 3);
    CHECK(spec.mask_threshold == 200);
    CHECK(spec.format == ReportFormat::csv);
    CHECK(spec.flow_params.smoothness_alpha == 20.0);
    CHECK(spec.flow_params.iterations_per_level == 60);

    CHECK_THROWS_AS(parse_run_spec_json("not json"), ValidationError);
    CHECK_THROWS_AS(parse_run_spec_json(R"({"mode": "sideways"})"), ValidationError);
}

#ifdef CLI_BINARY
TEST_CASE("cli binary") {
    SUBCASE("self-check exits 0") {
        std::string cmd = std::string(CLI_BINARY) + " self-check > /dev/null 2>&1";
        int rc = std::system(cmd.c_str());
        REQUIRE(rc != -1);
        CHECK(WEXITSTATUS(rc) == 0);
    }
    SUBCASE("negative control: injected gradient fault exits 3") {
        std::string cmd = "VMETRICS_SELFCHECK_FAULT=lambda_sign " +
                          std::string(CLI_BINARY) + " self-check > /dev/null 2>&1";
        int rc = std::system(cmd.c_str());
        REQUIRE(rc != -1);
        CHECK(WEXITSTATUS(rc) == 3);
    }
    SUBCASE("unknown subcommand exits 1") {
        std::string cmd = std::string(CLI_BINARY) + " frobnicate > /dev/null 2>&1";
        int rc = std::system(cmd.c_str());
        REQUIRE(rc != -1);
        CHECK(WEXITSTATUS(rc) == 1);
    }
}
#endif
