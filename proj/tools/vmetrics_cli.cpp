// SPDX-License-Identifier: Apache-2.0
//
// vmetrics: flow export, Table-style metric reports, and kernel self-check
// for ground-truth vs generated human-centric video sequences.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "vmetrics/runner.hpp"
#include "vmetrics/self_check.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitCompute = 2;
constexpr int kExitSelfCheck = 3;

std::string read_text_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw vmetrics::ValidationError("cannot open spec file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int run_self_check() {
    vmetrics::SelfCheckOptions options;
    // hidden negative-control hook used by the test suite
    if (const char *fault = std::getenv("VMETRICS_SELFCHECK_FAULT");
        fault && std::string(fault) == "lambda_sign")
        options.fault_flip_lambda_sign = true;
    bool all_ok = true;
    for (const auto &r : vmetrics::run_self_check(options)) {
        std::printf("%-28s %s%s%s\n", r.name.c_str(),
                    r.passed ? "pass" : "FAIL", r.detail.empty() ? "" : "  ",
                    r.detail.c_str());
        all_ok = all_ok && r.passed;
    }
    return all_ok ? kExitOk : kExitSelfCheck;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Evaluation toolkit for human-centric generated video"};
    app.require_subcommand(1);

    // flow
    auto *flow_cmd = app.add_subcommand(
        "flow", "Compute .flo files for every (t-T, t) frame pair");
    std::string frames_dir, flow_out;
    std::vector<int> flow_horizons{1};
    vmetrics::FlowParams flow_params;
    int flow_threads = 1;
    flow_cmd->add_option("--frames", frames_dir, "Frame directory or %0Nd pattern")
        ->required();
    flow_cmd->add_option("--out", flow_out, "Output directory")->required();
    flow_cmd->add_option("--horizons", flow_horizons, "Temporal horizons T")
        ->delimiter(',');
    flow_cmd->add_option("--threads", flow_threads, "Worker threads");
    flow_cmd->add_option("--pyramid-levels", flow_params.pyramid_levels,
                         "Pyramid levels (0 = auto)");
    flow_cmd->add_option("--scale-factor", flow_params.scale_factor, "Pyramid scale");
    flow_cmd->add_option("--alpha", flow_params.smoothness_alpha,
                         "Smoothness weight");
    flow_cmd->add_option("--iterations", flow_params.iterations_per_level,
                         "Relaxation iterations per level");
    flow_cmd->add_option("--presmooth-sigma", flow_params.presmooth_sigma,
                         "Pre-smoothing Gaussian sigma");

    // report
    auto *report_cmd = app.add_subcommand(
        "report", "Evaluate all metrics over a gt/gen video pair");
    vmetrics::RunSpec spec;
    std::string mode = "both", flow_source = "builtin", format = "json";
    std::string spec_path;
    report_cmd->add_option("--spec", spec_path, "JSON run-spec file");
    report_cmd->add_option("--gt", spec.gt_dir, "Ground-truth frame directory");
    report_cmd->add_option("--gen", spec.gen_dir, "Generated frame directory");
    report_cmd->add_option("--masks-gt", spec.mask_gt_dir, "Ground-truth masks");
    report_cmd->add_option("--masks-gen", spec.mask_gen_dir, "Generated masks");
    report_cmd->add_option("--horizons", spec.horizons, "Temporal horizons T")
        ->delimiter(',');
    report_cmd->add_option("--mode", mode, "fullframe|foreground|both")
        ->check(CLI::IsMember({"fullframe", "foreground", "both"}));
    report_cmd->add_option("--flow", flow_source, "builtin|imported")
        ->check(CLI::IsMember({"builtin", "imported"}));
    report_cmd->add_option("--flows-gt", spec.gt_flow_dir,
                           "Imported .flo directory for gt");
    report_cmd->add_option("--flows-gen", spec.gen_flow_dir,
                           "Imported .flo directory for gen");
    report_cmd->add_option("--format", format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    report_cmd->add_option("--threads", spec.threads, "Worker threads");
    report_cmd->add_option("--mask-threshold", spec.mask_threshold,
                           "8-bit mask binarization threshold");
    report_cmd->add_option("--out", spec.out_path, "Report output path");
    report_cmd->add_option("--pyramid-levels", spec.flow_params.pyramid_levels,
                           "Pyramid levels (0 = auto)");
    report_cmd->add_option("--scale-factor", spec.flow_params.scale_factor,
                           "Pyramid scale");
    report_cmd->add_option("--alpha", spec.flow_params.smoothness_alpha,
                           "Smoothness weight");
    report_cmd->add_option("--iterations", spec.flow_params.iterations_per_level,
                           "Relaxation iterations per level");
    report_cmd->add_option("--presmooth-sigma", spec.flow_params.presmooth_sigma,
                           "Pre-smoothing Gaussian sigma");

    // self-check
    auto *check_cmd = app.add_subcommand(
        "self-check", "Run the oracle/gradient/round-trip suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (flow_cmd->parsed()) {
            vmetrics::run_flow_export(frames_dir, flow_out, flow_horizons,
                                      flow_params, flow_threads);
            return kExitOk;
        }
        if (report_cmd->parsed()) {
            if (!spec_path.empty()) {
                vmetrics::RunSpec from_file =
                    vmetrics::parse_run_spec_json(read_text_file(spec_path));
                // flags given on the command line win over the spec file
                if (spec.gt_dir.empty()) spec.gt_dir = from_file.gt_dir;
                if (spec.gen_dir.empty()) spec.gen_dir = from_file.gen_dir;
                if (spec.mask_gt_dir.empty()) spec.mask_gt_dir = from_file.mask_gt_dir;
                if (spec.mask_gen_dir.empty())
                    spec.mask_gen_dir = from_file.mask_gen_dir;
                if (!report_cmd->count("--horizons"))
                    spec.horizons = from_file.horizons;
                if (!report_cmd->count("--mode")) spec.modes = from_file.modes;
                if (!report_cmd->count("--flow"))
                    spec.use_imported_flow = from_file.use_imported_flow;
                if (spec.gt_flow_dir.empty()) spec.gt_flow_dir = from_file.gt_flow_dir;
                if (spec.gen_flow_dir.empty())
                    spec.gen_flow_dir = from_file.gen_flow_dir;
                if (!report_cmd->count("--format")) spec.format = from_file.format;
                if (!report_cmd->count("--threads")) spec.threads = from_file.threads;
                if (!report_cmd->count("--mask-threshold"))
                    spec.mask_threshold = from_file.mask_threshold;
                if (spec.out_path.empty()) spec.out_path = from_file.out_path;
                if (!report_cmd->count("--pyramid-levels") &&
                    !report_cmd->count("--scale-factor") &&
                    !report_cmd->count("--alpha") &&
                    !report_cmd->count("--iterations") &&
                    !report_cmd->count("--presmooth-sigma"))
                    spec.flow_params = from_file.flow_params;
            }
            if (report_cmd->count("--mode")) {
                if (mode == "both")
                    spec.modes = {vmetrics::MaskMode::fullframe,
                                  vmetrics::MaskMode::foreground};
                else
                    spec.modes = {vmetrics::mask_mode_from_string(mode)};
            }
            if (report_cmd->count("--flow"))
                spec.use_imported_flow = flow_source == "imported";
            if (report_cmd->count("--format"))
                spec.format = format == "csv" ? vmetrics::ReportFormat::csv
                                              : vmetrics::ReportFormat::json;
            vmetrics::run_report_to_file(spec);
            return kExitOk;
        }
        if (check_cmd->parsed()) return run_self_check();
    } catch (const vmetrics::ValidationError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCompute;
    }
    return kExitValidation;
}
