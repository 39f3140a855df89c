// SPDX-License-Identifier: Apache-2.0
#include "vmetrics/runner.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "vmetrics/flo_io.hpp"
#include "vmetrics/frame_io.hpp"

namespace fs = std::filesystem;

namespace vmetrics {

namespace {

std::string join_ints(const std::vector<int> &values) {
    std::ostringstream os;
    for (size_t i = 0; i < values.size(); ++i)
        os << (i ? "," : "") << values[i];
    return os.str();
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

} // namespace

RunSpec parse_run_spec_json(const std::string &text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const std::exception &e) {
        throw ValidationError(std::string("run spec parse error: ") + e.what());
    }
    RunSpec spec;
    spec.gt_dir = doc.value("gt", "");
    spec.gen_dir = doc.value("gen", "");
    spec.mask_gt_dir = doc.value("masks_gt", "");
    spec.mask_gen_dir = doc.value("masks_gen", "");
    if (doc.contains("horizons"))
        spec.horizons = doc["horizons"].get<std::vector<int>>();
    if (doc.contains("mode")) {
        std::string mode = doc["mode"].get<std::string>();
        if (mode == "both")
            spec.modes = {MaskMode::fullframe, MaskMode::foreground};
        else
            spec.modes = {mask_mode_from_string(mode)};
    }
    if (doc.contains("flow")) {
        std::string flow = doc["flow"].get<std::string>();
        if (flow != "builtin" && flow != "imported")
            throw ValidationError("run spec: flow must be builtin or imported");
        spec.use_imported_flow = flow == "imported";
    }
    spec.gt_flow_dir = doc.value("flows_gt", "");
    spec.gen_flow_dir = doc.value("flows_gen", "");
    spec.mask_threshold = doc.value("mask_threshold", 128);
    spec.threads = doc.value("threads", 1);
    spec.out_path = doc.value("out", "");
    if (doc.contains("format")) {
        std::string f = doc["format"].get<std::string>();
        if (f == "json")
            spec.format = ReportFormat::json;
        else if (f == "csv")
            spec.format = ReportFormat::csv;
        else
            throw ValidationError("run spec: format must be json or csv");
    }
    if (doc.contains("flow_params")) {
        const auto &p = doc["flow_params"];
        spec.flow_params.pyramid_levels = p.value("pyramid_levels", 0);
        spec.flow_params.scale_factor = p.value("scale_factor", 0.5);
        spec.flow_params.smoothness_alpha = p.value("smoothness_alpha", 15.0);
        spec.flow_params.iterations_per_level = p.value("iterations_per_level", 100);
        spec.flow_params.presmooth_sigma = p.value("presmooth_sigma", 0.8);
    }
    return spec;
}

void run_flow_export(const std::string &frames_dir, const std::string &out_dir,
                     const std::vector<int> &horizons, const FlowParams &params,
                     int threads) {
    VideoFrames video = load_frame_sequence(frames_dir);
    int L = video.length();
    for (int T : horizons)
        if (T < 1 || T >= L)
            throw ValidationError("horizon exceeds sequence: T=" +
                                  std::to_string(T) + ", L=" + std::to_string(L));
    fs::create_directories(out_dir);

    struct Task {
        int T, t;
    };
    std::vector<Task> tasks;
    for (int T : horizons)
        for (int t = T; t < L; ++t) tasks.push_back({T, t});

    auto body = [&](size_t i) {
        FlowField flow = estimate_flow(video.frames[tasks[i].t - tasks[i].T],
                                       video.frames[tasks[i].t], params);
        auto path = fs::path(out_dir) / imported_flow_name(tasks[i].T, tasks[i].t);
        write_flo_file(flow, path.string());
    };
    if (threads <= 1) {
        for (size_t i = 0; i < tasks.size(); ++i) body(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
            try {
                for (size_t i = next.fetch_add(1); i < tasks.size();
                     i = next.fetch_add(1))
                    body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto &t : pool) t.join();
    for (auto &e : errors)
        if (e) std::rethrow_exception(e);
}

MetricReport run_report(const RunSpec &spec) {
    // fail-fast validation pass: everything loads and aligns before any
    // metric computation starts
    VideoFrames gt = load_frame_sequence(spec.gt_dir);
    VideoFrames gen = load_frame_sequence(spec.gen_dir);
    if (gt.length() != gen.length() || gt.height() != gen.height() ||
        gt.width() != gen.width())
        throw ValidationError("gt/gen sequences are not aligned");
    MaskSequence masks_gt = load_mask_sequence(spec.mask_gt_dir, spec.mask_threshold);
    MaskSequence masks_gen = load_mask_sequence(spec.mask_gen_dir, spec.mask_threshold);
    masks_gt.validate_against(gt);
    masks_gen.validate_against(gen);
    if (spec.use_imported_flow) {
        for (int T : spec.horizons)
            for (int t = T; t < gt.length(); ++t)
                for (const std::string &dir : {spec.gt_flow_dir, spec.gen_flow_dir})
                    if (!fs::exists(fs::path(dir) / imported_flow_name(T, t)))
                        throw ValidationError("missing imported flow file: " +
                                              (fs::path(dir) / imported_flow_name(T, t)).string());
    }

    DfciConfig config;
    config.horizons = spec.horizons;
    config.modes = spec.modes;
    config.use_imported_flow = spec.use_imported_flow;
    config.gt_flow_dir = spec.gt_flow_dir;
    config.gen_flow_dir = spec.gen_flow_dir;
    config.threads = spec.threads;

    MetricReport report;
    for (auto &entry : dfci_suite(gt, gen, &masks_gt, config, spec.flow_params))
        report.entries.push_back(entry);
    report.add("silhouette", std::nullopt, MaskMode::foreground,
               silhouette_consistency(masks_gt, masks_gen));
    double l1 = l1_metric(gt, gen);
    report.add("l1", std::nullopt, MaskMode::fullframe, l1);
    report.add("l1_e4", std::nullopt, MaskMode::fullframe, l1 * 1e4);
    report.add("psnr", std::nullopt, MaskMode::fullframe, psnr(gt, gen));
    report.add("psnr_masked", std::nullopt, MaskMode::foreground,
               masked_psnr(gt, gen, masks_gt));
    report.add("ssim", std::nullopt, MaskMode::fullframe, ssim(gt, gen));

    report.set_meta("gt", spec.gt_dir);
    report.set_meta("gen", spec.gen_dir);
    report.set_meta("frame_count", std::to_string(gt.length()));
    report.set_meta("frame_size", std::to_string(gt.width()) + "x" +
                                      std::to_string(gt.height()));
    report.set_meta("horizons", join_ints(spec.horizons));
    report.set_meta("flow_source", spec.use_imported_flow ? "imported" : "builtin");
    report.set_meta("flow_pyramid_levels",
                    std::to_string(spec.flow_params.pyramid_levels > 0
                                       ? spec.flow_params.pyramid_levels
                                       : default_pyramid_levels(gt.height(), gt.width(),
                                                                spec.flow_params.scale_factor)));
    report.set_meta("flow_scale_factor", format_double(spec.flow_params.scale_factor));
    report.set_meta("flow_smoothness_alpha", format_double(spec.flow_params.smoothness_alpha));
    report.set_meta("flow_iterations_per_level",
                    std::to_string(spec.flow_params.iterations_per_level));
    report.set_meta("flow_presmooth_sigma", format_double(spec.flow_params.presmooth_sigma));
    report.set_meta("flow_units", "pixels_native_resolution");
    report.set_meta("mask_threshold", std::to_string(spec.mask_threshold));
    report.set_meta("dfci_foreground_mask", "gt_mask_at_source_frame");
    report.set_meta("psnr_cap_db", format_double(kPsnrCapDb));
    return report;
}

void run_report_to_file(const RunSpec &spec) {
    if (spec.out_path.empty())
        throw ValidationError("no output path given");
    MetricReport report = run_report(spec);
    std::string rendered = write_report(report, spec.format);
    std::ofstream out(spec.out_path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ComputeError("cannot open for writing: " + spec.out_path);
    out << rendered;
    if (!out)
        throw ComputeError("write failed: " + spec.out_path);
}

} // namespace vmetrics
