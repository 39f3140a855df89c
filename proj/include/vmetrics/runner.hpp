// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "vmetrics/flow.hpp"
#include "vmetrics/metrics.hpp"
#include "vmetrics/report.hpp"

namespace vmetrics {

struct RunSpec {
    std::string gt_dir;
    std::string gen_dir;
    std::string mask_gt_dir;
    std::string mask_gen_dir;
    std::vector<int> horizons{1, 2, 3, 4, 5};
    std::vector<MaskMode> modes{MaskMode::fullframe, MaskMode::foreground};
    bool use_imported_flow = false;
    std::string gt_flow_dir;
    std::string gen_flow_dir;
    FlowParams flow_params;
    int mask_threshold = 128;
    int threads = 1;
    std::string out_path;
    ReportFormat format = ReportFormat::json;
};

RunSpec parse_run_spec_json(const std::string &text);

// Computes one .flo file per (t-T, t) pair per horizon, named
// flow_T{T}_{t:05d}.flo. Deterministic: reruns produce identical bytes.
void run_flow_export(const std::string &frames_dir,
                     const std::string &out_dir,
                     const std::vector<int> &horizons,
                     const FlowParams &params, int threads = 1);

// Full evaluation: DFCI for every (T, mode), silhouette consistency, L1,
// PSNR, masked PSNR, SSIM, with parameter metadata. Validates every input
// before any computation and writes nothing on failure.
MetricReport run_report(const RunSpec &spec);

// Renders the report and writes it to spec.out_path.
void run_report_to_file(const RunSpec &spec);

} // namespace vmetrics
