// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "vmetrics/flow.hpp"
#include "vmetrics/report.hpp"
#include "vmetrics/types.hpp"

namespace vmetrics {

struct DfciConfig {
    std::vector<int> horizons{1, 2, 3, 4, 5};
    std::vector<MaskMode> modes{MaskMode::fullframe, MaskMode::foreground};
    bool use_imported_flow = false;
    std::string gt_flow_dir;   // holds flow_T{T}_{t:05d}.flo when imported
    std::string gen_flow_dir;
    int threads = 1;
};

struct DfciResult {
    double value = 0.0;
    int valid_pair_count = 0;
};

// Mean absolute flow disagreement at horizon T, averaged over pairs and
// the two flow channels. flows_* hold one field per pair (t-T, t) for
// t = T..L-1 in order. In foreground mode the pixel set for pair t is the
// ground-truth mask at the flow's source frame t-T; empty pairs are
// skipped and the normalizer counts only non-empty pairs.
DfciResult dfci(const std::vector<FlowField> &flows_gt,
                const std::vector<FlowField> &flows_gen,
                const MaskSequence *masks, int T,
                MaskMode mode = MaskMode::fullframe);

// Computes flows (builtin estimator or imported .flo files) for gt and gen
// with identical parameters, then one DFCI entry per (T, mode).
std::vector<MetricEntry> dfci_suite(const VideoFrames &gt,
                                    const VideoFrames &gen,
                                    const MaskSequence *masks,
                                    const DfciConfig &config,
                                    const FlowParams &params);

std::string imported_flow_name(int T, int t);

// 2|a∩b| / (|a|+|b|); 1.0 when both masks are empty.
double dice(const Mask &a, const Mask &b);

// Mean per-frame Dice between the two mask sequences.
double silhouette_consistency(const MaskSequence &gt_masks,
                              const MaskSequence &gen_masks);

// Mean absolute difference over frames, pixels, channels on the [0,1] scale.
double l1_metric(const VideoFrames &gt, const VideoFrames &gen);

inline constexpr double kPsnrCapDb = 100.0;

// Per-frame 10*log10(1/MSE) on the [0,1] scale, averaged over frames;
// zero-MSE frames contribute the 100 dB cap.
double psnr(const VideoFrames &gt, const VideoFrames &gen);

// PSNR with MSE restricted to foreground pixels; frames with empty masks
// are skipped, all-empty is an error.
double masked_psnr(const VideoFrames &gt, const VideoFrames &gen,
                   const MaskSequence &masks);

// Mean SSIM on luma, 11x11 Gaussian window sigma 1.5, valid-region
// convolution, C1 = 0.01^2, C2 = 0.03^2.
double ssim(const VideoFrames &gt, const VideoFrames &gen);
double ssim_frame(const Image &a, const Image &b);

} // namespace vmetrics
