// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vmetrics/types.hpp"

namespace vmetrics {

// Coarse-to-fine Horn-Schunck estimator parameters. pyramid_levels 0 means
// auto: floor(log2(min(H,W)/16)) + 1, so the coarsest level stays >= 16 px.
struct FlowParams {
    int pyramid_levels = 0;
    double scale_factor = 0.5;
    double smoothness_alpha = 15.0;
    int iterations_per_level = 100;
    double presmooth_sigma = 0.8;

    void validate() const {
        if (pyramid_levels < 0)
            throw ValidationError("pyramid_levels must be >= 0");
        if (!(scale_factor > 0.0 && scale_factor < 1.0))
            throw ValidationError("scale_factor must be in (0,1)");
        if (!(smoothness_alpha > 0.0))
            throw ValidationError("smoothness_alpha must be > 0");
        if (iterations_per_level < 1)
            throw ValidationError("iterations_per_level must be >= 1");
        if (presmooth_sigma < 0.0)
            throw ValidationError("presmooth_sigma must be >= 0");
    }
};

int default_pyramid_levels(int height, int width, double scale_factor = 0.5);

// Rec.601 luma: 0.299 R + 0.587 G + 0.114 B.
Image to_luma(const Image &frame);

// Dense flow mapping src toward dst: src(p) ~ dst(p + flow(p)).
FlowField estimate_flow(const Image &src, const Image &dst,
                        const FlowParams &params = {});

// Bilinear backward warp of a single-channel image; out-of-bounds samples
// clamp to the border. warped(p) = image(p + flow(p)).
Image warp(const Image &image, const FlowField &flow);

// Mean endpoint error over all pixels, or over mask==1 pixels when given.
double endpoint_error(const FlowField &a, const FlowField &b,
                      const Mask *mask = nullptr);

// Separable Gaussian blur with replicated borders (exposed for tests).
Image gaussian_blur(const Image &image, double sigma);

} // namespace vmetrics
