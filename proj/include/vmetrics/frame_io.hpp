// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "vmetrics/types.hpp"

namespace vmetrics {

// Raster support is PPM (P6/P3) and PGM (P5/P2), maxval 255.
Image read_pnm_file(const std::string &path);
void write_pnm_file(const Image &image, const std::string &path);

// Resolves a printf-style %0Nd pattern or a directory listing into files
// ordered by their numeric index. Gaps in the index sequence are errors.
std::vector<std::string> resolve_sequence(const std::string &path_pattern);

// Frames are 8-bit rasters scaled to [0,1] by division by 255.
VideoFrames load_frame_sequence(const std::string &path_pattern);

// Grayscale rasters binarized at `threshold`: pixel >= threshold -> 1.
MaskSequence load_mask_sequence(const std::string &path_pattern,
                                int threshold = 128);

Mask binarize(const Image &gray, int threshold = 128);

} // namespace vmetrics
