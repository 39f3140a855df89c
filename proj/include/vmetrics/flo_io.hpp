// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vmetrics/types.hpp"

namespace vmetrics {

// Middlebury .flo: little-endian float 202021.25 magic, int32 width,
// int32 height, then h*w interleaved (u,v) float pairs, top row first.
inline constexpr float kFloMagic = 202021.25f;

std::vector<uint8_t> write_flo(const FlowField &flow);
FlowField read_flo(const std::vector<uint8_t> &bytes);

void write_flo_file(const FlowField &flow, const std::string &path);
FlowField read_flo_file(const std::string &path);

} // namespace vmetrics
