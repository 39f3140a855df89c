// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vmetrics {

// Bad or inconsistent inputs (shape mismatches, malformed files, missing
// frames). The CLI maps these to exit code 1.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Failures during metric/flow computation or output writing. Exit code 2.
struct ComputeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Interleaved row-major H x W x C image, channel values in [0,1].
struct Image {
    int height = 0;
    int width = 0;
    int channels = 1;
    std::vector<double> data;

    Image() = default;
    Image(int h, int w, int c, double fill = 0.0)
        : height(h), width(w), channels(c),
          data(static_cast<size_t>(h) * w * c, fill) {}

    double &at(int y, int x, int c = 0) {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    double at(int y, int x, int c = 0) const {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    size_t pixel_count() const { return static_cast<size_t>(height) * width; }
    bool same_shape(const Image &o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }
};

// Per-frame binary foreground mask, entries exactly 0 or 1.
struct Mask {
    int height = 0;
    int width = 0;
    std::vector<uint8_t> data;

    Mask() = default;
    Mask(int h, int w, uint8_t fill = 0)
        : height(h), width(w), data(static_cast<size_t>(h) * w, fill) {}

    uint8_t &at(int y, int x) { return data[static_cast<size_t>(y) * width + x]; }
    uint8_t at(int y, int x) const { return data[static_cast<size_t>(y) * width + x]; }
    size_t foreground_count() const {
        size_t n = 0;
        for (uint8_t v : data) n += v;
        return n;
    }
};

struct VideoFrames {
    std::vector<Image> frames;

    int length() const { return static_cast<int>(frames.size()); }
    int height() const { return frames.empty() ? 0 : frames.front().height; }
    int width() const { return frames.empty() ? 0 : frames.front().width; }

    void validate() const {
        if (frames.size() < 2)
            throw ValidationError("video needs at least 2 frames, got " +
                                  std::to_string(frames.size()));
        for (const auto &f : frames) {
            if (f.channels != 3)
                throw ValidationError("video frames must have 3 channels");
            if (f.height != height() || f.width != width())
                throw ValidationError("mixed frame dimensions in sequence");
            for (double v : f.data)
                if (!(v >= 0.0 && v <= 1.0))
                    throw ValidationError("frame value outside [0,1]");
        }
    }
};

struct MaskSequence {
    std::vector<Mask> masks;

    int length() const { return static_cast<int>(masks.size()); }
    int height() const { return masks.empty() ? 0 : masks.front().height; }
    int width() const { return masks.empty() ? 0 : masks.front().width; }

    void validate_against(const VideoFrames &video) const {
        if (static_cast<int>(masks.size()) != video.length())
            throw ValidationError("mask count does not match frame count");
        for (const auto &m : masks)
            if (m.height != video.height() || m.width != video.width())
                throw ValidationError("mask dimensions do not match frames");
    }
};

// Dense per-pixel displacement (u,v) in pixels for one frame pair.
struct FlowField {
    int height = 0;
    int width = 0;
    std::vector<float> u;
    std::vector<float> v;

    FlowField() = default;
    FlowField(int h, int w)
        : height(h), width(w), u(static_cast<size_t>(h) * w, 0.f),
          v(static_cast<size_t>(h) * w, 0.f) {}

    size_t size() const { return static_cast<size_t>(height) * width; }
    bool same_shape(const FlowField &o) const {
        return height == o.height && width == o.width;
    }
    bool finite() const {
        for (float x : u)
            if (!std::isfinite(x)) return false;
        for (float x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }
};

} // namespace vmetrics
