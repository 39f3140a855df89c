// SPDX-License-Identifier: Apache-2.0
#include "vmetrics/frame_io.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

namespace fs = std::filesystem;

namespace vmetrics {

namespace {

// Skips whitespace and '#' comments between PNM header tokens.
int next_header_int(std::istream &in, const std::string &path) {
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    if (c == EOF || !std::isdigit(c))
        throw ValidationError("malformed PNM header: " + path);
    int value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        c = in.get();
    }
    return value;
}

int next_plain_sample(std::istream &in, const std::string &path) {
    int v;
    if (!(in >> v))
        throw ValidationError("truncated plain PNM data: " + path);
    return v;
}

// Extracts the numeric frame index from a filename stem. Uses the last
// run of digits so names like "frame_0001" and "clip2_00010" both work.
bool numeric_index(const std::string &stem, long &index) {
    size_t end = stem.find_last_of("0123456789");
    if (end == std::string::npos) return false;
    size_t begin = end;
    while (begin > 0 && std::isdigit(static_cast<unsigned char>(stem[begin - 1])))
        --begin;
    index = std::stol(stem.substr(begin, end - begin + 1));
    return true;
}

std::vector<std::string> resolve_directory(const fs::path &dir) {
    std::vector<std::pair<long, std::string>> indexed;
    for (const auto &entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        long idx;
        if (numeric_index(entry.path().stem().string(), idx))
            indexed.emplace_back(idx, entry.path().string());
    }
    if (indexed.empty())
        throw ValidationError("no numbered raster files in " + dir.string());
    std::sort(indexed.begin(), indexed.end());
    for (size_t i = 0; i + 1 < indexed.size(); ++i) {
        if (indexed[i].first == indexed[i + 1].first)
            throw ValidationError("duplicate frame index " +
                                  std::to_string(indexed[i].first) + " in " +
                                  dir.string());
        if (indexed[i + 1].first != indexed[i].first + 1)
            throw ValidationError(
                "non-contiguous sequence in " + dir.string() + ": index " +
                std::to_string(indexed[i].first) + " followed by " +
                std::to_string(indexed[i + 1].first));
    }
    std::vector<std::string> paths;
    paths.reserve(indexed.size());
    for (auto &[idx, p] : indexed) paths.push_back(std::move(p));
    return paths;
}

std::vector<std::string> resolve_pattern(const std::string &pattern) {
    // printf-style %0Nd (or bare %d): probe start index 0 then 1.
    char buf[4096];
    auto format = [&](long i) {
        std::snprintf(buf, sizeof(buf), pattern.c_str(), i);
        return std::string(buf);
    };
    long start = -1;
    for (long s : {0L, 1L}) {
        if (fs::exists(format(s))) {
            start = s;
            break;
        }
    }
    if (start < 0)
        throw ValidationError("pattern matches no files: " + pattern);
    std::vector<std::string> paths;
    long i = start;
    while (fs::exists(format(i))) {
        paths.push_back(format(i));
        ++i;
    }
    if (fs::exists(format(i + 1)))
        throw ValidationError("non-contiguous sequence: missing index " +
                              std::to_string(i) + " for " + pattern);
    return paths;
}

} // namespace

Image read_pnm_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot open raster file: " + path);
    char p, kind;
    in.get(p);
    in.get(kind);
    if (p != 'P' || (kind != '2' && kind != '3' && kind != '5' && kind != '6'))
        throw ValidationError("unsupported raster format (want PGM/PPM): " + path);
    bool color = (kind == '3' || kind == '6');
    bool raw = (kind == '5' || kind == '6');
    int w = next_header_int(in, path);
    int h = next_header_int(in, path);
    int maxval = next_header_int(in, path);
    if (w <= 0 || h <= 0)
        throw ValidationError("bad raster dimensions: " + path);
    if (maxval != 255)
        throw ValidationError("only 8-bit rasters supported (maxval 255): " + path);

    Image image(h, w, color ? 3 : 1);
    size_t n = image.data.size();
    if (raw) {
        // header maxval is followed by exactly one whitespace byte
        std::vector<uint8_t> bytes(n);
        in.read(reinterpret_cast<char *>(bytes.data()),
                static_cast<std::streamsize>(n));
        if (static_cast<size_t>(in.gcount()) != n)
            throw ValidationError("truncated raster data: " + path);
        for (size_t i = 0; i < n; ++i)
            image.data[i] = static_cast<double>(bytes[i]) / 255.0;
    } else {
        for (size_t i = 0; i < n; ++i) {
            int v = next_plain_sample(in, path);
            if (v < 0 || v > 255)
                throw ValidationError("sample out of range in " + path);
            image.data[i] = static_cast<double>(v) / 255.0;
        }
    }
    return image;
}

void write_pnm_file(const Image &image, const std::string &path) {
    if (image.channels != 1 && image.channels != 3)
        throw ValidationError("PNM writer supports 1 or 3 channels");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ComputeError("cannot open for writing: " + path);
    out << (image.channels == 3 ? "P6" : "P5") << "\n"
        << image.width << " " << image.height << "\n255\n";
    std::vector<uint8_t> bytes(image.data.size());
    for (size_t i = 0; i < bytes.size(); ++i) {
        double v = std::clamp(image.data[i], 0.0, 1.0);
        bytes[i] = static_cast<uint8_t>(std::lround(v * 255.0));
    }
    out.write(reinterpret_cast<const char *>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw ComputeError("write failed: " + path);
}

std::vector<std::string> resolve_sequence(const std::string &path_pattern) {
    if (path_pattern.find('%') != std::string::npos)
        return resolve_pattern(path_pattern);
    fs::path p(path_pattern);
    if (fs::is_directory(p))
        return resolve_directory(p);
    throw ValidationError("not a directory or %d pattern: " + path_pattern);
}

VideoFrames load_frame_sequence(const std::string &path_pattern) {
    auto paths = resolve_sequence(path_pattern);
    if (paths.size() < 2)
        throw ValidationError("need at least 2 frames, found " +
                              std::to_string(paths.size()) + " in " +
                              path_pattern);
    VideoFrames video;
    video.frames.reserve(paths.size());
    for (const auto &path : paths) {
        Image img = read_pnm_file(path);
        if (img.channels == 1) {
            // promote grayscale to RGB
            Image rgb(img.height, img.width, 3);
            for (int y = 0; y < img.height; ++y)
                for (int x = 0; x < img.width; ++x)
                    for (int c = 0; c < 3; ++c) rgb.at(y, x, c) = img.at(y, x);
            img = std::move(rgb);
        }
        if (!video.frames.empty() && !img.same_shape(video.frames.front()))
            throw ValidationError("mixed frame dimensions: " + path);
        video.frames.push_back(std::move(img));
    }
    return video;
}

Mask binarize(const Image &gray, int threshold) {
    Mask mask(gray.height, gray.width);
    for (int y = 0; y < gray.height; ++y)
        for (int x = 0; x < gray.width; ++x) {
            double v = gray.channels == 1
                           ? gray.at(y, x)
                           : (gray.at(y, x, 0) + gray.at(y, x, 1) + gray.at(y, x, 2)) / 3.0;
            mask.at(y, x) = std::lround(v * 255.0) >= threshold ? 1 : 0;
        }
    return mask;
}

MaskSequence load_mask_sequence(const std::string &path_pattern, int threshold) {
    auto paths = resolve_sequence(path_pattern);
    MaskSequence seq;
    seq.masks.reserve(paths.size());
    for (const auto &path : paths) {
        Image img = read_pnm_file(path);
        Mask m = binarize(img, threshold);
        if (!seq.masks.empty() && (m.height != seq.height() || m.width != seq.width()))
            throw ValidationError("mixed mask dimensions: " + path);
        seq.masks.push_back(std::move(m));
    }
    return seq;
}

} // namespace vmetrics
