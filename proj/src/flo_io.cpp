// SPDX-License-Identifier: Apache-2.0
#include "vmetrics/flo_io.hpp"

#include <cstring>
#include <fstream>

namespace vmetrics {

namespace {

void put_f32(std::vector<uint8_t> &out, float v) {
    uint8_t b[4];
    std::memcpy(b, &v, 4);
    out.insert(out.end(), b, b + 4);
}

void put_i32(std::vector<uint8_t> &out, int32_t v) {
    uint8_t b[4];
    std::memcpy(b, &v, 4);
    out.insert(out.end(), b, b + 4);
}

float get_f32(const uint8_t *p) {
    float v;
    std::memcpy(&v, p, 4);
    return v;
}

int32_t get_i32(const uint8_t *p) {
    int32_t v;
    std::memcpy(&v, p, 4);
    return v;
}

} // namespace

std::vector<uint8_t> write_flo(const FlowField &flow) {
    if (!flow.finite())
        throw ValidationError("flow field contains non-finite values");
    std::vector<uint8_t> out;
    out.reserve(12 + flow.size() * 8);
    put_f32(out, kFloMagic);
    put_i32(out, flow.width);
    put_i32(out, flow.height);
    for (size_t i = 0; i < flow.size(); ++i) {
        put_f32(out, flow.u[i]);
        put_f32(out, flow.v[i]);
    }
    return out;
}

FlowField read_flo(const std::vector<uint8_t> &bytes) {
    if (bytes.size() < 12)
        throw ValidationError("flo stream truncated: header incomplete");
    if (get_f32(bytes.data()) != kFloMagic)
        throw ValidationError("flo stream: bad magic");
    int32_t w = get_i32(bytes.data() + 4);
    int32_t h = get_i32(bytes.data() + 8);
    if (w <= 0 || h <= 0)
        throw ValidationError("flo stream: non-positive dimensions");
    size_t need = 12 + static_cast<size_t>(w) * h * 8;
    if (bytes.size() < need)
        throw ValidationError("flo stream truncated: payload incomplete");
    FlowField flow(h, w);
    const uint8_t *p = bytes.data() + 12;
    for (size_t i = 0; i < flow.size(); ++i) {
        flow.u[i] = get_f32(p);
        flow.v[i] = get_f32(p + 4);
        p += 8;
    }
    return flow;
}

void write_flo_file(const FlowField &flow, const std::string &path) {
    auto bytes = write_flo(flow);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ComputeError("cannot open for writing: " + path);
    out.write(reinterpret_cast<const char *>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw ComputeError("write failed: " + path);
}

FlowField read_flo_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot open flo file: " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
    return read_flo(bytes);
}

} // namespace vmetrics
