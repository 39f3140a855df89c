// SPDX-License-Identifier: Apache-2.0
#include "vmetrics/flow.hpp"

#include <algorithm>
#include <cmath>

namespace vmetrics {

namespace {

double sample_clamped(const Image &img, double y, double x) {
    x = std::clamp(x, 0.0, static_cast<double>(img.width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(img.height - 1));
    int x0 = static_cast<int>(std::floor(x));
    int y0 = static_cast<int>(std::floor(y));
    int x1 = std::min(x0 + 1, img.width - 1);
    int y1 = std::min(y0 + 1, img.height - 1);
    double fx = x - x0;
    double fy = y - y0;
    return (1 - fy) * ((1 - fx) * img.at(y0, x0) + fx * img.at(y0, x1)) +
           fy * ((1 - fx) * img.at(y1, x0) + fx * img.at(y1, x1));
}

Image resize_bilinear(const Image &img, int nh, int nw) {
    Image out(nh, nw, 1);
    double sy = static_cast<double>(img.height) / nh;
    double sx = static_cast<double>(img.width) / nw;
    for (int y = 0; y < nh; ++y)
        for (int x = 0; x < nw; ++x)
            out.at(y, x) = sample_clamped(img, (y + 0.5) * sy - 0.5,
                                          (x + 0.5) * sx - 0.5);
    return out;
}

// Upsample a flow field to (nh, nw) and rescale displacements to the new
// pixel grid.
FlowField upsample_flow(const FlowField &flow, int nh, int nw) {
    Image uim(flow.height, flow.width, 1), vim(flow.height, flow.width, 1);
    std::copy(flow.u.begin(), flow.u.end(), uim.data.begin());
    std::copy(flow.v.begin(), flow.v.end(), vim.data.begin());
    Image ur = resize_bilinear(uim, nh, nw);
    Image vr = resize_bilinear(vim, nh, nw);
    double fx = static_cast<double>(nw) / flow.width;
    double fy = static_cast<double>(nh) / flow.height;
    FlowField out(nh, nw);
    for (size_t i = 0; i < out.size(); ++i) {
        out.u[i] = static_cast<float>(ur.data[i] * fx);
        out.v[i] = static_cast<float>(vr.data[i] * fy);
    }
    return out;
}

// Central differences with replicated edges.
void gradients(const Image &img, Image &gx, Image &gy) {
    int h = img.height, w = img.width;
    gx = Image(h, w, 1);
    gy = Image(h, w, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            int xm = std::max(x - 1, 0), xp = std::min(x + 1, w - 1);
            int ym = std::max(y - 1, 0), yp = std::min(y + 1, h - 1);
            gx.at(y, x) = 0.5 * (img.at(y, xp) - img.at(y, xm));
            gy.at(y, x) = 0.5 * (img.at(yp, x) - img.at(ym, x));
        }
}

// Weighted 8-neighbor average used by the Horn-Schunck Laplacian
// approximation: 1/6 for edge neighbors, 1/12 for corners.
double neighbor_avg(const std::vector<double> &f, int h, int w, int y, int x) {
    int xm = std::max(x - 1, 0), xp = std::min(x + 1, w - 1);
    int ym = std::max(y - 1, 0), yp = std::min(y + 1, h - 1);
    auto v = [&](int yy, int xx) { return f[static_cast<size_t>(yy) * w + xx]; };
    return (v(ym, x) + v(yp, x) + v(y, xm) + v(y, xp)) / 6.0 +
           (v(ym, xm) + v(ym, xp) + v(yp, xm) + v(yp, xp)) / 12.0;
}

// One warp stage: linearize around the current flow and run Jacobi
// relaxation on the increment.
void horn_schunck_stage(const Image &src, const Image &dst, FlowField &flow,
                        double alpha2, int iterations) {
    int h = src.height, w = src.width;
    Image dst_w(h, w, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            size_t i = static_cast<size_t>(y) * w + x;
            dst_w.at(y, x) = sample_clamped(dst, y + flow.v[i], x + flow.u[i]);
        }

    Image gx_s, gy_s, gx_d, gy_d;
    gradients(src, gx_s, gy_s);
    gradients(dst_w, gx_d, gy_d);
    size_t n = static_cast<size_t>(h) * w;
    std::vector<double> ix(n), iy(n), it(n);
    for (size_t i = 0; i < n; ++i) {
        ix[i] = 0.5 * (gx_s.data[i] + gx_d.data[i]);
        iy[i] = 0.5 * (gy_s.data[i] + gy_d.data[i]);
        it[i] = dst_w.data[i] - src.data[i];
    }

    std::vector<double> du(n, 0.0), dv(n, 0.0), du_next(n), dv_next(n);
    for (int iter = 0; iter < iterations; ++iter) {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                size_t i = static_cast<size_t>(y) * w + x;
                double ubar = neighbor_avg(du, h, w, y, x);
                double vbar = neighbor_avg(dv, h, w, y, x);
                double num = ix[i] * ubar + iy[i] * vbar + it[i];
                double den = alpha2 + ix[i] * ix[i] + iy[i] * iy[i];
                du_next[i] = ubar - ix[i] * num / den;
                dv_next[i] = vbar - iy[i] * num / den;
            }
        du.swap(du_next);
        dv.swap(dv_next);
    }
    for (size_t i = 0; i < n; ++i) {
        flow.u[i] += static_cast<float>(du[i]);
        flow.v[i] += static_cast<float>(dv[i]);
    }
}

} // namespace

Image gaussian_blur(const Image &image, double sigma) {
    if (image.channels != 1)
        throw ValidationError("gaussian_blur expects a single-channel image");
    if (sigma <= 0.0) return image;
    int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        sum += kernel[i + radius];
    }
    for (auto &k : kernel) k /= sum;

    int h = image.height, w = image.width;
    Image tmp(h, w, 1), out(h, w, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * image.at(y, std::clamp(x + i, 0, w - 1));
            tmp.at(y, x) = acc;
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * tmp.at(std::clamp(y + i, 0, h - 1), x);
            out.at(y, x) = acc;
        }
    return out;
}

int default_pyramid_levels(int height, int width, double scale_factor) {
    int levels = 1;
    double size = static_cast<double>(std::min(height, width));
    while (size * scale_factor >= 16.0) {
        size *= scale_factor;
        ++levels;
    }
    return levels;
}

Image to_luma(const Image &frame) {
    if (frame.channels == 1) return frame;
    if (frame.channels != 3)
        throw ValidationError("to_luma expects 1 or 3 channels");
    Image out(frame.height, frame.width, 1);
    for (int y = 0; y < frame.height; ++y)
        for (int x = 0; x < frame.width; ++x)
            out.at(y, x) = 0.299 * frame.at(y, x, 0) + 0.587 * frame.at(y, x, 1) +
                           0.114 * frame.at(y, x, 2);
    return out;
}

FlowField estimate_flow(const Image &src, const Image &dst,
                        const FlowParams &params) {
    params.validate();
    if (src.height != dst.height || src.width != dst.width ||
        src.channels != dst.channels)
        throw ValidationError("estimate_flow: frame dimension mismatch");
    if (std::min(src.height, src.width) < 16)
        throw ValidationError("estimate_flow: frame smaller than 16 px");

    // Relaxation runs on luma rescaled to [0,255]; the default alpha is
    // calibrated for that intensity range.
    Image luma_src = to_luma(src);
    Image luma_dst = to_luma(dst);
    for (auto &v : luma_src.data) v *= 255.0;
    for (auto &v : luma_dst.data) v *= 255.0;
    if (params.presmooth_sigma > 0.0) {
        luma_src = gaussian_blur(luma_src, params.presmooth_sigma);
        luma_dst = gaussian_blur(luma_dst, params.presmooth_sigma);
    }

    int max_levels = default_pyramid_levels(src.height, src.width, params.scale_factor);
    int levels = params.pyramid_levels > 0
                     ? std::min(params.pyramid_levels, max_levels)
                     : max_levels;

    std::vector<Image> pyr_src{luma_src}, pyr_dst{luma_dst};
    for (int l = 1; l < levels; ++l) {
        const Image &ps = pyr_src.back();
        const Image &pd = pyr_dst.back();
        int nh = std::max(16, static_cast<int>(std::lround(ps.height * params.scale_factor)));
        int nw = std::max(16, static_cast<int>(std::lround(ps.width * params.scale_factor)));
        double blur_sigma =
            0.5 * std::sqrt(1.0 / (params.scale_factor * params.scale_factor) - 1.0);
        pyr_src.push_back(resize_bilinear(gaussian_blur(ps, blur_sigma), nh, nw));
        pyr_dst.push_back(resize_bilinear(gaussian_blur(pd, blur_sigma), nh, nw));
    }

    double alpha2 = params.smoothness_alpha * params.smoothness_alpha;
    const int warp_stages = 3;
    int iters = std::max(1, params.iterations_per_level / warp_stages);

    FlowField flow(pyr_src.back().height, pyr_src.back().width);
    for (int l = levels - 1; l >= 0; --l) {
        if (flow.height != pyr_src[l].height || flow.width != pyr_src[l].width)
            flow = upsample_flow(flow, pyr_src[l].height, pyr_src[l].width);
        for (int s = 0; s < warp_stages; ++s)
            horn_schunck_stage(pyr_src[l], pyr_dst[l], flow, alpha2, iters);
    }
    if (!flow.finite())
        throw ComputeError("estimate_flow produced non-finite values");
    return flow;
}

Image warp(const Image &image, const FlowField &flow) {
    if (image.channels != 1)
        throw ValidationError("warp expects a single-channel image");
    if (image.height != flow.height || image.width != flow.width)
        throw ValidationError("warp: image/flow dimension mismatch");
    Image out(image.height, image.width, 1);
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x) {
            size_t i = static_cast<size_t>(y) * image.width + x;
            out.at(y, x) = sample_clamped(image, y + flow.v[i], x + flow.u[i]);
        }
    return out;
}

double endpoint_error(const FlowField &a, const FlowField &b, const Mask *mask) {
    if (!a.same_shape(b))
        throw ValidationError("endpoint_error: flow dimension mismatch");
    if (mask && (mask->height != a.height || mask->width != a.width))
        throw ValidationError("endpoint_error: mask dimension mismatch");
    double sum = 0.0;
    size_t count = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        if (mask && !mask->data[i]) continue;
        double du = static_cast<double>(a.u[i]) - b.u[i];
        double dv = static_cast<double>(a.v[i]) - b.v[i];
        sum += std::sqrt(du * du + dv * dv);
        ++count;
    }
    if (count == 0)
        throw ValidationError("endpoint_error: empty pixel selection");
    return sum / static_cast<double>(count);
}

} // namespace vmetrics
