// SPDX-License-Identifier: Apache-2.0
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vmetrics/flo_io.hpp"
#include "vmetrics/flow.hpp"
#include "vmetrics/kernels.hpp"
#include "vmetrics/metrics.hpp"
#include "vmetrics/report.hpp"
#include "vmetrics/self_check.hpp"

namespace py = pybind11;
using namespace vmetrics;

namespace {

using ArrayF = py::array_t<float, py::array::c_style | py::array::forcecast>;
using ArrayD = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ArrayU8 = py::array_t<uint8_t, py::array::c_style | py::array::forcecast>;

Image image_from_array(const ArrayD &arr) {
    if (arr.ndim() == 2) {
        Image img(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)), 1);
        std::copy(arr.data(), arr.data() + arr.size(), img.data.begin());
        return img;
    }
    if (arr.ndim() == 3 && arr.shape(2) == 3) {
        Image img(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)), 3);
        std::copy(arr.data(), arr.data() + arr.size(), img.data.begin());
        return img;
    }
    throw ValidationError("expected HxW or HxWx3 array");
}

py::array_t<double> image_to_array(const Image &img) {
    if (img.channels == 1) {
        py::array_t<double> out({img.height, img.width});
        std::copy(img.data.begin(), img.data.end(), out.mutable_data());
        return out;
    }
    py::array_t<double> out({img.height, img.width, img.channels});
    std::copy(img.data.begin(), img.data.end(), out.mutable_data());
    return out;
}

VideoFrames video_from_array(const ArrayD &arr) {
    if (arr.ndim() != 4 || arr.shape(3) != 3)
        throw ValidationError("expected LxHxWx3 video array");
    VideoFrames video;
    int L = static_cast<int>(arr.shape(0));
    int H = static_cast<int>(arr.shape(1));
    int W = static_cast<int>(arr.shape(2));
    size_t frame_elems = static_cast<size_t>(H) * W * 3;
    for (int f = 0; f < L; ++f) {
        Image img(H, W, 3);
        std::copy(arr.data() + f * frame_elems, arr.data() + (f + 1) * frame_elems,
                  img.data.begin());
        video.frames.push_back(std::move(img));
    }
    return video;
}

MaskSequence masks_from_array(const ArrayU8 &arr) {
    if (arr.ndim() != 3)
        throw ValidationError("expected LxHxW mask array");
    MaskSequence seq;
    int L = static_cast<int>(arr.shape(0));
    int H = static_cast<int>(arr.shape(1));
    int W = static_cast<int>(arr.shape(2));
    size_t elems = static_cast<size_t>(H) * W;
    for (int f = 0; f < L; ++f) {
        Mask m(H, W);
        for (size_t i = 0; i < elems; ++i) {
            uint8_t v = arr.data()[f * elems + i];
            if (v > 1)
                throw ValidationError("mask values must be 0 or 1");
            m.data[i] = v;
        }
        seq.masks.push_back(std::move(m));
    }
    return seq;
}

Mask mask_from_array(const ArrayU8 &arr) {
    if (arr.ndim() != 2)
        throw ValidationError("expected HxW mask array");
    Mask m(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)));
    for (size_t i = 0; i < m.data.size(); ++i) {
        uint8_t v = arr.data()[i];
        if (v > 1)
            throw ValidationError("mask values must be 0 or 1");
        m.data[i] = v;
    }
    return m;
}

FlowField flow_from_arrays(const ArrayF &u, const ArrayF &v) {
    if (u.ndim() != 2 || v.ndim() != 2 || u.shape(0) != v.shape(0) ||
        u.shape(1) != v.shape(1))
        throw ValidationError("u and v must be matching HxW arrays");
    FlowField f(static_cast<int>(u.shape(0)), static_cast<int>(u.shape(1)));
    std::copy(u.data(), u.data() + u.size(), f.u.begin());
    std::copy(v.data(), v.data() + v.size(), f.v.begin());
    return f;
}

py::tuple flow_to_arrays(const FlowField &f) {
    py::array_t<float> u({f.height, f.width}), v({f.height, f.width});
    std::copy(f.u.begin(), f.u.end(), u.mutable_data());
    std::copy(f.v.begin(), f.v.end(), v.mutable_data());
    return py::make_tuple(u, v);
}

std::vector<FlowField> flow_stack(const ArrayF &arr) {
    if (arr.ndim() != 4 || arr.shape(3) != 2)
        throw ValidationError("expected PxHxWx2 flow stack");
    std::vector<FlowField> flows;
    int P = static_cast<int>(arr.shape(0));
    int H = static_cast<int>(arr.shape(1));
    int W = static_cast<int>(arr.shape(2));
    for (int p = 0; p < P; ++p) {
        FlowField f(H, W);
        const float *base = arr.data() + static_cast<size_t>(p) * H * W * 2;
        for (size_t i = 0; i < f.size(); ++i) {
            f.u[i] = base[2 * i];
            f.v[i] = base[2 * i + 1];
        }
        flows.push_back(std::move(f));
    }
    return flows;
}

Matrix matrix_from_array(const ArrayD &arr) {
    if (arr.ndim() != 2)
        throw ValidationError("expected 2-D matrix");
    Matrix m(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)));
    std::copy(arr.data(), arr.data() + arr.size(), m.data.begin());
    return m;
}

py::array_t<double> matrix_to_array(const Matrix &m) {
    py::array_t<double> out({m.rows, m.cols});
    std::copy(m.data.begin(), m.data.end(), out.mutable_data());
    return out;
}

FlowParams params_from_kwargs(int pyramid_levels, double scale_factor,
                              double smoothness_alpha, int iterations_per_level,
                              double presmooth_sigma) {
    FlowParams p;
    p.pyramid_levels = pyramid_levels;
    p.scale_factor = scale_factor;
    p.smoothness_alpha = smoothness_alpha;
    p.iterations_per_level = iterations_per_level;
    p.presmooth_sigma = presmooth_sigma;
    return p;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Flow-consistency and silhouette metrics for generated video";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ComputeError>(m, "ComputeError", PyExc_RuntimeError);

    m.def(
        "to_luma",
        [](const ArrayD &frame) { return image_to_array(to_luma(image_from_array(frame))); },
        py::arg("frame"));

    m.def(
        "estimate_flow",
        [](const ArrayD &src, const ArrayD &dst, int pyramid_levels,
           double scale_factor, double smoothness_alpha, int iterations_per_level,
           double presmooth_sigma) {
            FlowField f = estimate_flow(
                image_from_array(src), image_from_array(dst),
                params_from_kwargs(pyramid_levels, scale_factor, smoothness_alpha,
                                   iterations_per_level, presmooth_sigma));
            return flow_to_arrays(f);
        },
        py::arg("src"), py::arg("dst"), py::arg("pyramid_levels") = 0,
        py::arg("scale_factor") = 0.5, py::arg("smoothness_alpha") = 15.0,
        py::arg("iterations_per_level") = 100, py::arg("presmooth_sigma") = 0.8,
        "Dense optical flow (u, v) mapping src toward dst");

    m.def(
        "warp",
        [](const ArrayD &image, const ArrayF &u, const ArrayF &v) {
            return image_to_array(warp(image_from_array(image), flow_from_arrays(u, v)));
        },
        py::arg("image"), py::arg("u"), py::arg("v"));

    m.def(
        "endpoint_error",
        [](const ArrayF &u1, const ArrayF &v1, const ArrayF &u2, const ArrayF &v2,
           py::object mask) {
            FlowField a = flow_from_arrays(u1, v1);
            FlowField b = flow_from_arrays(u2, v2);
            if (mask.is_none()) return endpoint_error(a, b);
            Mask msk = mask_from_array(mask.cast<ArrayU8>());
            return endpoint_error(a, b, &msk);
        },
        py::arg("u1"), py::arg("v1"), py::arg("u2"), py::arg("v2"),
        py::arg("mask") = py::none());

    m.def(
        "read_flo",
        [](const py::bytes &raw) {
            std::string s = raw;
            std::vector<uint8_t> bytes(s.begin(), s.end());
            return flow_to_arrays(read_flo(bytes));
        },
        py::arg("data"));

    m.def(
        "write_flo",
        [](const ArrayF &u, const ArrayF &v) {
            auto bytes = write_flo(flow_from_arrays(u, v));
            return py::bytes(reinterpret_cast<const char *>(bytes.data()), bytes.size());
        },
        py::arg("u"), py::arg("v"));

    m.def(
        "dfci",
        [](const ArrayF &flows_gt, const ArrayF &flows_gen, py::object masks, int T,
           const std::string &mode) {
            auto gt = flow_stack(flows_gt);
            auto gen = flow_stack(flows_gen);
            MaskSequence seq;
            const MaskSequence *seq_ptr = nullptr;
            if (!masks.is_none()) {
                seq = masks_from_array(masks.cast<ArrayU8>());
                seq_ptr = &seq;
            }
            DfciResult r = dfci(gt, gen, seq_ptr, T, mask_mode_from_string(mode));
            return py::make_tuple(r.value, r.valid_pair_count);
        },
        py::arg("flows_gt"), py::arg("flows_gen"), py::arg("masks") = py::none(),
        py::arg("T") = 1, py::arg("mode") = "fullframe",
        "Flow-consistency value and valid pair count for PxHxWx2 flow stacks");

    m.def(
        "dice",
        [](const ArrayU8 &a, const ArrayU8 &b) {
            return dice(mask_from_array(a), mask_from_array(b));
        },
        py::arg("a"), py::arg("b"));

    m.def(
        "silhouette_consistency",
        [](const ArrayU8 &gt, const ArrayU8 &gen) {
            return silhouette_consistency(masks_from_array(gt), masks_from_array(gen));
        },
        py::arg("gt_masks"), py::arg("gen_masks"));

    m.def(
        "l1_metric",
        [](const ArrayD &gt, const ArrayD &gen) {
            return l1_metric(video_from_array(gt), video_from_array(gen));
        },
        py::arg("gt"), py::arg("gen"));

    m.def(
        "psnr",
        [](const ArrayD &gt, const ArrayD &gen) {
            return psnr(video_from_array(gt), video_from_array(gen));
        },
        py::arg("gt"), py::arg("gen"));

    m.def(
        "masked_psnr",
        [](const ArrayD &gt, const ArrayD &gen, const ArrayU8 &masks) {
            return masked_psnr(video_from_array(gt), video_from_array(gen),
                               masks_from_array(masks));
        },
        py::arg("gt"), py::arg("gen"), py::arg("masks"));

    m.def(
        "ssim",
        [](const ArrayD &gt, const ArrayD &gen) {
            return ssim(video_from_array(gt), video_from_array(gen));
        },
        py::arg("gt"), py::arg("gen"));

    m.def(
        "sampler_attention",
        [](const ArrayD &tokens, const ArrayD &w_key, const ArrayD &w_value,
           const ArrayD &query) {
            return matrix_to_array(sampler_attention(
                matrix_from_array(tokens), matrix_from_array(w_key),
                matrix_from_array(w_value), matrix_from_array(query)));
        },
        py::arg("tokens"), py::arg("w_key"), py::arg("w_value"), py::arg("query"));

    m.def(
        "facial_attention",
        [](const ArrayD &q_global, const ArrayD &k_local, const ArrayD &v_local) {
            return matrix_to_array(facial_attention(matrix_from_array(q_global),
                                                    matrix_from_array(k_local),
                                                    matrix_from_array(v_local)));
        },
        py::arg("q_global"), py::arg("k_local"), py::arg("v_local"));

    m.def(
        "masked_loss",
        [](const ArrayD &eps, const ArrayD &pred, const ArrayU8 &mask, double lam) {
            std::vector<double> e(eps.data(), eps.data() + eps.size());
            std::vector<double> p(pred.data(), pred.data() + pred.size());
            std::vector<uint8_t> mk(mask.data(), mask.data() + mask.size());
            return masked_loss(e, p, mk, lam);
        },
        py::arg("eps"), py::arg("pred"), py::arg("mask"), py::arg("lam") = 4.0);

    m.def(
        "masked_loss_grad",
        [](const ArrayD &eps, const ArrayD &pred, const ArrayU8 &mask, double lam) {
            std::vector<double> e(eps.data(), eps.data() + eps.size());
            std::vector<double> p(pred.data(), pred.data() + pred.size());
            std::vector<uint8_t> mk(mask.data(), mask.data() + mask.size());
            auto g = masked_loss_grad(e, p, mk, lam);
            py::array_t<double> out({static_cast<py::ssize_t>(g.size())});
            std::copy(g.begin(), g.end(), out.mutable_data());
            return out;
        },
        py::arg("eps"), py::arg("pred"), py::arg("mask"), py::arg("lam") = 4.0);

    m.def(
        "token_layout",
        [](int frames, int temporal_kernel, int latent_h, int latent_w,
           int id_tokens, const std::string &mode) {
            LayoutMode lm;
            if (mode == "strict")
                lm = LayoutMode::strict;
            else if (mode == "causal")
                lm = LayoutMode::causal;
            else
                throw ValidationError("mode must be strict or causal");
            return token_layout(frames, temporal_kernel, latent_h, latent_w,
                                id_tokens, lm);
        },
        py::arg("frames"), py::arg("temporal_kernel"), py::arg("latent_h"),
        py::arg("latent_w"), py::arg("id_tokens") = 0, py::arg("mode") = "strict");

    m.def("self_check", []() {
        py::list out;
        for (const auto &r : run_self_check())
            out.append(py::make_tuple(r.name, r.passed, r.detail));
        return out;
    });
}
