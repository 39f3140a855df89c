// SPDX-License-Identifier: Apache-2.0
#include "vmetrics/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <thread>

#include "vmetrics/flo_io.hpp"

namespace vmetrics {

DfciResult dfci(const std::vector<FlowField> &flows_gt,
                const std::vector<FlowField> &flows_gen,
                const MaskSequence *masks, int T, MaskMode mode) {
    if (T < 1) throw ValidationError("dfci: horizon T must be >= 1");
    if (flows_gt.size() != flows_gen.size())
        throw ValidationError("dfci: flow list length mismatch");
    if (flows_gt.empty())
        throw ValidationError("dfci: empty flow lists (T >= L?)");
    if (mode == MaskMode::foreground && !masks)
        throw ValidationError("dfci: foreground mode requires masks");

    double sum = 0.0;
    int valid_pairs = 0;
    for (size_t j = 0; j < flows_gt.size(); ++j) {
        const FlowField &a = flows_gt[j];
        const FlowField &b = flows_gen[j];
        if (!a.same_shape(b) || !a.same_shape(flows_gt[0]))
            throw ValidationError("dfci: flow dimension mismatch");
        const Mask *m = nullptr;
        if (mode == MaskMode::foreground) {
            // source frame of pair j is t - T = j
            if (j >= masks->masks.size())
                throw ValidationError("dfci: mask sequence too short");
            m = &masks->masks[j];
            if (m->height != a.height || m->width != a.width)
                throw ValidationError("dfci: mask dimension mismatch");
        }
        double pair_sum = 0.0;
        size_t selected = 0;
        for (size_t i = 0; i < a.size(); ++i) {
            if (m && !m->data[i]) continue;
            pair_sum += std::abs(static_cast<double>(a.u[i]) - b.u[i]) +
                        std::abs(static_cast<double>(a.v[i]) - b.v[i]);
            ++selected;
        }
        if (selected == 0) continue;
        sum += pair_sum / static_cast<double>(selected);
        ++valid_pairs;
    }
    if (valid_pairs == 0)
        throw ValidationError("dfci: all pairs empty in foreground mode");
    return {sum / (2.0 * valid_pairs), valid_pairs};
}

std::string imported_flow_name(int T, int t) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "flow_T%d_%05d.flo", T, t);
    return buf;
}

namespace {

struct FlowTask {
    const VideoFrames *video;
    const std::string *flow_dir; // imported source, or nullptr for builtin
    int T;
    int t; // target frame index; source is t - T
};

std::vector<FlowField> run_flow_tasks(const std::vector<FlowTask> &tasks,
                                      const FlowParams &params, int threads) {
    std::vector<FlowField> results(tasks.size());
    auto worker_body = [&](size_t i) {
        const FlowTask &task = tasks[i];
        if (task.flow_dir) {
            auto path = std::filesystem::path(*task.flow_dir) /
                        imported_flow_name(task.T, task.t);
            if (!std::filesystem::exists(path))
                throw ValidationError("missing imported flow file: " + path.string());
            results[i] = read_flo_file(path.string());
        } else {
            results[i] = estimate_flow(task.video->frames[task.t - task.T],
                                       task.video->frames[task.t], params);
        }
    };
    if (threads <= 1) {
        for (size_t i = 0; i < tasks.size(); ++i) worker_body(i);
        return results;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
            try {
                for (size_t i = next.fetch_add(1); i < tasks.size();
                     i = next.fetch_add(1))
                    worker_body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto &t : pool) t.join();
    for (auto &e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

} // namespace

std::vector<MetricEntry> dfci_suite(const VideoFrames &gt,
                                    const VideoFrames &gen,
                                    const MaskSequence *masks,
                                    const DfciConfig &config,
                                    const FlowParams &params) {
    if (gt.length() != gen.length() || gt.height() != gen.height() ||
        gt.width() != gen.width())
        throw ValidationError("dfci_suite: gt/gen shape mismatch");
    int L = gt.length();
    for (int T : config.horizons)
        if (T < 1 || T >= L)
            throw ValidationError("horizon exceeds sequence: T=" +
                                  std::to_string(T) + ", L=" + std::to_string(L));
    if (masks) masks->validate_against(gt);

    std::vector<FlowTask> tasks;
    // flat index of the first task for (video v, horizon index k)
    std::vector<std::vector<size_t>> offsets(2,
        std::vector<size_t>(config.horizons.size()));
    const VideoFrames *videos[2] = {&gt, &gen};
    const std::string *dirs[2] = {nullptr, nullptr};
    if (config.use_imported_flow) {
        dirs[0] = &config.gt_flow_dir;
        dirs[1] = &config.gen_flow_dir;
    }
    for (int v = 0; v < 2; ++v)
        for (size_t k = 0; k < config.horizons.size(); ++k) {
            offsets[v][k] = tasks.size();
            int T = config.horizons[k];
            for (int t = T; t < L; ++t)
                tasks.push_back({videos[v], dirs[v], T, t});
        }

    auto flows = run_flow_tasks(tasks, params, config.threads);

    std::vector<MetricEntry> entries;
    for (size_t k = 0; k < config.horizons.size(); ++k) {
        int T = config.horizons[k];
        std::vector<FlowField> fg(flows.begin() + offsets[0][k],
                                  flows.begin() + offsets[0][k] + (L - T));
        std::vector<FlowField> fgen(flows.begin() + offsets[1][k],
                                    flows.begin() + offsets[1][k] + (L - T));
        for (MaskMode mode : config.modes) {
            DfciResult r = dfci(fg, fgen, masks, T, mode);
            entries.push_back({"dfci", T, mode, r.value});
        }
    }
    return entries;
}

double dice(const Mask &a, const Mask &b) {
    if (a.height != b.height || a.width != b.width)
        throw ValidationError("dice: mask dimension mismatch");
    size_t inter = 0, total = 0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        inter += a.data[i] & b.data[i];
        total += a.data[i] + b.data[i];
    }
    if (total == 0) return 1.0; // both masks empty: agreement on absence
    return 2.0 * static_cast<double>(inter) / static_cast<double>(total);
}

double silhouette_consistency(const MaskSequence &gt_masks,
                              const MaskSequence &gen_masks) {
    if (gt_masks.length() != gen_masks.length())
        throw ValidationError("silhouette: sequence length mismatch");
    if (gt_masks.masks.empty())
        throw ValidationError("silhouette: empty mask sequences");
    double sum = 0.0;
    for (int i = 0; i < gt_masks.length(); ++i)
        sum += dice(gt_masks.masks[i], gen_masks.masks[i]);
    return sum / gt_masks.length();
}

namespace {

void check_same_shape(const VideoFrames &gt, const VideoFrames &gen,
                      const char *what) {
    if (gt.length() != gen.length() || gt.height() != gen.height() ||
        gt.width() != gen.width())
        throw ValidationError(std::string(what) + ": gt/gen shape mismatch");
    if (gt.frames.empty())
        throw ValidationError(std::string(what) + ": empty sequences");
}

double mse_to_psnr(double mse) {
    if (mse <= 0.0) return kPsnrCapDb;
    return std::min(kPsnrCapDb, 10.0 * std::log10(1.0 / mse));
}

} // namespace

double l1_metric(const VideoFrames &gt, const VideoFrames &gen) {
    check_same_shape(gt, gen, "l1");
    double sum = 0.0;
    size_t count = 0;
    for (int f = 0; f < gt.length(); ++f) {
        const auto &a = gt.frames[f].data;
        const auto &b = gen.frames[f].data;
        for (size_t i = 0; i < a.size(); ++i)
            sum += std::abs(static_cast<double>(a[i]) - b[i]);
        count += a.size();
    }
    return sum / static_cast<double>(count);
}

double psnr(const VideoFrames &gt, const VideoFrames &gen) {
    check_same_shape(gt, gen, "psnr");
    double total = 0.0;
    for (int f = 0; f < gt.length(); ++f) {
        const auto &a = gt.frames[f].data;
        const auto &b = gen.frames[f].data;
        double mse = 0.0;
        for (size_t i = 0; i < a.size(); ++i) {
            double d = static_cast<double>(a[i]) - b[i];
            mse += d * d;
        }
        mse /= static_cast<double>(a.size());
        total += mse_to_psnr(mse);
    }
    return total / gt.length();
}

double masked_psnr(const VideoFrames &gt, const VideoFrames &gen,
                   const MaskSequence &masks) {
    check_same_shape(gt, gen, "masked_psnr");
    masks.validate_against(gt);
    double total = 0.0;
    int counted = 0;
    for (int f = 0; f < gt.length(); ++f) {
        const Image &a = gt.frames[f];
        const Image &b = gen.frames[f];
        const Mask &m = masks.masks[f];
        double mse = 0.0;
        size_t n = 0;
        for (int y = 0; y < a.height; ++y)
            for (int x = 0; x < a.width; ++x) {
                if (!m.at(y, x)) continue;
                for (int c = 0; c < a.channels; ++c) {
                    double d = static_cast<double>(a.at(y, x, c)) - b.at(y, x, c);
                    mse += d * d;
                }
                n += a.channels;
            }
        if (n == 0) continue;
        total += mse_to_psnr(mse / static_cast<double>(n));
        ++counted;
    }
    if (counted == 0)
        throw ValidationError("masked_psnr: all masks empty");
    return total / counted;
}

double ssim_frame(const Image &a, const Image &b) {
    if (!a.same_shape(b))
        throw ValidationError("ssim: frame shape mismatch");
    Image la = to_luma(a);
    Image lb = to_luma(b);
    constexpr int kRadius = 5; // 11x11 window
    constexpr double kSigma = 1.5;
    constexpr double kC1 = 0.01 * 0.01;
    constexpr double kC2 = 0.03 * 0.03;
    int h = la.height, w = la.width;
    if (h < 2 * kRadius + 1 || w < 2 * kRadius + 1)
        throw ValidationError("ssim: frame smaller than 11x11 window");

    double kernel[2 * kRadius + 1];
    double ksum = 0.0;
    for (int i = -kRadius; i <= kRadius; ++i) {
        kernel[i + kRadius] = std::exp(-(i * i) / (2.0 * kSigma * kSigma));
        ksum += kernel[i + kRadius];
    }
    for (auto &k : kernel) k /= ksum;

    double total = 0.0;
    size_t count = 0;
    for (int y = kRadius; y < h - kRadius; ++y)
        for (int x = kRadius; x < w - kRadius; ++x) {
            double mu1 = 0, mu2 = 0, s11 = 0, s22 = 0, s12 = 0;
            for (int dy = -kRadius; dy <= kRadius; ++dy)
                for (int dx = -kRadius; dx <= kRadius; ++dx) {
                    double wgt = kernel[dy + kRadius] * kernel[dx + kRadius];
                    double p = la.at(y + dy, x + dx);
                    double q = lb.at(y + dy, x + dx);
                    mu1 += wgt * p;
                    mu2 += wgt * q;
                    s11 += wgt * p * p;
                    s22 += wgt * q * q;
                    s12 += wgt * p * q;
                }
            double var1 = s11 - mu1 * mu1;
            double var2 = s22 - mu2 * mu2;
            double cov = s12 - mu1 * mu2;
            double val = ((2 * mu1 * mu2 + kC1) * (2 * cov + kC2)) /
                         ((mu1 * mu1 + mu2 * mu2 + kC1) * (var1 + var2 + kC2));
            total += val;
            ++count;
        }
    return total / static_cast<double>(count);
}

double ssim(const VideoFrames &gt, const VideoFrames &gen) {
    check_same_shape(gt, gen, "ssim");
    double total = 0.0;
    for (int f = 0; f < gt.length(); ++f)
        total += ssim_frame(gt.frames[f], gen.frames[f]);
    return total / gt.length();
}

} // namespace vmetrics
