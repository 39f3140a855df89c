// SPDX-License-Identifier: Apache-2.0
#include "vmetrics/self_check.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "vmetrics/flo_io.hpp"
#include "vmetrics/kernels.hpp"
#include "vmetrics/metrics.hpp"
#include "vmetrics/report.hpp"

namespace vmetrics {

namespace {

FlowField random_flow(std::mt19937 &rng, int h, int w, float span = 8.f) {
    std::uniform_real_distribution<float> dist(-span, span);
    FlowField f(h, w);
    for (size_t i = 0; i < f.size(); ++i) {
        f.u[i] = dist(rng);
        f.v[i] = dist(rng);
    }
    return f;
}

Mask random_mask(std::mt19937 &rng, int h, int w) {
    std::bernoulli_distribution dist(0.5);
    Mask m(h, w);
    for (auto &v : m.data) v = dist(rng) ? 1 : 0;
    return m;
}

// Naive per-pixel reference for DFCI, written directly from the formula.
double dfci_naive(const std::vector<FlowField> &gt,
                  const std::vector<FlowField> &gen, const MaskSequence *masks,
                  MaskMode mode) {
    double sum = 0.0;
    int valid = 0;
    for (size_t j = 0; j < gt.size(); ++j) {
        double pair_sum = 0.0;
        long n = 0;
        for (int y = 0; y < gt[j].height; ++y)
            for (int x = 0; x < gt[j].width; ++x) {
                if (mode == MaskMode::foreground && !masks->masks[j].at(y, x))
                    continue;
                size_t i = static_cast<size_t>(y) * gt[j].width + x;
                pair_sum += std::fabs(static_cast<double>(gt[j].u[i]) - gen[j].u[i]) +
                            std::fabs(static_cast<double>(gt[j].v[i]) - gen[j].v[i]);
                ++n;
            }
        if (n == 0) continue;
        sum += pair_sum / n;
        ++valid;
    }
    return sum / (2.0 * valid);
}

double dice_naive(const Mask &a, const Mask &b) {
    long na = 0, nb = 0, inter = 0;
    for (int y = 0; y < a.height; ++y)
        for (int x = 0; x < a.width; ++x) {
            na += a.at(y, x);
            nb += b.at(y, x);
            if (a.at(y, x) && b.at(y, x)) ++inter;
        }
    if (na + nb == 0) return 1.0;
    return 2.0 * inter / static_cast<double>(na + nb);
}

Matrix random_matrix(std::mt19937 &rng, int r, int c, double span = 2.0) {
    std::uniform_real_distribution<double> dist(-span, span);
    Matrix m(r, c);
    for (auto &v : m.data) v = dist(rng);
    return m;
}

CheckResult check_dfci_oracle() {
    CheckResult result{"dfci_oracle_equivalence", true, ""};
    const int L = 8, H = 16, W = 16;
    for (int seed = 0; seed < 100 && result.passed; ++seed) {
        std::mt19937 rng(seed);
        MaskSequence masks;
        for (int i = 0; i < L; ++i) masks.masks.push_back(random_mask(rng, H, W));
        for (int T = 1; T <= 5; ++T) {
            std::vector<FlowField> gt, gen;
            for (int t = T; t < L; ++t) {
                gt.push_back(random_flow(rng, H, W));
                gen.push_back(random_flow(rng, H, W));
            }
            for (MaskMode mode : {MaskMode::fullframe, MaskMode::foreground}) {
                double fast = dfci(gt, gen, &masks, T, mode).value;
                double naive = dfci_naive(gt, gen, &masks, mode);
                double rel = std::fabs(fast - naive) / std::max(1e-300, std::fabs(naive));
                if (rel > 1e-10) {
                    result.passed = false;
                    std::ostringstream os;
                    os << "seed " << seed << " T " << T << " rel err " << rel;
                    result.detail = os.str();
                }
            }
        }
    }
    return result;
}

CheckResult check_dfci_analytic() {
    CheckResult result{"dfci_analytic_cases", true, ""};
    const int L = 8, H = 12, W = 10;
    std::mt19937 rng(7);
    for (int T = 1; T <= 5; ++T) {
        std::vector<FlowField> gt, gen_same, gen_offset;
        for (int t = T; t < L; ++t) {
            FlowField f = random_flow(rng, H, W);
            gt.push_back(f);
            gen_same.push_back(f);
            for (size_t i = 0; i < f.size(); ++i) {
                f.u[i] += 0.5f;
                f.v[i] += -1.0f;
            }
            gen_offset.push_back(f);
        }
        double zero = dfci(gt, gen_same, nullptr, T).value;
        double offset = dfci(gt, gen_offset, nullptr, T).value;
        // 1e-6 tolerance: random float32 values round when offset
        if (zero != 0.0 || std::fabs(offset - 0.75) > 1e-6) {
            result.passed = false;
            result.detail = "T=" + std::to_string(T);
        }
    }
    return result;
}

CheckResult check_dice_oracle() {
    CheckResult result{"dice_oracle_equivalence", true, ""};
    std::mt19937 rng(11);
    for (int i = 0; i < 1000 && result.passed; ++i) {
        Mask a = random_mask(rng, 32, 32);
        Mask b = random_mask(rng, 32, 32);
        if (std::fabs(dice(a, b) - dice_naive(a, b)) > 1e-12) {
            result.passed = false;
            result.detail = "instance " + std::to_string(i);
        }
    }
    return result;
}

CheckResult check_attention() {
    CheckResult result{"attention_properties", true, ""};
    std::mt19937 rng(13);
    // zero-query uniform mean
    Matrix d = random_matrix(rng, 6, 4);
    Matrix wk = random_matrix(rng, 4, 4);
    Matrix wv = random_matrix(rng, 4, 4);
    Matrix q(2, 4, 0.0);
    Matrix out = sampler_attention(d, wk, wv, q);
    Matrix v = matmul(d, wv);
    for (int j = 0; j < 4; ++j) {
        double mean = 0.0;
        for (int i = 0; i < v.rows; ++i) mean += v.at(i, j);
        mean /= v.rows;
        for (int i = 0; i < out.rows; ++i)
            if (std::fabs(out.at(i, j) - mean) > 1e-12) {
                result.passed = false;
                result.detail = "zero-query mean violated";
            }
    }
    // scalar hand case
    Matrix d1(2, 1);
    d1.at(0, 0) = 1.0;
    d1.at(1, 0) = 2.0;
    Matrix w1(1, 1, 1.0);
    Matrix q1(1, 1, 1.0);
    double hand = sampler_attention(d1, w1, w1, q1).at(0, 0);
    if (std::fabs(hand - 1.73106) > 1e-5) {
        result.passed = false;
        result.detail = "hand case got " + std::to_string(hand);
    }
    // row stochasticity on random logits
    for (int i = 0; i < 1000 && result.passed; ++i) {
        Matrix logits = random_matrix(rng, 3, 5, 50.0);
        Matrix sm = row_softmax(logits);
        for (int r = 0; r < sm.rows; ++r) {
            double sum = 0.0;
            for (int c = 0; c < sm.cols; ++c) {
                sum += sm.at(r, c);
                if (sm.at(r, c) < 0.0 || sm.at(r, c) > 1.0) result.passed = false;
            }
            if (std::fabs(sum - 1.0) > 1e-9) result.passed = false;
        }
        if (!result.passed) result.detail = "row stochasticity instance " + std::to_string(i);
    }
    return result;
}

CheckResult check_gradient(bool flip_lambda_sign) {
    CheckResult result{"masked_loss_gradient", true, ""};
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::bernoulli_distribution coin(0.4);
    const int n = 64;
    double worst = 0.0;
    for (int inst = 0; inst < 100; ++inst) {
        std::vector<double> eps(n), pred(n);
        std::vector<uint8_t> mask(n);
        for (int i = 0; i < n; ++i) {
            eps[i] = dist(rng);
            pred[i] = dist(rng);
            mask[i] = coin(rng) ? 1 : 0;
        }
        double lambda = 1.0 + 3.0 * std::fabs(dist(rng));
        auto grad = masked_loss_grad(eps, pred, mask, lambda);
        if (flip_lambda_sign)
            for (int i = 0; i < n; ++i)
                if (mask[i]) grad[i] = -grad[i];
        const double h = 1e-3;
        for (int i = 0; i < n; ++i) {
            auto plus = pred, minus = pred;
            plus[i] += h;
            minus[i] -= h;
            double fd = (masked_loss(eps, plus, mask, lambda) -
                         masked_loss(eps, minus, mask, lambda)) /
                        (2 * h);
            double rel = std::fabs(grad[i] - fd) /
                         std::max(1e-8, std::fabs(fd));
            worst = std::max(worst, rel);
        }
    }
    std::ostringstream os;
    os << "max rel err " << worst;
    result.detail = os.str();
    result.passed = worst < 1e-4;
    return result;
}

CheckResult check_flo_roundtrip() {
    CheckResult result{"flo_roundtrip", true, ""};
    std::mt19937 rng(19);
    std::uniform_int_distribution<int> dim(1, 24);
    for (int i = 0; i < 1000 && result.passed; ++i) {
        FlowField f = random_flow(rng, dim(rng), dim(rng), 1e4f);
        FlowField g = read_flo(write_flo(f));
        if (g.height != f.height || g.width != f.width || g.u != f.u ||
            g.v != f.v) {
            result.passed = false;
            result.detail = "instance " + std::to_string(i);
        }
    }
    return result;
}

CheckResult check_report_roundtrip() {
    CheckResult result{"report_roundtrip", true, ""};
    MetricReport report;
    report.set_meta("tool", "vmetrics");
    report.add("dfci", 1, MaskMode::foreground, 0.123456789123);
    report.add("dfci", 2, MaskMode::fullframe, 3.0e-7);
    report.add("silhouette", std::nullopt, MaskMode::foreground, 0.8381234567);
    MetricReport parsed = parse_report_json(write_report(report, ReportFormat::json));
    if (parsed.entries.size() != report.entries.size()) {
        result.passed = false;
        result.detail = "entry count";
        return result;
    }
    for (size_t i = 0; i < report.entries.size(); ++i) {
        double a = report.entries[i].value, b = parsed.entries[i].value;
        if (std::fabs(a - b) > 1e-9 * std::max(std::fabs(a), 1e-30)) {
            result.passed = false;
            result.detail = "value drift at entry " + std::to_string(i);
        }
    }
    return result;
}

} // namespace

std::vector<CheckResult> run_self_check(const SelfCheckOptions &options) {
    std::vector<CheckResult> results;
    results.push_back(check_dfci_oracle());
    results.push_back(check_dfci_analytic());
    results.push_back(check_dice_oracle());
    results.push_back(check_attention());
    results.push_back(check_gradient(options.fault_flip_lambda_sign));
    results.push_back(check_flo_roundtrip());
    results.push_back(check_report_roundtrip());
    return results;
}

} // namespace vmetrics
