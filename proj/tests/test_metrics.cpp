// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "test_support.hpp"
#include "vmetrics/metrics.hpp"

using namespace vmetrics;
using namespace testsupport;

namespace {

// Static textured background with a moving foreground block. The generated
// copy moves the block at a different rate, so flow errors concentrate in
// the foreground.
struct SyntheticPair {
    VideoFrames gt, gen;
    MaskSequence masks;
};

SyntheticPair moving_block_pair(int length, int h, int w, int gt_step,
                                int gen_step) {
    Image bg = textured_image(h, w, 21);
    SyntheticPair out;
    for (int t = 0; t < length; ++t) {
        auto make_frame = [&](int step) {
            Image frame = bg;
            int x0 = 4 + t * step;
            for (int y = h / 4; y < h / 2; ++y)
                for (int x = x0; x < x0 + w / 4; ++x)
                    frame.at(y, x % w) = 0.95f;
            return gray_to_rgb(frame);
        };
        out.gt.frames.push_back(make_frame(gt_step));
        out.gen.frames.push_back(make_frame(gen_step));
        Mask m(h, w);
        int x0 = 4 + t * gt_step;
        for (int y = h / 4; y < h / 2; ++y)
            for (int x = x0; x < x0 + w / 4; ++x) m.at(y, x % w) = 1;
        out.masks.masks.push_back(m);
    }
    return out;
}

} // namespace

TEST_CASE("dfci hand cases") {
    SUBCASE("identical flows give exactly zero") {
        std::mt19937 rng(1);
        for (int T = 1; T <= 3; ++T) {
            std::vector<FlowField> flows;
            for (int j = 0; j < 4; ++j) flows.push_back(random_flow(rng, 6, 6));
            CHECK(dfci(flows, flows, nullptr, T).value == 0.0);
        }
    }
    SUBCASE("1x1 example: gt [(1,0),(0,1)] vs gen zeros") {
        std::vector<FlowField> gt(2, FlowField(1, 1)), gen(2, FlowField(1, 1));
        gt[0].u[0] = 1.f;
        gt[1].v[0] = 1.f;
        DfciResult r = dfci(gt, gen, nullptr, 1);
        CHECK(r.value == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(r.valid_pair_count == 2);
    }
    SUBCASE("constant offset (0.5,-1.0) gives 0.75 exactly") {
        std::mt19937 rng(2);
        for (int T = 1; T <= 5; ++T) {
            std::vector<FlowField> gt, gen;
            for (int j = 0; j < 8 - T; ++j) {
                FlowField f = quantized_flow(rng, 10, 12);
                gt.push_back(f);
                for (size_t i = 0; i < f.size(); ++i) {
                    f.u[i] += 0.5f;
                    f.v[i] += -1.0f;
                }
                gen.push_back(f);
            }
            CHECK(dfci(gt, gen, nullptr, T).value ==
                  doctest::Approx(0.75).epsilon(1e-12));
        }
    }
}

TEST_CASE("dfci matches the naive reference loop") {
    const int L = 8, H = 16, W = 16;
    for (int seed = 0; seed < 30; ++seed) {
        std::mt19937 rng(seed);
        MaskSequence masks;
        for (int i = 0; i < L; ++i) masks.masks.push_back(random_mask(rng, H, W));
        for (int T = 1; T <= 5; ++T) {
            std::vector<FlowField> gt, gen;
            for (int t = T; t < L; ++t) {
                gt.push_back(random_flow(rng, H, W));
                gen.push_back(random_flow(rng, H, W));
            }
            for (bool fg : {false, true}) {
                double fast = dfci(gt, gen, &masks, T,
                                   fg ? MaskMode::foreground : MaskMode::fullframe)
                                  .value;
                double naive = dfci_reference(gt, gen, &masks, fg);
                CHECK(fast == doctest::Approx(naive).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("dfci properties") {
    std::mt19937 rng(3);
    std::vector<FlowField> a, b;
    for (int j = 0; j < 5; ++j) {
        a.push_back(random_flow(rng, 8, 8));
        b.push_back(random_flow(rng, 8, 8));
    }
    SUBCASE("symmetric in gt/gen") {
        CHECK(dfci(a, b, nullptr, 1).value == dfci(b, a, nullptr, 1).value);
    }
    SUBCASE("non-negative") { CHECK(dfci(a, b, nullptr, 1).value >= 0.0); }
    SUBCASE("empty-foreground pairs renormalize by valid count") {
        MaskSequence masks;
        masks.masks.push_back(Mask(8, 8)); // empty: pair skipped
        Mask full(8, 8, 1);
        for (int i = 1; i < 6; ++i) masks.masks.push_back(full);
        DfciResult r = dfci(a, b, &masks, 1, MaskMode::foreground);
        CHECK(r.valid_pair_count == 4);
        CHECK(r.value == doctest::Approx(dfci_reference(a, b, &masks, true)));
    }
    SUBCASE("all pairs empty is an error") {
        MaskSequence empty;
        for (int i = 0; i < 6; ++i) empty.masks.push_back(Mask(8, 8));
        CHECK_THROWS_AS(dfci(a, b, &empty, 1, MaskMode::foreground),
                        ValidationError);
    }
    SUBCASE("length mismatch is an error") {
        auto short_list = a;
        short_list.pop_back();
        CHECK_THROWS_AS(dfci(a, short_list, nullptr, 1), ValidationError);
    }
    SUBCASE("foreground >= fullframe when error is zero outside foreground") {
        std::vector<FlowField> gt(4, FlowField(8, 8)), gen(4, FlowField(8, 8));
        MaskSequence masks;
        Mask m(8, 8);
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 4; ++x) m.at(y, x) = 1;
        for (int j = 0; j < 5; ++j) masks.masks.push_back(m);
        for (auto &f : gen)
            for (int y = 0; y < 4; ++y)
                for (int x = 0; x < 4; ++x) f.u[static_cast<size_t>(y) * 8 + x] = 2.f;
        double fg = dfci(gt, gen, &masks, 1, MaskMode::foreground).value;
        double full = dfci(gt, gen, &masks, 1, MaskMode::fullframe).value;
        CHECK(fg >= full);
        CHECK(fg == doctest::Approx(1.0)); // 2.0 error over half the channels
        CHECK(full == doctest::Approx(0.25));
    }
    SUBCASE("monotone in T when per-pair drift grows with horizon") {
        double prev = -1.0;
        for (int T = 1; T <= 5; ++T) {
            std::vector<FlowField> gt, gen;
            for (int j = 0; j < 8 - T; ++j) {
                FlowField truth(8, 8);
                for (auto &u : truth.u) u = static_cast<float>(T);
                gt.push_back(truth);
                gen.push_back(FlowField(8, 8));
            }
            double value = dfci(gt, gen, nullptr, T).value;
            CHECK(value >= prev);
            prev = value;
        }
    }
}

TEST_CASE("dfci_suite") {
    SUBCASE("identical videos give all-zero entries") {
        SyntheticPair pair = moving_block_pair(6, 32, 32, 1, 1);
        DfciConfig config;
        config.horizons = {1, 2, 3};
        FlowParams params;
        params.iterations_per_level = 30;
        auto entries = dfci_suite(pair.gt, pair.gt, &pair.masks, config, params);
        CHECK(entries.size() == 6);
        for (const auto &e : entries) CHECK(e.value == 0.0);
    }
    SUBCASE("corrupted foreground motion: foreground mode reads higher") {
        SyntheticPair pair = moving_block_pair(7, 48, 48, 1, 2);
        DfciConfig config;
        config.horizons = {1, 2, 3};
        FlowParams params;
        params.iterations_per_level = 60;
        auto entries = dfci_suite(pair.gt, pair.gen, &pair.masks, config, params);
        for (int T : config.horizons) {
            double full = 0, fg = 0;
            for (const auto &e : entries) {
                if (e.horizon != T) continue;
                (e.mode == MaskMode::foreground ? fg : full) = e.value;
            }
            CAPTURE(T);
            CHECK(fg > full);
        }
    }
    SUBCASE("horizon exceeding sequence is an error") {
        SyntheticPair pair = moving_block_pair(4, 32, 32, 1, 1);
        DfciConfig config;
        config.horizons = {5};
        CHECK_THROWS_WITH_AS(
            dfci_suite(pair.gt, pair.gen, &pair.masks, config, {}),
            doctest::Contains("horizon exceeds sequence"), ValidationError);
    }
    SUBCASE("shape mismatch is a hard error, no resampling") {
        SyntheticPair a = moving_block_pair(4, 32, 32, 1, 1);
        SyntheticPair b = moving_block_pair(4, 48, 48, 1, 1);
        DfciConfig config;
        config.horizons = {1};
        CHECK_THROWS_AS(dfci_suite(a.gt, b.gen, &a.masks, config, {}),
                        ValidationError);
    }
}

TEST_CASE("dice") {
    std::mt19937 rng(4);
    Mask a = random_mask(rng, 16, 16);
    SUBCASE("identical nonempty") { CHECK(dice(a, a) == 1.0); }
    SUBCASE("disjoint nonempty") {
        Mask left(4, 4), right(4, 4);
        left.at(0, 0) = 1;
        right.at(3, 3) = 1;
        CHECK(dice(left, right) == 0.0);
    }
    SUBCASE("half overlap") {
        Mask p(2, 2), q(2, 2);
        p.at(0, 0) = p.at(0, 1) = 1;
        q.at(0, 1) = q.at(1, 0) = 1;
        CHECK(dice(p, q) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("both empty") { CHECK(dice(Mask(4, 4), Mask(4, 4)) == 1.0); }
    SUBCASE("empty vs nonempty") { CHECK(dice(a, Mask(16, 16)) == 0.0); }
    SUBCASE("symmetric and in range, matches set-counting reference") {
        for (int i = 0; i < 200; ++i) {
            Mask p = random_mask(rng, 12, 12);
            Mask q = random_mask(rng, 12, 12);
            double d = dice(p, q);
            CHECK(d >= 0.0);
            CHECK(d <= 1.0);
            CHECK(d == dice(q, p));
            CHECK(d == doctest::Approx(dice_reference(p, q)).epsilon(1e-12));
        }
    }
}

TEST_CASE("silhouette consistency") {
    SUBCASE("identical sequences") {
        std::mt19937 rng(5);
        MaskSequence seq;
        for (int i = 0; i < 5; ++i) seq.masks.push_back(random_mask(rng, 8, 8));
        CHECK(silhouette_consistency(seq, seq) == 1.0);
    }
    SUBCASE("per-frame dice [1, 0.5, 0] averages to 0.5") {
        MaskSequence gt, gen;
        Mask same(2, 2);
        same.at(0, 0) = 1;
        gt.masks.push_back(same);
        gen.masks.push_back(same);
        Mask p(2, 2), q(2, 2);
        p.at(0, 0) = p.at(0, 1) = 1;
        q.at(0, 1) = q.at(1, 0) = 1;
        gt.masks.push_back(p);
        gen.masks.push_back(q);
        Mask r(2, 2), s(2, 2);
        r.at(0, 0) = 1;
        s.at(1, 1) = 1;
        gt.masks.push_back(r);
        gen.masks.push_back(s);
        CHECK(silhouette_consistency(gt, gen) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("all empty frames") {
        MaskSequence seq;
        for (int i = 0; i < 3; ++i) seq.masks.push_back(Mask(4, 4));
        CHECK(silhouette_consistency(seq, seq) == 1.0);
    }
    SUBCASE("length mismatch") {
        MaskSequence a, b;
        a.masks.push_back(Mask(4, 4));
        CHECK_THROWS_AS(silhouette_consistency(a, b), ValidationError);
    }
}

TEST_CASE("classical frame metrics") {
    VideoFrames zeros = constant_video(3, 16, 16, 0.0);
    VideoFrames ones = constant_video(3, 16, 16, 1.0);
    VideoFrames tenth = constant_video(3, 16, 16, 0.1);

    SUBCASE("l1") {
        CHECK(l1_metric(zeros, zeros) == 0.0);
        CHECK(l1_metric(zeros, tenth) == doctest::Approx(0.1).epsilon(1e-7));
        VideoFrames half = zeros;
        // half of the pixels differ by 0.2
        for (auto &frame : half.frames)
            for (int y = 0; y < 16; ++y)
                for (int x = 0; x < 8; ++x)
                    for (int c = 0; c < 3; ++c) frame.at(y, x, c) = 0.2;
        CHECK(l1_metric(zeros, half) == doctest::Approx(0.1).epsilon(1e-7));
    }
    SUBCASE("psnr") {
        CHECK(psnr(ones, ones) == 100.0);
        CHECK(psnr(zeros, tenth) == doctest::Approx(20.0).epsilon(1e-9));
        CHECK(psnr(zeros, ones) == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("masked psnr") {
        MaskSequence masks;
        Mask m(16, 16);
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 16; ++x) m.at(y, x) = 1;
        for (int i = 0; i < 3; ++i) masks.masks.push_back(m);

        CHECK(masked_psnr(ones, ones, masks) == 100.0);

        // difference 0.1 only on the foreground
        VideoFrames gen = zeros;
        for (auto &frame : gen.frames)
            for (int y = 0; y < 8; ++y)
                for (int x = 0; x < 16; ++x)
                    for (int c = 0; c < 3; ++c) frame.at(y, x, c) = 0.1;
        CHECK(masked_psnr(zeros, gen, masks) == doctest::Approx(20.0).epsilon(1e-9));

        // difference only on the background: zero masked error
        VideoFrames bg_only = zeros;
        for (auto &frame : bg_only.frames)
            for (int y = 8; y < 16; ++y)
                for (int x = 0; x < 16; ++x)
                    for (int c = 0; c < 3; ++c) frame.at(y, x, c) = 0.7;
        CHECK(masked_psnr(zeros, bg_only, masks) == 100.0);

        MaskSequence empty;
        for (int i = 0; i < 3; ++i) empty.masks.push_back(Mask(16, 16));
        CHECK_THROWS_AS(masked_psnr(zeros, gen, empty), ValidationError);
    }
    SUBCASE("ssim") {
        VideoFrames tex;
        for (int i = 0; i < 2; ++i)
            tex.frames.push_back(gray_to_rgb(textured_image(32, 32, 31)));
        CHECK(ssim(tex, tex) == doctest::Approx(1.0).epsilon(1e-12));

        double c1 = 1e-4;
        CHECK(ssim(zeros, ones) == doctest::Approx(c1 / (1.0 + c1)).epsilon(1e-9));

        std::mt19937 rng(6);
        VideoFrames noisy = tex;
        std::uniform_real_distribution<double> jitter(-0.05, 0.05);
        for (auto &frame : noisy.frames)
            for (auto &v : frame.data) v = std::clamp(v + jitter(rng), 0.0, 1.0);
        CHECK(ssim(tex, noisy) == doctest::Approx(ssim(noisy, tex)).epsilon(1e-12));

        VideoFrames tiny = constant_video(2, 8, 8, 0.5);
        CHECK_THROWS_AS(ssim(tiny, tiny), ValidationError);
    }
    SUBCASE("shape mismatch errors") {
        VideoFrames other = constant_video(3, 16, 8, 0.0);
        CHECK_THROWS_AS(l1_metric(zeros, other), ValidationError);
        CHECK_THROWS_AS(psnr(zeros, other), ValidationError);
        CHECK_THROWS_AS(ssim(zeros, other), ValidationError);
    }
}
