#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "artgen/masks.hpp"
#include "artgen/oracle.hpp"

using namespace artgen;

namespace {

MaskFrame columns(int w, int h, int lo, int hi) {  // columns [lo, hi) set
    MaskFrame m(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = lo; x < hi; ++x) m.set(x, y);
    return m;
}

}  // namespace

TEST_CASE("subtract_masks removes robot pixels crosswise") {
    // Dynamic mask covers columns 0-4; the other frame's robot covers column 4.
    MaskFrame dyn_t = columns(10, 10, 0, 5);
    MaskFrame dyn_t1 = columns(10, 10, 0, 5);
    MaskFrame rob_t = columns(10, 10, 4, 5);
    MaskFrame rob_t1 = columns(10, 10, 4, 5);
    auto [mt, mt1] = subtract_masks(dyn_t, rob_t1, dyn_t1, rob_t);
    CHECK(mt.count() == 40);
    CHECK(mt1.count() == 40);
    for (int y = 0; y < 10; ++y) CHECK_FALSE(mt.at(4, y));

    MaskFrame small(4, 4);
    CHECK_THROWS_AS(subtract_masks(dyn_t, small, dyn_t1, rob_t), DimensionMismatch);
}

TEST_CASE("motion_score is the vanished-pixel fraction") {
    MaskFrame a = columns(10, 10, 0, 5);  // 50 px
    MaskFrame b = columns(10, 10, 1, 6);  // column 0 (10 px) vanished
    CHECK(motion_score(a, b) == Catch::Approx(10.0 / 50.0));
    CHECK(motion_score(a, a) == 0.0);
    MaskFrame empty(10, 10);
    CHECK(motion_score(a, empty) == 1.0);
    CHECK_THROWS_AS(motion_score(empty, a), EmptyMask);
    MaskFrame wrong(8, 8);
    CHECK_THROWS_AS(motion_score(a, wrong), DimensionMismatch);
}

TEST_CASE("savgol window-5 order-2 coefficients") {
    auto c = savgol_coefficients(5, 2);
    REQUIRE(c.size() == 5);
    double expect[5] = {-3.0 / 35, 12.0 / 35, 17.0 / 35, 12.0 / 35, -3.0 / 35};
    for (int i = 0; i < 5; ++i) CHECK(c[static_cast<std::size_t>(i)] == Catch::Approx(expect[i]).margin(1e-12));

    std::vector<double> impulse{0, 0, 1, 0, 0};
    auto sm = savgol_smooth(impulse, 5, 2);
    CHECK(sm[2] == Catch::Approx(17.0 / 35).margin(1e-12));
}

TEST_CASE("savgol reproduces quadratics and preserves constants") {
    std::vector<double> quad, flat;
    for (int i = 0; i < 20; ++i) {
        double t = 0.1 * i;
        quad.push_back(1.5 + 0.3 * t - 0.7 * t * t);
        flat.push_back(4.25);
    }
    // Exact on interior samples; mirror padding bends the edges.
    auto sq = savgol_smooth(quad, 5, 2);
    for (std::size_t i = 2; i + 2 < quad.size(); ++i) CHECK(std::abs(sq[i] - quad[i]) < 1e-9);
    auto sf = savgol_smooth(flat, 5, 2);
    for (double v : sf) CHECK(std::abs(v - 4.25) < 1e-12);
}

TEST_CASE("savgol validates its configuration") {
    CHECK_THROWS_AS(savgol_coefficients(4, 2), BadFilterConfig);   // even window
    CHECK_THROWS_AS(savgol_coefficients(5, 5), BadFilterConfig);   // order >= window
    CHECK_THROWS_AS(savgol_smooth({1, 2, 3}, 5, 2), BadFilterConfig);  // series too short
}

TEST_CASE("dynamic_threshold on a constant and a sparse series") {
    std::vector<double> flat(10, 0.3);
    auto r = dynamic_threshold(flat);
    CHECK(r.baseline_b == Catch::Approx(0.3));
    CHECK(r.sigma_noise == Catch::Approx(0.0).margin(1e-12));
    CHECK(r.threshold_mu == Catch::Approx(0.3));

    // Eight zeros then two ones: B is the 20th percentile = 0, quiet sigma 0.
    std::vector<double> sparse{0, 0, 0, 0, 0, 0, 0, 0, 1, 1};
    auto s = dynamic_threshold(sparse);
    CHECK(s.baseline_b == 0.0);
    CHECK(s.sigma_noise == 0.0);
    CHECK(s.threshold_mu == 0.0);

    CHECK_THROWS_AS(dynamic_threshold({1, 2, 3}), BadConfig);
}

TEST_CASE("percentile is type-7 linear interpolation") {
    std::vector<double> v{1, 2, 3, 4, 5};
    CHECK(percentile(v, 0.0) == 1.0);
    CHECK(percentile(v, 1.0) == 5.0);
    CHECK(percentile(v, 0.5) == 3.0);
    CHECK(percentile(v, 0.20) == Catch::Approx(1.8));
    CHECK_THROWS_AS(percentile({}, 0.5), BadConfig);
}

TEST_CASE("extract_keyframes finds the first and last exceedance") {
    std::vector<double> s{0, 0, 0.5, 0.5, 0};
    auto [start, end] = extract_keyframes(s, 0.1);
    CHECK(start == 2);
    CHECK(end == 3);
    CHECK_THROWS_AS(extract_keyframes({0.0, 0.0, 0.0}, 0.1), NoMotionDetected);
}

TEST_CASE("compute_motion_series on an oracle scene is deterministic and accurate") {
    SceneConfig cfg;
    cfg.seed = 42;
    SceneData scene = gen_scene(cfg);
    auto s1 = compute_motion_series(scene.masks);
    auto s2 = compute_motion_series(scene.masks);
    CHECK(s1.raw == s2.raw);
    CHECK(s1.smoothed == s2.smoothed);
    CHECK(s1.start_frame == s2.start_frame);
    CHECK(s1.end_frame == s2.end_frame);

    // Noiseless: detected keyframes within one frame of ground truth.
    CHECK(std::abs(s1.start_frame - scene.truth.start_true) <= 1);
    CHECK(std::abs(s1.end_frame - scene.truth.end_true) <= 1);
}

TEST_CASE("threshold separates jitter noise from motion on a noisy scene") {
    SceneConfig cfg;
    cfg.seed = 7;
    cfg.noise.mask_jitter_px = 2;
    SceneData scene = gen_scene(cfg);
    auto s = compute_motion_series(scene.masks);

    // Quiet-frame scores (outside the true motion window) stay below mu;
    // motion-frame scores rise well above it.
    double quiet_max = 0.0, motion_min = 1.0;
    for (int t = 0; t < static_cast<int>(s.smoothed.size()); ++t) {
        if (t >= scene.truth.start_true + 3 && t <= scene.truth.end_true - 3)
            motion_min = std::min(motion_min, s.smoothed[static_cast<std::size_t>(t)]);
        else if (t < scene.truth.start_true - 3 || t > scene.truth.end_true + 3)
            quiet_max = std::max(quiet_max, s.smoothed[static_cast<std::size_t>(t)]);
    }
    CHECK(s.threshold_mu > quiet_max);
    CHECK(s.threshold_mu < motion_min);
    CHECK(std::abs(s.start_frame - scene.truth.start_true) <= 3);
    CHECK(std::abs(s.end_frame - scene.truth.end_true) <= 3);
}
