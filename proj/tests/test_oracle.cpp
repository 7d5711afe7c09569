#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "artgen/oracle.hpp"
#include "artgen/pipeline.hpp"

using namespace artgen;

namespace {
constexpr double kPi = M_PI;
}

TEST_CASE("gen_scene is deterministic per seed") {
    SceneConfig cfg;
    cfg.seed = 77;
    cfg.frames = 40;
    cfg.noise.mask_jitter_px = 2;
    cfg.noise.slip_m = 0.005;
    SceneData a = gen_scene(cfg);
    SceneData b = gen_scene(cfg);
    REQUIRE(a.clouds.size() == b.clouds.size());
    for (std::size_t f = 0; f < a.clouds.size(); ++f) {
        REQUIRE(a.clouds[f].size() == b.clouds[f].size());
        for (std::size_t i = 0; i < a.clouds[f].size(); ++i) {
            CHECK(a.clouds[f].points[i].x == b.clouds[f].points[i].x);
            CHECK(a.clouds[f].labels[i] == b.clouds[f].labels[i]);
        }
        CHECK(a.masks.frames[f].first.bits == b.masks.frames[f].first.bits);
        CHECK(a.masks.frames[f].second.bits == b.masks.frames[f].second.bits);
    }
    CHECK(a.truth.theta_true == b.truth.theta_true);
}

TEST_CASE("gen_scene uniform profile ramps linearly over the motion window") {
    SceneConfig cfg;
    cfg.magnitude = kPi / 2.0;
    cfg.frames = 50;
    cfg.seed = 3;
    SceneData scene = gen_scene(cfg);
    int s = scene.truth.start_true, e = scene.truth.end_true;
    CHECK(scene.truth.theta_true[static_cast<std::size_t>(s)] == 0.0);
    for (int f = 0; f < s; ++f) CHECK(scene.truth.theta_true[static_cast<std::size_t>(f)] == 0.0);
    for (int f = e + 1; f < cfg.frames; ++f)
        CHECK(scene.truth.theta_true[static_cast<std::size_t>(f)] ==
              Catch::Approx(cfg.magnitude));
    // Linear in between.
    int span = (e + 1) - s;
    for (int f = s; f <= e; ++f)
        CHECK(scene.truth.theta_true[static_cast<std::size_t>(f)] ==
              Catch::Approx(cfg.magnitude * double(f - s) / span).margin(1e-12));
}

TEST_CASE("gen_scene ease-in-out prismatic follows the smoothstep profile") {
    SceneConfig cfg;
    cfg.kind = JointKind::prismatic;
    cfg.lid_size = {0.28, 0.32, 0.1};
    cfg.profile = MotionProfile::ease_in_out;
    cfg.magnitude = 0.2;
    cfg.seed = 5;
    SceneData scene = gen_scene(cfg);
    int s = scene.truth.start_true, e = scene.truth.end_true;
    int span = (e + 1) - s;
    CHECK(scene.truth.theta_true.front() == 0.0);
    CHECK(scene.truth.theta_true.back() == Catch::Approx(0.2));
    for (int f = s; f <= e; ++f) {
        double u = double(f - s) / span;
        double expect = 0.2 * u * u * (3.0 - 2.0 * u);
        CHECK(scene.truth.theta_true[static_cast<std::size_t>(f)] ==
              Catch::Approx(expect).margin(1e-12));
    }
}

TEST_CASE("gen_scene validates its configuration") {
    SceneConfig cfg;
    cfg.frames = 5;
    CHECK_THROWS_AS(gen_scene(cfg), BadConfig);
    cfg = {};
    cfg.base_size.x = -1.0;
    CHECK_THROWS_AS(gen_scene(cfg), BadConfig);
    cfg = {};
    cfg.motion_start_frac = 0.9;
    cfg.motion_end_frac = 0.5;
    CHECK_THROWS_AS(gen_scene(cfg), BadConfig);
}

TEST_CASE("gen_scene parts are well sized and labeled") {
    SceneConfig cfg;
    cfg.seed = 9;
    SceneData scene = gen_scene(cfg);
    REQUIRE(static_cast<int>(scene.clouds.size()) == cfg.frames);
    for (const auto& cloud : scene.clouds) {
        CHECK(cloud.filter(label::kMovable).size() >= 2000);
        CHECK(cloud.filter(label::kStatic).size() >= 2000);
        CHECK(cloud.filter_robot().size() > 0);
    }
    CHECK(scene.ee.poses.size() == scene.clouds.size());
    CHECK(scene.contact_points.size() == scene.clouds.size());
}

TEST_CASE("render_mask projects a unit square to the expected pixel blob") {
    CameraConfig camera;
    camera.axis = 2;  // project along z: (x, y) -> image
    camera.scale = 100.0;
    camera.center = {0, 0, 0};
    std::vector<Vec3> pts;
    for (int i = 0; i <= 100; ++i)
        for (int j = 0; j <= 100; ++j)
            pts.push_back({-0.5 + 0.01 * i, -0.5 + 0.01 * j, 0.0});
    MaskFrame mask = render_mask(pts, camera, 200, 200);
    // Bounding box of set pixels: about 100x100 plus the 1 px dilation.
    int xmin = 200, xmax = -1, ymin = 200, ymax = -1;
    for (int y = 0; y < 200; ++y)
        for (int x = 0; x < 200; ++x)
            if (mask.at(x, y)) {
                xmin = std::min(xmin, x); xmax = std::max(xmax, x);
                ymin = std::min(ymin, y); ymax = std::max(ymax, y);
            }
    CHECK(std::abs((xmax - xmin + 1) - 100) <= 4);
    CHECK(std::abs((ymax - ymin + 1) - 100) <= 4);

    // A single centered point: the center pixel plus its dilation ring.
    MaskFrame dot = render_mask({{0, 0, 0}}, camera, 200, 200);
    CHECK(dot.count() == 9);
    CHECK(dot.at(100, 100));

    // Pixels far from any projected point stay clear.
    CHECK_FALSE(mask.at(5, 5));
    CHECK_THROWS_AS(render_mask({}, camera, 200, 200), BadConfig);
}

TEST_CASE("evaluate scores exact estimates as zero error") {
    SceneConfig cfg;
    cfg.seed = 21;
    SceneData scene = gen_scene(cfg);
    int s = scene.truth.start_true, e = scene.truth.end_true;
    ArticulationTrace trace;
    trace.start_frame = s;
    for (int f = s; f <= e; ++f) {
        trace.theta.push_back(scene.truth.theta_true[static_cast<std::size_t>(f)]);
        trace.residuals.push_back(0.0);
    }
    EvalReport r = evaluate(scene.truth.joint, trace, s, e, scene.truth);
    CHECK(r.direction_err_deg == Catch::Approx(0.0).margin(1e-9));
    CHECK(r.center_axis_dist_m == Catch::Approx(0.0).margin(1e-12));
    CHECK(r.theta_rmse == Catch::Approx(0.0).margin(1e-12));
    CHECK(r.keyframe_start_offset == 0);
    CHECK(r.keyframe_end_offset == 0);
}

TEST_CASE("evaluate direction error is sign-insensitive") {
    GroundTruth truth;
    truth.joint.kind = JointKind::revolute;
    truth.joint.direction = {1, 0, 0};
    truth.joint.center = {0, 0, 0};
    truth.theta_true = {0, 0.1, 0.2};
    JointModel est = truth.joint;
    est.direction = {-1, 0, 0};
    EvalReport r = evaluate(est, {}, 0, 2, truth);
    CHECK(r.direction_err_deg == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("evaluate center error is point-to-axis-line distance") {
    GroundTruth truth;
    truth.joint.kind = JointKind::revolute;
    truth.joint.direction = {1, 0, 0};
    truth.joint.center = {0, 0, 0};
    truth.theta_true = {0, 0.1};
    JointModel est = truth.joint;
    est.center = {0.3, 0.05, 0.0};  // 0.3 along the axis does not count
    EvalReport r = evaluate(est, {}, 0, 1, truth);
    CHECK(r.center_axis_dist_m == Catch::Approx(0.05).margin(1e-12));
}

TEST_CASE("random_scene_config is deterministic and in documented ranges") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SceneConfig a = random_scene_config(JointKind::revolute, seed);
        SceneConfig b = random_scene_config(JointKind::revolute, seed);
        CHECK(a.base_size.x == b.base_size.x);
        CHECK(a.magnitude == b.magnitude);
        CHECK(a.frames == b.frames);
        CHECK(a.frames >= 50);
        CHECK(a.frames <= 70);
        CHECK(a.magnitude >= 60.0 * kPi / 180.0);
        CHECK(a.magnitude <= 88.0 * kPi / 180.0);
        SceneConfig p = random_scene_config(JointKind::prismatic, seed);
        CHECK(p.magnitude >= 0.12);
        CHECK(p.magnitude <= 0.20);
        CHECK(p.lid_size.x < p.base_size.x);
    }
}

TEST_CASE("noiseless pipeline end to end on one scene of each kind") {
    for (JointKind kind : {JointKind::revolute, JointKind::prismatic}) {
        SceneConfig cfg = random_scene_config(kind, 321);
        SceneData scene = gen_scene(cfg);
        PipelineResult res = run_pipeline(scene);
        CAPTURE(kind == JointKind::revolute);
        CHECK(res.report.direction_err_deg <= 2.0);
        if (kind == JointKind::revolute) {
            double diag = scene.clouds.front().diameter();
            CHECK(res.report.center_axis_dist_m <= 0.01 * diag);
            CHECK(res.report.theta_rmse <= 0.5 * kPi / 180.0);
        } else {
            CHECK(res.report.theta_rmse <= 5e-4);
        }
        CHECK(std::abs(res.report.keyframe_start_offset) <= 1);
        CHECK(std::abs(res.report.keyframe_end_offset) <= 1);
        CHECK(res.replay.success);
    }
}
