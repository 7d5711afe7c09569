#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "artgen/articulation.hpp"
#include "artgen/oracle.hpp"
#include "artgen/pipeline.hpp"

using namespace artgen;

namespace {

constexpr double kPi = M_PI;

// Joint estimate from a generated scene at its true motion start frame.
struct SceneJoint {
    SceneData scene;
    LabeledPointCloud movable;
    LabeledPointCloud statics;
    ContactPair contact;
    JointModel joint;
};

SceneJoint estimate_on_scene(const SceneConfig& cfg) {
    SceneJoint sj;
    sj.scene = gen_scene(cfg);
    int start = sj.scene.truth.start_true;
    const LabeledPointCloud& cloud = sj.scene.clouds[static_cast<std::size_t>(start)];
    sj.movable = cloud.filter(label::kMovable);
    sj.statics = cloud.filter(label::kStatic);
    Vec3 ee_dir = sj.scene.ee.poses[static_cast<std::size_t>(start)].rotation.rotate({0, 0, 1});
    sj.contact = detect_contact(cloud.filter_robot(), sj.movable, ee_dir, start);
    sj.joint = estimate_joint(sj.movable, sj.statics, ee_dir, sj.contact.pc_move, cfg.kind, {});
    return sj;
}

}  // namespace

TEST_CASE("edge_score on coincident, parallel and perpendicular edges") {
    Edge e{{0, 0, 0}, {1, 0, 0}};
    CHECK(edge_score(e, e, 1.0) == Catch::Approx(0.0).margin(1e-12));

    Edge parallel{{0, 1, 0}, {1, 1, 0}};  // offset by exactly norm_scale
    CHECK(edge_score(e, parallel, 1.0) == Catch::Approx(0.2).margin(1e-12));

    Edge perp{{0, 0, 0}, {0, 1, 0}};
    double d = 0.0;
    for (int i = 0; i < 16; ++i) {
        double t = i / 15.0;
        d += distance(e.point_at(t), perp.point_at(t));
    }
    d /= 16.0;
    CHECK(edge_score(e, perp, 1.0) == Catch::Approx(0.8 + 0.2 * d).margin(1e-12));

    CHECK_THROWS_AS(edge_score(e, e, 0.0), BadConfig);
}

TEST_CASE("select_edge_pair with zero lambdas minimizes the edge score") {
    OrientedBoundingBox bs;
    bs.center = {0, 0, 0.1};
    bs.half_extents = {0.2, 0.15, 0.1};
    OrientedBoundingBox bm;
    bm.center = {0, -0.13, 0.23};
    bm.half_extents = {0.2, 0.02, 0.03};

    EdgeSelectionConfig cfg;
    cfg.lambda2 = 0.0;
    cfg.lambda3 = 0.0;
    auto [es, em] = select_edge_pair(bs, bm, {0, 0, -1}, bm.center, JointKind::revolute, cfg);

    // Exhaustive argmin must match.
    double best = 1e18;
    Edge best_s = es, best_m = em;
    for (const auto& a : obb_edges(bs))
        for (const auto& b : obb_edges(bm)) {
            double sc = edge_score(a, b, bs.diagonal());
            if (sc < best - 1e-15) {
                best = sc;
                best_s = a;
                best_m = b;
            }
        }
    CHECK(distance(es.a, best_s.a) < 1e-12);
    CHECK(distance(em.a, best_m.a) < 1e-12);
}

TEST_CASE("joint_direction canonicalizes the sign") {
    CHECK(distance(joint_direction({{0, 0, 1}, {0, 0, 0}}), {0, 0, 1}) < 1e-12);
    CHECK(distance(joint_direction({{0, 0, 0}, {0, 0, 1}}), {0, 0, 1}) < 1e-12);
    Vec3 d = joint_direction({{0, 0, 0}, {-1, 0.1, 0}});
    CHECK(d.x > 0.0);  // the dominant component ends up positive
}

TEST_CASE("oracle revolute scene: direction and center recovered") {
    SceneConfig cfg;
    cfg.seed = 101;
    SceneJoint sj = estimate_on_scene(cfg);
    const JointModel& truth = sj.scene.truth.joint;

    double c = std::abs(sj.joint.direction.dot(truth.direction));
    CHECK(std::acos(std::clamp(c, 0.0, 1.0)) * 180.0 / kPi < 2.0);

    Vec3 rel = sj.joint.center - truth.center;
    Vec3 d = truth.direction;
    double axis_dist = (rel - rel.dot(d) * d).norm();
    double diag = sj.movable.diameter() + sj.statics.diameter();
    CHECK(axis_dist < 0.01 * diag);
}

TEST_CASE("oracle prismatic scene: direction aligned with the slide") {
    SceneConfig cfg;
    cfg.kind = JointKind::prismatic;
    cfg.lid_size = {0.28, 0.32, 0.1};
    cfg.magnitude = 0.16;
    cfg.seed = 103;
    SceneJoint sj = estimate_on_scene(cfg);
    double c = std::abs(sj.joint.direction.dot(sj.scene.truth.joint.direction));
    CHECK(std::acos(std::clamp(c, 0.0, 1.0)) * 180.0 / kPi < 2.0);
}

TEST_CASE("edge selection is invariant under rigid motion", "[property]") {
    SceneConfig cfg;
    cfg.seed = 107;
    SceneData scene = gen_scene(cfg);
    int start = scene.truth.start_true;
    const LabeledPointCloud& cloud = scene.clouds[static_cast<std::size_t>(start)];
    LabeledPointCloud movable = cloud.filter(label::kMovable);
    LabeledPointCloud statics = cloud.filter(label::kStatic);
    Vec3 ee_dir = scene.ee.poses[static_cast<std::size_t>(start)].rotation.rotate({0, 0, 1});
    Vec3 pc_move = scene.truth.contact_true;

    OrientedBoundingBox bm = obb_fit(movable.points);
    OrientedBoundingBox bs = obb_fit(statics.points);
    auto [es, em] = select_edge_pair(bs, bm, ee_dir, pc_move, JointKind::revolute);

    RigidTransform t{UnitQuat::from_axis_angle({0, 0, 1}, 0.8), {0.5, -0.2, 0.1}};
    OrientedBoundingBox bm2 = obb_fit(transform_cloud(t, movable).points);
    OrientedBoundingBox bs2 = obb_fit(transform_cloud(t, statics).points);
    auto [es2, em2] = select_edge_pair(bs2, bm2, t.rotation.rotate(ee_dir), t.apply(pc_move),
                                       JointKind::revolute);

    // The selected movable edge maps to the same physical edge (endpoints may swap).
    Vec3 m0 = t.apply(em.a), m1 = t.apply(em.b);
    bool same = (distance(m0, em2.a) < 1e-6 && distance(m1, em2.b) < 1e-6) ||
                (distance(m0, em2.b) < 1e-6 && distance(m1, em2.a) < 1e-6);
    CHECK(same);
}

TEST_CASE("joint_center needs enough seam pairs") {
    SceneConfig cfg;
    cfg.seed = 109;
    SceneData scene = gen_scene(cfg);
    int start = scene.truth.start_true;
    const LabeledPointCloud& cloud = scene.clouds[static_cast<std::size_t>(start)];
    LabeledPointCloud movable = cloud.filter(label::kMovable);
    LabeledPointCloud statics = cloud.filter(label::kStatic);

    OrientedBoundingBox bm = obb_fit(movable.points);
    OrientedBoundingBox bs = obb_fit(statics.points);
    Vec3 ee_dir = scene.ee.poses[static_cast<std::size_t>(start)].rotation.rotate({0, 0, 1});
    auto [es, em] = select_edge_pair(bs, bm, ee_dir, scene.truth.contact_true,
                                     JointKind::revolute);

    EdgeSelectionConfig cc;
    cc.epsilon = 0.015 * bm.diagonal();
    cc.k_pairs = 10;
    Vec3 center = joint_center(movable, statics, em, es, cc);
    Edge axis{scene.truth.joint.center - scene.truth.joint.direction,
              scene.truth.joint.center + scene.truth.joint.direction};
    CHECK(axis.distance_to(center) < 0.01);

    cc.k_pairs = 1000000;
    CHECK_THROWS_AS(joint_center(movable, statics, em, es, cc), InsufficientPairs);
    cc.k_pairs = 10;
    cc.epsilon = 0.0;
    CHECK_THROWS_AS(joint_center(movable, statics, em, es, cc), BadConfig);
}

TEST_CASE("recover_motion on a static trajectory yields a zero trace") {
    SceneConfig cfg;
    cfg.seed = 113;
    SceneData scene = gen_scene(cfg);
    int start = scene.truth.start_true;
    LabeledPointCloud movable =
        scene.clouds[static_cast<std::size_t>(start)].filter(label::kMovable);
    ContactPair contact;
    contact.pc_move = scene.truth.contact_true;
    contact.frame = start;

    ContactTrajectory still;
    for (int i = 0; i < 10; ++i)
        still.points.push_back(scene.truth.contact_true + Vec3{1e-5 * i, 0, 0});
    ArticulationTrace trace =
        recover_motion(movable, scene.truth.joint, contact, still);
    for (double th : trace.theta) CHECK(std::abs(th) < 1e-3);
}

TEST_CASE("recover_motion tracks a revolute oracle within half a degree") {
    SceneConfig cfg;
    cfg.seed = 127;
    SceneData scene = gen_scene(cfg);
    int start = scene.truth.start_true, end = scene.truth.end_true;
    LabeledPointCloud movable =
        scene.clouds[static_cast<std::size_t>(start)].filter(label::kMovable);
    ContactPair contact;
    contact.pc_move = scene.truth.contact_true;
    contact.frame = start;
    ContactTrajectory traj;
    traj.points.assign(scene.contact_points.begin() + start,
                       scene.contact_points.begin() + end + 1);

    ArticulationTrace trace = recover_motion(movable, scene.truth.joint, contact, traj);
    REQUIRE(trace.theta.size() == traj.points.size());
    double prev = -1e9;
    for (std::size_t i = 0; i < trace.theta.size(); ++i) {
        double truth = scene.truth.theta_true[static_cast<std::size_t>(start) + i];
        CHECK(std::abs(trace.theta[i] - truth) < 0.5 * kPi / 180.0);
        CHECK(trace.residuals[i] < 1e-3);
        CHECK(trace.theta[i] >= prev - 1e-6);  // monotone opening
        prev = trace.theta[i];
    }
}

TEST_CASE("recover_motion tracks a prismatic oracle within a millimeter") {
    SceneConfig cfg;
    cfg.kind = JointKind::prismatic;
    cfg.lid_size = {0.28, 0.32, 0.1};
    cfg.magnitude = 0.18;
    cfg.seed = 131;
    SceneData scene = gen_scene(cfg);
    int start = scene.truth.start_true, end = scene.truth.end_true;
    LabeledPointCloud movable =
        scene.clouds[static_cast<std::size_t>(start)].filter(label::kMovable);
    ContactPair contact;
    contact.pc_move = scene.truth.contact_true;
    contact.frame = start;
    ContactTrajectory traj;
    traj.points.assign(scene.contact_points.begin() + start,
                       scene.contact_points.begin() + end + 1);

    ArticulationTrace trace = recover_motion(movable, scene.truth.joint, contact, traj);
    double ss = 0.0;
    for (std::size_t i = 0; i < trace.theta.size(); ++i) {
        double err = trace.theta[i] - scene.truth.theta_true[static_cast<std::size_t>(start) + i];
        ss += err * err;
    }
    CHECK(std::sqrt(ss / static_cast<double>(trace.theta.size())) < 1e-3);
}
