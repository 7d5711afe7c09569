#pragma once

#include <optional>

#include "artgen/articulation.hpp"
#include "artgen/contact.hpp"
#include "artgen/geometry.hpp"
#include "artgen/masks.hpp"
#include "artgen/oracle.hpp"
#include "artgen/replacement.hpp"

namespace artgen {

struct PipelineOptions {
    FilterConfig filter;
    double contact_radius = kDefaultContactRadius;
    EdgeSelectionConfig edges;
    MotionRecoveryConfig recovery;
    FitOptions fit;
    double replay_tol = 0.01;
};

struct PipelineResult {
    MotionScoreSeries series;
    ContactPair contact;
    JointModel joint;
    ArticulationTrace trace;
    ReplacementParams params;
    ReplayResult replay;
    EvalReport report;
};

// The seam-pair midpoint bias grows linearly with epsilon, so the auto value
// stays tight; joint_center relaxes it when too few pairs land inside.
inline double resolve_epsilon(const EdgeSelectionConfig& cfg, const OrientedBoundingBox& b_move) {
    return cfg.epsilon > 0.0 ? cfg.epsilon : 0.015 * b_move.diagonal();
}

// Joint model from segmented parts: OBB edge pairing, direction from the
// movable edge, center from seam point pairs (epsilon relaxed on demand).
inline JointModel estimate_joint(const LabeledPointCloud& part_move,
                                 const LabeledPointCloud& part_static, const Vec3& ee_dir,
                                 const Vec3& pc_move, JointKind kind,
                                 const EdgeSelectionConfig& cfg) {
    OrientedBoundingBox b_move = obb_fit(part_move.points);
    OrientedBoundingBox b_static = obb_fit(part_static.points);
    auto [e_static, e_move] = select_edge_pair(b_static, b_move, ee_dir, pc_move, kind, cfg);

    JointModel joint;
    joint.kind = kind;
    joint.direction = joint_direction(e_move);
    EdgeSelectionConfig resolved = cfg;
    resolved.epsilon = resolve_epsilon(cfg, b_move);
    joint.center = e_move.point_at(0.5);
    for (int attempt = 0; attempt < 3; ++attempt) {
        try {
            joint.center = joint_center(part_move, part_static, e_move, e_static, resolved);
            break;
        } catch (const InsufficientPairs&) {
            resolved.epsilon *= 2.0;  // relax and retry; edge midpoint is the last resort
        }
    }
    return joint;
}

// Full estimation chain on one scene: keyframes -> contact -> joint ->
// motion recovery -> replacement fit (the scene's own object re-fitted as its
// replacement) -> replay check, scored against the scene's ground truth.
inline PipelineResult run_pipeline(const SceneData& scene, const PipelineOptions& opts = {}) {
    PipelineResult res;
    res.series = compute_motion_series(scene.masks, opts.filter);
    int start = res.series.start_frame;
    int end = res.series.end_frame;

    const LabeledPointCloud& frame_cloud = scene.clouds[static_cast<std::size_t>(start)];
    LabeledPointCloud movable = frame_cloud.filter(label::kMovable);
    LabeledPointCloud statics = frame_cloud.filter(label::kStatic);
    LabeledPointCloud robot = frame_cloud.filter_robot();

    Vec3 ee_dir = scene.ee.poses[static_cast<std::size_t>(start)].rotation.rotate({0, 0, 1});
    res.contact = detect_contact(robot, movable, ee_dir, start, opts.contact_radius);

    res.joint = estimate_joint(movable, statics, ee_dir, res.contact.pc_move,
                               scene.config.kind, opts.edges);

    ContactTrajectory traj;
    traj.points.assign(scene.contact_points.begin() + start,
                       scene.contact_points.begin() + end + 1);
    res.trace = recover_motion(movable, res.joint, res.contact, traj, opts.recovery);

    // Re-fit the scene's own rest-pose object as its replacement asset.
    const LabeledPointCloud& rest_cloud = scene.clouds.front();
    ReplacementAsset asset;
    asset.part_move = rest_cloud.filter(label::kMovable);
    asset.part_static = rest_cloud.filter(label::kStatic);
    asset.joint = res.joint;
    asset.base_pose = RigidTransform::identity();

    Vec3 pc_map = nocs_map(movable, asset.part_move, res.contact.pc_move);
    FrameWindow window{start, end};
    // Drive the fit with the recovered motion profile: real demonstrations are
    // not constant speed, and a constant-speed model leaks phase error into
    // the offset parameters.
    std::vector<double> profile = detail::normalize_profile(res.trace.theta);
    const std::vector<double>* prof = profile.empty() ? nullptr : &profile;
    ReplacementParams g1 = fit_stage1(pc_map, asset, traj, window, opts.fit, prof);
    res.params = fit_stage2(asset, traj, g1, pc_map, window, opts.fit, prof);

    res.replay = replay_check(asset, res.params, traj, res.trace, opts.replay_tol,
                              opts.fit.face_radius);

    res.report = evaluate(res.joint, res.trace, start, end, scene.truth);
    res.report.replay_success = res.replay.success;
    return res;
}

}  // namespace artgen
