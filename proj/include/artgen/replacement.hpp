#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "artgen/articulation.hpp"
#include "artgen/errors.hpp"
#include "artgen/geometry.hpp"
#include "artgen/nelder_mead.hpp"

namespace artgen {

struct ReplacementAsset {
    LabeledPointCloud part_move;
    LabeledPointCloud part_static;
    JointModel joint;          // in the asset frame
    RigidTransform base_pose;  // asset frame -> scene frame
};

// g = [scale, total motion over the window, xy offset in the object frame].
struct ReplacementParams {
    double s = 1.0;
    double r_init = 0.0;
    double offset_x = 0.0;
    double offset_y = 0.0;
};

namespace detail {

struct SceneAsset {
    LabeledPointCloud part_move;
    LabeledPointCloud part_static;
    JointModel joint;
    Vec3 origin;  // asset origin expressed in the scene frame
};

inline SceneAsset to_scene(const ReplacementAsset& asset) {
    SceneAsset s;
    s.part_move = transform_cloud(asset.base_pose, asset.part_move);
    s.part_static = transform_cloud(asset.base_pose, asset.part_static);
    s.joint.kind = asset.joint.kind;
    s.joint.direction = asset.base_pose.rotation.rotate(asset.joint.direction);
    s.joint.center = asset.base_pose.apply(asset.joint.center);
    s.origin = asset.base_pose.translation;
    return s;
}

// Scale about the asset origin, articulate by alpha, then apply the xy offset.
inline Vec3 place_point(const SceneAsset& a, const ReplacementParams& g, double alpha,
                        const Vec3& p) {
    Vec3 ps = a.origin + g.s * (p - a.origin);
    Vec3 cs = a.origin + g.s * (a.joint.center - a.origin);
    Vec3 moved;
    if (a.joint.kind == JointKind::prismatic) {
        moved = ps + alpha * a.joint.direction;
    } else {
        UnitQuat r = UnitQuat::from_axis_angle(a.joint.direction, alpha);
        moved = cs + r.rotate(ps - cs);
    }
    return moved + Vec3{g.offset_x, g.offset_y, 0.0};
}

inline JointModel place_joint(const SceneAsset& a, const ReplacementParams& g) {
    JointModel j = a.joint;
    j.center = a.origin + g.s * (a.joint.center - a.origin) + Vec3{g.offset_x, g.offset_y, 0.0};
    return j;
}

// Per-frame articulation under the constant-speed assumption.
inline double constant_speed_alpha(const ReplacementParams& g, int t, int start, int end) {
    return g.r_init * static_cast<double>(t - start) / static_cast<double>(end - start);
}

// Articulation fraction per frame: supplied profile weights (e.g. a recovered
// motion trace normalized to end at 1) or the constant-speed ramp.
inline double profile_alpha(const ReplacementParams& g, const std::vector<double>* profile, int t,
                            int start, int end) {
    if (profile) {
        std::size_t i = static_cast<std::size_t>(t - start);
        if (i >= profile->size())
            throw FrameMismatch("fit: profile shorter than the frame window");
        return g.r_init * (*profile)[i];
    }
    return constant_speed_alpha(g, t, start, end);
}

// Normalizes a recovered articulation trace into profile weights ending at 1;
// empty when the trace carries no usable motion.
inline std::vector<double> normalize_profile(const std::vector<double>& theta) {
    if (theta.empty() || std::abs(theta.back()) < 1e-9) return {};
    std::vector<double> w(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) w[i] = theta[i] / theta.back();
    return w;
}

}  // namespace detail

// Applies g to the whole asset: parts scaled about the asset origin, movable
// part pre-articulated by r_init, everything offset in xy. The result lives in
// the scene frame (identity base pose).
inline ReplacementAsset apply_params(const ReplacementAsset& asset, const ReplacementParams& g) {
    if (g.s < 0.1 || g.s > 10.0) throw BadConfig("apply_params: scale outside [0.1, 10]");
    detail::SceneAsset scene = detail::to_scene(asset);
    ReplacementAsset out;
    out.base_pose = RigidTransform::identity();
    out.joint = detail::place_joint(scene, g);

    out.part_move.labels = scene.part_move.labels;
    for (const auto& p : scene.part_move.points)
        out.part_move.points.push_back(detail::place_point(scene, g, g.r_init, p));
    out.part_static.labels = scene.part_static.labels;
    for (const auto& p : scene.part_static.points)
        out.part_static.points.push_back(detail::place_point(scene, g, 0.0, p));
    return out;
}

struct FitOptions {
    NelderMeadOptions solver;
    double face_radius = 0.03;
    double divergence_factor = 10.0;
};

struct FrameWindow {
    int start = 0;
    int end = 0;
};

// Rough estimate of the total motion implied by the contact trajectory and the
// asset joint, used to seed the multi-start lattice.
inline double estimate_total_motion(const ReplacementAsset& asset, const ContactTrajectory& traj) {
    detail::SceneAsset scene = detail::to_scene(asset);
    const Vec3& d = scene.joint.direction;
    const Vec3& first = traj.points.front();
    const Vec3& last = traj.points.back();
    if (scene.joint.kind == JointKind::prismatic) return (last - first).dot(d);
    Vec3 a = first - scene.joint.center;
    Vec3 b = last - scene.joint.center;
    a = a - a.dot(d) * d;
    b = b - b.dot(d) * d;
    if (a.norm() < 1e-9 || b.norm() < 1e-9) return 0.0;
    double c = std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0);
    double angle = std::acos(c);
    return a.cross(b).dot(d) >= 0.0 ? angle : -angle;
}

namespace detail {

inline double penalty_if_out_of_bounds(const ReplacementParams& g) {
    double pen = 0.0;
    if (g.s < 0.1) pen += 0.1 - g.s;
    if (g.s > 10.0) pen += g.s - 10.0;
    return pen > 0.0 ? 1e6 * (1.0 + pen) : 0.0;
}

inline ReplacementParams unpack(const std::vector<double>& x) {
    return {x[0], x[1], x[2], x[3]};
}

// Points within `radius` of `center`; the radius doubles (up to 3 times) when
// too few land inside, so sparse sampling never starves the plane fit.
inline std::vector<Vec3> face_points(const std::vector<Vec3>& pts, const Vec3& center,
                                     double radius, std::size_t min_count = 8) {
    std::vector<Vec3> out;
    for (int attempt = 0; attempt < 4; ++attempt) {
        out.clear();
        for (const auto& p : pts)
            if ((p - center).norm() <= radius) out.push_back(p);
        if (out.size() >= min_count) return out;
        radius *= 2.0;
    }
    return out;
}

}  // namespace detail

// Stage-1 objective: summed distance between the observed contact trajectory
// and the mapped contact point articulated at constant speed under g.
inline double fit_objective_stage1(const Vec3& pc_map, const ReplacementAsset& asset,
                                   const ContactTrajectory& traj, const ReplacementParams& g,
                                   FrameWindow frames,
                                   const std::vector<double>* profile = nullptr) {
    detail::SceneAsset scene = detail::to_scene(asset);
    double pen = detail::penalty_if_out_of_bounds(g);
    if (pen > 0.0) return pen;
    double sum = 0.0;
    for (int t = frames.start; t <= frames.end; ++t) {
        double alpha = detail::profile_alpha(g, profile, t, frames.start, frames.end);
        sum += (traj.points[static_cast<std::size_t>(t - frames.start)] -
                detail::place_point(scene, g, alpha, pc_map))
                   .norm();
    }
    return sum;
}

// Stage 1 (rough fit): Nelder-Mead multi-start over (s, r_init, offset_x,
// offset_y) against the constant-speed contact objective.
inline ReplacementParams fit_stage1(const Vec3& pc_map, const ReplacementAsset& asset,
                                    const ContactTrajectory& traj, FrameWindow frames,
                                    const FitOptions& opts = {},
                                    const std::vector<double>* profile = nullptr) {
    if (frames.end - frames.start < 1 || traj.points.size() < 2)
        throw OptimizationDiverged("fit_stage1: zero-length motion window");
    if (static_cast<int>(traj.points.size()) != frames.end - frames.start + 1)
        throw FrameMismatch("fit_stage1: trajectory length does not match the frame window");

    detail::SceneAsset scene = detail::to_scene(asset);
    auto f1 = [&](const std::vector<double>& x) {
        return fit_objective_stage1(pc_map, asset, traj, detail::unpack(x), frames, profile);
    };

    double expected = estimate_total_motion(asset, traj);
    if (std::abs(expected) < 1e-6)
        expected = scene.joint.kind == JointKind::revolute ? 0.5 : 0.05;

    std::vector<std::vector<double>> seeds;
    for (double s : {0.7, 1.0, 1.3})
        for (double r : {expected, -expected}) seeds.push_back({s, r, 0.0, 0.0});
    seeds.push_back({1.0, 0.5 * expected, 0.0, 0.0});
    seeds.push_back({1.0, -0.5 * expected, 0.0, 0.0});

    double r_scale = scene.joint.kind == JointKind::revolute ? 0.2 : 0.02;
    std::vector<double> scale{0.1, r_scale, 0.02, 0.02};

    NelderMeadResult best;
    best.fx = std::numeric_limits<double>::max();
    for (const auto& seed : seeds) {
        auto res = nelder_mead(f1, seed, scale, opts.solver);
        if (res.fx < best.fx) best = res;
    }

    double arc = 0.0;
    for (std::size_t i = 1; i < traj.points.size(); ++i)
        arc += (traj.points[i] - traj.points[i - 1]).norm();
    if (best.fx > opts.divergence_factor * std::max(arc, 1e-6))
        throw OptimizationDiverged("fit_stage1: best objective above divergence threshold");
    return detail::unpack(best.x);
}

// Stage-2 objective: the slip-tolerant plane/trajectory intersection residual
// of the transformed asset's contact face.
inline double fit_objective_stage2(const ReplacementAsset& asset, const ContactTrajectory& traj,
                                   const ReplacementParams& g, const Vec3& contact_face,
                                   FrameWindow frames, double face_radius = 0.03,
                                   const std::vector<double>* profile = nullptr) {
    detail::SceneAsset scene = detail::to_scene(asset);
    detail::Plane face_rest =
        detail::fit_plane(detail::face_points(scene.part_move.points, contact_face, face_radius));
    detail::Polyline polyline(traj.points);

    double pen = detail::penalty_if_out_of_bounds(g);
    if (pen > 0.0) return pen;
    double sum = 0.0;
    for (int t = frames.start; t <= frames.end; ++t) {
        std::size_t i = static_cast<std::size_t>(t - frames.start);
        double alpha = detail::profile_alpha(g, profile, t, frames.start, frames.end);
        // Transform the rest face plane under g at articulation alpha.
        Vec3 p0 = detail::place_point(scene, g, alpha, face_rest.point);
        Vec3 p1 = detail::place_point(scene, g, alpha, face_rest.point + 0.01 * face_rest.normal);
        detail::Plane moved{p0, (p1 - p0).normalized()};
        auto ip = polyline.intersect(moved, polyline.arc[i]);
        if (ip)
            sum += (traj.points[i] - *ip).norm();
        else
            sum += std::abs(moved.signed_distance(traj.points[i]));
    }
    return sum;
}

// Stage 2 (refinement): Nelder-Mead seeded at the stage-1 result; by
// construction the returned g never worsens the stage-2 objective.
inline ReplacementParams fit_stage2(const ReplacementAsset& asset, const ContactTrajectory& traj,
                                    const ReplacementParams& g0, const Vec3& contact_face,
                                    FrameWindow frames, const FitOptions& opts = {},
                                    const std::vector<double>* profile = nullptr) {
    if (frames.end - frames.start < 1 || traj.points.size() < 2)
        throw OptimizationDiverged("fit_stage2: zero-length motion window");

    // Refinement only: a soft trust region around the stage-1 result keeps the
    // search where the plane-residual objective is well conditioned.
    const double r_radius = asset.joint.kind == JointKind::revolute ? 0.3 : 0.03;
    const std::array<double, 4> center{g0.s, g0.r_init, g0.offset_x, g0.offset_y};
    const std::array<double, 4> radius{0.15, r_radius, 0.03, 0.03};
    auto f2 = [&](const std::vector<double>& x) {
        double pen = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            double over = std::abs(x[i] - center[i]) - radius[i];
            if (over > 0.0) pen += over;
        }
        if (pen > 0.0) return 1e6 * (1.0 + pen);
        return fit_objective_stage2(asset, traj, detail::unpack(x), contact_face, frames,
                                    opts.face_radius, profile);
    };
    double r_scale = asset.joint.kind == JointKind::revolute ? 0.05 : 0.005;
    std::vector<double> scale{0.02, r_scale, 0.005, 0.005};
    auto res = nelder_mead(f2, {g0.s, g0.r_init, g0.offset_x, g0.offset_y}, scale, opts.solver);

    double arc = 0.0;
    for (std::size_t i = 1; i < traj.points.size(); ++i)
        arc += (traj.points[i] - traj.points[i - 1]).norm();
    if (res.fx > opts.divergence_factor * std::max(arc, 1e-6))
        throw OptimizationDiverged("fit_stage2: best objective above divergence threshold");
    return detail::unpack(res.x);
}

struct ReplayResult {
    bool success = false;
    double max_error = 0.0;
};

// Replays the recovered articulation trace on the adapted asset and checks the
// contact trajectory stays on the articulated contact face. The r_init entry
// of g is ignored here; the trace supplies the per-frame articulation.
inline ReplayResult replay_check(const ReplacementAsset& asset, const ReplacementParams& g,
                                 const ContactTrajectory& traj, const ArticulationTrace& trace,
                                 double tol = 0.01, double face_radius = 0.03) {
    if (trace.theta.size() != traj.points.size())
        throw FrameMismatch("replay_check: trace and trajectory lengths differ");
    detail::SceneAsset scene = detail::to_scene(asset);
    ReplacementParams g_static{g.s, 0.0, g.offset_x, g.offset_y};

    // Contact face of the adapted (scaled + offset) asset around the first
    // trajectory point, which is the contact at motion onset.
    std::vector<Vec3> placed;
    placed.reserve(scene.part_move.points.size());
    for (const auto& p : scene.part_move.points)
        placed.push_back(detail::place_point(scene, g_static, 0.0, p));
    detail::Plane face =
        detail::fit_plane(detail::face_points(placed, traj.points.front(), face_radius));
    JointModel joint = detail::place_joint(scene, g);

    ReplayResult out;
    for (std::size_t i = 0; i < traj.points.size(); ++i) {
        detail::Plane moved = detail::articulate_plane(face, joint, trace.theta[i]);
        double err = std::abs(moved.signed_distance(traj.points[i]));
        out.max_error = std::max(out.max_error, err);
    }
    out.success = out.max_error <= tol;
    return out;
}

}  // namespace artgen
