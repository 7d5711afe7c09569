#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "artgen/contact.hpp"
#include "artgen/errors.hpp"
#include "artgen/geometry.hpp"

namespace artgen {

enum class JointKind { revolute, prismatic };

struct JointModel {
    JointKind kind = JointKind::revolute;
    Vec3 direction{0.0, 0.0, 1.0};  // unit
    Vec3 center;                    // meaningful for revolute only
};

struct EdgeSelectionConfig {
    double lambda1 = 1.0;
    double lambda2 = 0.3;
    double lambda3 = 0.3;
    int k_pairs = 50;
    double epsilon = 0.0;  // 0 = auto: 1.5% of the movable OBB diagonal
};

struct ArticulationTrace {
    int start_frame = 0;
    std::vector<double> theta;      // radians (revolute) or meters (prismatic)
    std::vector<double> residuals;  // meters
};

struct ContactTrajectory {
    std::vector<Vec3> points;  // PC_{r,t}, one per frame of the motion window

    void validate() const {
        if (points.size() < 2) throw BadConfig("contact trajectory needs >= 2 points");
    }
};

// Pairwise edge affinity: low for parallel, nearby edges. Distance term is the
// mean over 16 same-parameter sample pairs, normalized by norm_scale.
inline double edge_score(const Edge& e_static, const Edge& e_move, double norm_scale) {
    if (norm_scale <= 0.0) throw BadConfig("edge_score: norm_scale must be positive");
    double parallelism = std::abs(e_static.direction().dot(e_move.direction()));
    constexpr int kSamples = 16;
    double mean_dist = 0.0;
    for (int i = 0; i < kSamples; ++i) {
        double t = static_cast<double>(i) / (kSamples - 1);
        mean_dist += (e_static.point_at(t) - e_move.point_at(t)).norm();
    }
    mean_dist /= kSamples;
    return (1.0 - parallelism) * 0.8 + (mean_dist / norm_scale) * 0.2;
}

// Picks the static/movable edge pair adjacent to the joint. The ee-alignment
// and contact-distance terms flip sign with the joint kind: a revolute axis is
// perpendicular to the approach and far from the contact, a prismatic axis is
// aligned with the approach and near it.
inline std::pair<Edge, Edge> select_edge_pair(const OrientedBoundingBox& b_static,
                                              const OrientedBoundingBox& b_move,
                                              const Vec3& ee_dir, const Vec3& pc_move,
                                              JointKind kind,
                                              const EdgeSelectionConfig& cfg = {}) {
    auto static_edges = obb_edges(b_static);
    auto move_edges = obb_edges(b_move);
    Vec3 v_ee = ee_dir.normalized();
    double static_diag = std::max(b_static.diagonal(), 1e-9);
    double move_diag = std::max(b_move.diagonal(), 1e-9);
    double sign = kind == JointKind::revolute ? 1.0 : -1.0;

    double best = std::numeric_limits<double>::max();
    std::pair<Edge, Edge> best_pair{static_edges[0], move_edges[0]};
    for (std::size_t i = 0; i < static_edges.size(); ++i) {
        for (std::size_t j = 0; j < move_edges.size(); ++j) {
            const Edge& es = static_edges[i];
            const Edge& em = move_edges[j];
            double score = cfg.lambda1 * edge_score(es, em, static_diag) +
                           sign * cfg.lambda2 * std::abs(em.direction().dot(v_ee)) -
                           sign * cfg.lambda3 * em.distance_to(pc_move) / move_diag;
            if (score < best - 1e-15) {  // ties broken by lowest (i, j)
                best = score;
                best_pair = {es, em};
            }
        }
    }
    return best_pair;
}

// Unit direction of the paired movable edge, sign-canonicalized so the
// largest-magnitude component is positive.
inline Vec3 joint_direction(const Edge& e_move) {
    Vec3 d = e_move.direction();
    double ax = std::abs(d.x), ay = std::abs(d.y), az = std::abs(d.z);
    double lead = d.x;
    if (ay > ax && ay >= az) lead = d.y;
    else if (az > ax && az > ay) lead = d.z;
    return lead < 0.0 ? -d : d;
}

// Mean midpoint of the K closest movable/static point pairs near the paired edges.
inline Vec3 joint_center(const LabeledPointCloud& part_move,
                         const LabeledPointCloud& part_static, const Edge& e_move,
                         const Edge& e_static, const EdgeSelectionConfig& cfg) {
    if (part_move.empty() || part_static.empty()) throw Error("joint_center: empty part");
    double eps = cfg.epsilon;
    if (eps <= 0.0) throw BadConfig("joint_center: epsilon must be resolved before the call");

    std::vector<Vec3> static_near;
    for (const auto& p : part_static.points)
        if (e_static.distance_to(p) < eps) static_near.push_back(p);

    std::vector<std::pair<double, Vec3>> pairs;  // (distance, midpoint)
    if (!static_near.empty()) {
        detail::NearestNeighborIndex index(static_near);
        for (const auto& p : part_move.points) {
            if (e_move.distance_to(p) >= eps) continue;
            const Vec3& q = static_near[index.nearest(p)];
            pairs.emplace_back((p - q).norm(), (p + q) * 0.5);
        }
    }
    if (static_cast<int>(pairs.size()) < cfg.k_pairs)
        throw InsufficientPairs("joint_center: fewer candidate pairs than K");
    std::nth_element(pairs.begin(), pairs.begin() + cfg.k_pairs, pairs.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    Vec3 mean;
    for (int k = 0; k < cfg.k_pairs; ++k) mean += pairs[static_cast<std::size_t>(k)].second;
    return mean / static_cast<double>(cfg.k_pairs);
}

namespace detail {

struct Plane {
    Vec3 point;
    Vec3 normal;  // unit

    double signed_distance(const Vec3& p) const { return (p - point).dot(normal); }
};

// Least-squares plane through a set of points.
inline Plane fit_plane(const std::vector<Vec3>& pts) {
    if (pts.size() < 3) throw DegeneratePart("fit_plane: needs >= 3 points");
    Vec3 mean;
    for (const auto& p : pts) mean += p;
    mean = mean / static_cast<double>(pts.size());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(covariance(pts, mean));
    Eigen::Vector3d n = es.eigenvectors().col(0);
    return {mean, Vec3::from(n).normalized()};
}

// Articulates a plane: rotation about the joint axis or translation along it.
inline Plane articulate_plane(const Plane& plane, const JointModel& joint, double theta) {
    if (joint.kind == JointKind::prismatic)
        return {plane.point + theta * joint.direction, plane.normal};
    UnitQuat r = UnitQuat::from_axis_angle(joint.direction, theta);
    return {joint.center + r.rotate(plane.point - joint.center), r.rotate(plane.normal)};
}

struct Polyline {
    std::vector<Vec3> points;
    std::vector<double> arc;  // cumulative arc length per vertex

    explicit Polyline(const std::vector<Vec3>& pts) : points(pts) {
        arc.resize(pts.size(), 0.0);
        for (std::size_t i = 1; i < pts.size(); ++i)
            arc[i] = arc[i - 1] + (pts[i] - pts[i - 1]).norm();
    }

    // Intersection of the polyline with a plane, choosing the crossing nearest
    // in arc length to arc coordinate s_ref. Empty when no segment crosses.
    std::optional<Vec3> intersect(const Plane& plane, double s_ref) const {
        std::optional<Vec3> best;
        double best_gap = std::numeric_limits<double>::max();
        for (std::size_t i = 0; i + 1 < points.size(); ++i) {
            double da = plane.signed_distance(points[i]);
            double db = plane.signed_distance(points[i + 1]);
            if (da == 0.0 && db == 0.0) {
                // Segment lies in the plane: its nearest-in-arc endpoint counts.
                double gap_a = std::abs(arc[i] - s_ref);
                double gap_b = std::abs(arc[i + 1] - s_ref);
                if (std::min(gap_a, gap_b) < best_gap) {
                    best_gap = std::min(gap_a, gap_b);
                    best = gap_a <= gap_b ? points[i] : points[i + 1];
                }
                continue;
            }
            if ((da > 0.0 && db > 0.0) || (da < 0.0 && db < 0.0)) continue;
            double t = da / (da - db);
            Vec3 ip = points[i] + t * (points[i + 1] - points[i]);
            double s = arc[i] + t * (arc[i + 1] - arc[i]);
            double gap = std::abs(s - s_ref);
            if (gap < best_gap) {
                best_gap = gap;
                best = ip;
            }
        }
        return best;
    }
};

// Golden-section minimization; f need only be unimodal inside [lo, hi].
template <typename F>
inline double golden_section(F&& f, double lo, double hi, double tol = 1e-5) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// Coarse scan then golden-section refinement on the bracketing interval.
template <typename F>
inline std::pair<double, double> scan_and_refine(F&& f, double lo, double hi, int samples) {
    double best_x = lo;
    double best_f = std::numeric_limits<double>::max();
    for (int i = 0; i < samples; ++i) {
        double x = lo + (hi - lo) * static_cast<double>(i) / (samples - 1);
        double v = f(x);
        if (v < best_f) {
            best_f = v;
            best_x = x;
        }
    }
    double step = (hi - lo) / (samples - 1);
    double x = golden_section(f, std::max(lo, best_x - step), std::min(hi, best_x + step));
    double v = f(x);
    if (best_f < v) return {best_x, best_f};
    return {x, v};
}

}  // namespace detail

struct MotionRecoveryConfig {
    double face_radius = 0.03;  // meters, plane-fit neighborhood around the contact
    bool warm_start = true;     // frame-to-frame warm start (temporal coherence)
    double warm_window = 0.3;   // local bracket half-width around the previous theta
};

// Recovers the per-frame joint parameter by intersecting the articulated
// contact-face plane with the contact trajectory polyline (Tacj_r). Falls back
// to point-to-plane distance when the plane misses the polyline.
inline ArticulationTrace recover_motion(const LabeledPointCloud& part_move,
                                        const JointModel& joint, const ContactPair& contact,
                                        const ContactTrajectory& traj,
                                        const MotionRecoveryConfig& cfg = {}) {
    traj.validate();
    std::vector<Vec3> face_pts;
    for (const auto& p : part_move.points)
        if ((p - contact.pc_move).norm() <= cfg.face_radius) face_pts.push_back(p);
    detail::Plane face = detail::fit_plane(face_pts);

    detail::Polyline polyline(traj.points);

    double range = joint.kind == JointKind::revolute
                       ? M_PI
                       : 2.0 * part_move.diameter();

    auto objective = [&](double theta, std::size_t t) {
        detail::Plane moved = detail::articulate_plane(face, joint, theta);
        auto ip = polyline.intersect(moved, polyline.arc[t]);
        if (ip) return (traj.points[t] - *ip).norm();
        return std::abs(moved.signed_distance(traj.points[t]));
    };

    ArticulationTrace trace;
    trace.start_frame = contact.frame;
    trace.theta.reserve(traj.points.size());
    trace.residuals.reserve(traj.points.size());
    // The trajectory starts at the contact, which lies on the unmoved face.
    trace.theta.push_back(0.0);
    trace.residuals.push_back(objective(0.0, 0));

    double prev = 0.0;
    for (std::size_t t = 1; t < traj.points.size(); ++t) {
        auto f = [&](double th) { return objective(th, t); };
        double best_theta;
        double best_res;
        if (cfg.warm_start) {
            double lo = std::max(-range, prev - cfg.warm_window);
            double hi = std::min(range, prev + cfg.warm_window);
            std::tie(best_theta, best_res) = detail::scan_and_refine(f, lo, hi, 33);
            if (best_res > 1e-3) {
                auto [gt, gr] = detail::scan_and_refine(f, -range, range, 257);
                if (gr < best_res) {
                    best_theta = gt;
                    best_res = gr;
                }
            }
        } else {
            std::tie(best_theta, best_res) = detail::scan_and_refine(f, -range, range, 257);
        }
        trace.theta.push_back(best_theta);
        trace.residuals.push_back(best_res);
        prev = best_theta;
    }
    return trace;
}

}  // namespace artgen
