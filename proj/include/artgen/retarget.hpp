#pragma once

#include <cmath>
#include <optional>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "artgen/errors.hpp"
#include "artgen/geometry.hpp"
#include "artgen/rng.hpp"

namespace artgen {

struct EePose {
    Vec3 translation;
    UnitQuat rotation;
    std::optional<double> grip;  // optional gripper channel, passed through
};

struct EeTrajectory {
    std::vector<EePose> poses;

    std::size_t size() const { return poses.size(); }

    void validate() const {
        if (poses.size() < 2) throw BadConfig("trajectory needs >= 2 poses");
    }
};

// Split into approach / interaction / retreat; boundary frames are shared.
inline std::tuple<EeTrajectory, EeTrajectory, EeTrajectory> split_trajectory(
    const EeTrajectory& tau, int start_frame, int end_frame) {
    int t = static_cast<int>(tau.poses.size());
    if (!(0 < start_frame && start_frame < end_frame && end_frame < t - 1))
        throw BadSplit("split requires 0 < start < end < T-1");
    EeTrajectory t1, t2, t3;
    t1.poses.assign(tau.poses.begin(), tau.poses.begin() + start_frame + 1);
    t2.poses.assign(tau.poses.begin() + start_frame, tau.poses.begin() + end_frame + 1);
    t3.poses.assign(tau.poses.begin() + end_frame, tau.poses.end());
    return {t1, t2, t3};
}

inline EePose transform_pose(const RigidTransform& t_ao, const EePose& p) {
    return {t_ao.apply(p.translation), t_ao.rotation * p.rotation, p.grip};
}

inline EeTrajectory transform_segment(const EeTrajectory& seg, const RigidTransform& t_ao) {
    EeTrajectory out;
    out.poses.reserve(seg.poses.size());
    for (const auto& p : seg.poses) out.poses.push_back(transform_pose(t_ao, p));
    return out;
}

// Linear translation interpolation + shorter-arc slerp, n_frames inclusive of
// both endpoints. Gripper values are copied from the nearer endpoint.
inline EeTrajectory reinterpolate_segment(const EePose& p_start, const EePose& p_end,
                                          int n_frames) {
    if (n_frames < 2) throw BadConfig("reinterpolate needs >= 2 frames");
    EeTrajectory out;
    out.poses.reserve(static_cast<std::size_t>(n_frames));
    for (int k = 0; k < n_frames; ++k) {
        double t = static_cast<double>(k) / (n_frames - 1);
        EePose p;
        p.translation = p_start.translation + t * (p_end.translation - p_start.translation);
        p.rotation = slerp(p_start.rotation, p_end.rotation, t);
        p.grip = t < 0.5 ? p_start.grip : p_end.grip;
        out.poses.push_back(p);
    }
    return out;
}

// Pose generalization: the interaction segment moves rigidly by t_ao, the
// approach keeps its original start pose and the retreat its original end
// pose, both re-interpolated to their original frame counts.
inline EeTrajectory retarget(const EeTrajectory& tau, int start_frame, int end_frame,
                             const RigidTransform& t_ao) {
    auto [t1, t2, t3] = split_trajectory(tau, start_frame, end_frame);
    EeTrajectory t2n = transform_segment(t2, t_ao);
    EeTrajectory t1n = reinterpolate_segment(t1.poses.front(), t2n.poses.front(),
                                             static_cast<int>(t1.poses.size()));
    EeTrajectory t3n = reinterpolate_segment(t2n.poses.back(), t3.poses.back(),
                                             static_cast<int>(t3.poses.size()));
    EeTrajectory out;
    out.poses.reserve(tau.poses.size());
    out.poses.insert(out.poses.end(), t1n.poses.begin(), t1n.poses.end());
    out.poses.insert(out.poses.end(), t2n.poses.begin() + 1, t2n.poses.end());
    out.poses.insert(out.poses.end(), t3n.poses.begin() + 1, t3n.poses.end());
    return out;
}

// Standard DH row (a, alpha, d, theta_offset) plus joint limits.
struct DhJoint {
    double a = 0.0;
    double alpha = 0.0;
    double d = 0.0;
    double theta_offset = 0.0;
    double limit_lo = -M_PI;
    double limit_hi = M_PI;
};

struct KinematicChain {
    std::vector<DhJoint> joints;

    std::size_t dof() const { return joints.size(); }

    void validate() const {
        if (joints.empty()) throw BadConfig("chain needs >= 1 joint");
        for (const auto& j : joints)
            if (!(j.limit_lo < j.limit_hi)) throw BadConfig("chain joint limits lo >= hi");
    }

    std::vector<double> mid_range() const {
        std::vector<double> q;
        q.reserve(joints.size());
        for (const auto& j : joints) q.push_back(0.5 * (j.limit_lo + j.limit_hi));
        return q;
    }
};

namespace detail {

inline RigidTransform dh_transform(const DhJoint& j, double theta) {
    double th = theta + j.theta_offset;
    // RotZ(theta) TransZ(d) TransX(a) RotX(alpha)
    RigidTransform rz{UnitQuat::from_axis_angle({0, 0, 1}, th), {0, 0, 0}};
    RigidTransform tz{UnitQuat::identity(), {0, 0, j.d}};
    RigidTransform tx{UnitQuat::identity(), {j.a, 0, 0}};
    RigidTransform rx{UnitQuat::from_axis_angle({1, 0, 0}, j.alpha), {0, 0, 0}};
    return rz * tz * tx * rx;
}

inline EePose fk_unchecked(const KinematicChain& chain, const std::vector<double>& q) {
    RigidTransform t = RigidTransform::identity();
    for (std::size_t i = 0; i < chain.joints.size(); ++i)
        t = t * dh_transform(chain.joints[i], q[i]);
    return {t.translation, t.rotation, std::nullopt};
}

// 6D pose error: translation difference and rotation difference as a rotation vector.
inline Eigen::Matrix<double, 6, 1> pose_error(const EePose& target, const EePose& current) {
    Eigen::Matrix<double, 6, 1> e;
    e.head<3>() = (target.translation - current.translation).eigen();
    UnitQuat dq = target.rotation * current.rotation.inverse();
    double angle = dq.angle();
    Vec3 axis{dq.x, dq.y, dq.z};
    double s = axis.norm();
    if (s < 1e-12 || angle < 1e-12)
        e.tail<3>().setZero();
    else
        e.tail<3>() = (axis * (angle / s)).eigen();
    return e;
}

}  // namespace detail

inline EePose fk(const KinematicChain& chain, const std::vector<double>& joints) {
    chain.validate();
    if (joints.size() != chain.dof()) throw DimensionMismatch("fk: joint count mismatch");
    for (std::size_t i = 0; i < joints.size(); ++i)
        if (joints[i] < chain.joints[i].limit_lo || joints[i] > chain.joints[i].limit_hi)
            throw JointLimit("fk: joint " + std::to_string(i) + " outside limits");
    return detail::fk_unchecked(chain, joints);
}

struct IkOptions {
    int max_iters = 200;
    double damping = 0.05;
    double jacobian_step = 1e-6;
    double pos_tol = 1e-4;           // meters
    double ori_tol = 0.1 * M_PI / 180.0;  // radians
};

struct IkSolution {
    std::vector<double> joints;
    double position_error = 0.0;
    double orientation_error = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Damped least squares with a central-difference numerical Jacobian; joints
// are clamped to their limits after every step.
inline IkSolution ik_solve(const KinematicChain& chain, const EePose& target,
                           std::vector<double> q, const IkOptions& opts = {}) {
    chain.validate();
    if (q.size() != chain.dof()) throw DimensionMismatch("ik: seed size mismatch");
    for (std::size_t i = 0; i < q.size(); ++i)
        if (q[i] < chain.joints[i].limit_lo || q[i] > chain.joints[i].limit_hi)
            throw JointLimit("ik: seed outside limits");

    const std::size_t n = chain.dof();
    IkSolution best;
    best.position_error = std::numeric_limits<double>::max();

    IkSolution cur;
    cur.joints = std::move(q);
    for (int it = 0; it <= opts.max_iters; ++it) {
        EePose pose = detail::fk_unchecked(chain, cur.joints);
        Eigen::Matrix<double, 6, 1> e = detail::pose_error(target, pose);
        cur.position_error = e.head<3>().norm();
        cur.orientation_error = e.tail<3>().norm();
        cur.iterations = it;
        if (cur.position_error + cur.orientation_error <
            best.position_error + best.orientation_error)
            best = cur;
        if (cur.position_error < opts.pos_tol && cur.orientation_error < opts.ori_tol) {
            cur.converged = true;
            return cur;
        }
        if (it == opts.max_iters) break;

        Eigen::MatrixXd jac(6, n);
        for (std::size_t j = 0; j < n; ++j) {
            auto qp = cur.joints, qm = cur.joints;
            qp[j] += opts.jacobian_step;
            qm[j] -= opts.jacobian_step;
            EePose pp = detail::fk_unchecked(chain, qp);
            EePose pm = detail::fk_unchecked(chain, qm);
            Eigen::Matrix<double, 6, 1> de =
                detail::pose_error(pp, pm);  // pm -> pp difference
            de.head<3>() = (pp.translation - pm.translation).eigen();
            jac.col(j) = de / (2.0 * opts.jacobian_step);
        }
        // Error-proportional damping: opts.damping caps the far-field step,
        // while a shrinking lambda near the solution keeps the convergence
        // rate from collapsing along near-singular directions.
        double lambda = std::clamp(0.5 * e.norm(), 1e-4, opts.damping);
        Eigen::Matrix<double, 6, 6> jjt =
            jac * jac.transpose() + lambda * lambda * Eigen::Matrix<double, 6, 6>::Identity();
        Eigen::VectorXd dq = jac.transpose() * jjt.ldlt().solve(e);
        for (std::size_t j = 0; j < n; ++j) {
            cur.joints[j] = std::clamp(cur.joints[j] + dq(static_cast<Eigen::Index>(j)),
                                       chain.joints[j].limit_lo, chain.joints[j].limit_hi);
        }
    }
    best.converged = false;
    return best;
}

// Throwing wrapper; the exception carries the best iterate.
inline std::vector<double> ik(const KinematicChain& chain, const EePose& target,
                              const std::vector<double>& seed, int max_iters = 200) {
    IkOptions opts;
    opts.max_iters = max_iters;
    IkSolution sol = ik_solve(chain, target, seed, opts);
    if (!sol.converged)
        throw IkNoConvergence("ik: no convergence", sol.joints, sol.position_error,
                              sol.orientation_error);
    return sol.joints;
}

struct PoseRanges {
    double tx_lo = -0.05, tx_hi = 0.3;
    double ty_lo = -0.05, ty_hi = 0.05;
    double yaw_lo = -M_PI / 4.0, yaw_hi = M_PI / 4.0;

    void validate() const {
        if (tx_lo > tx_hi || ty_lo > ty_hi || yaw_lo > yaw_hi)
            throw BadConfig("pose range lo > hi");
    }
};

// Uniform tabletop perturbation: xy translation plus yaw about world z,
// deterministic per seed.
inline RigidTransform sample_pose_perturbation(const PoseRanges& ranges, std::uint64_t seed) {
    ranges.validate();
    CounterRng rng(seed, /*stream=*/7);
    double tx = rng.uniform(ranges.tx_lo, ranges.tx_hi);
    double ty = rng.uniform(ranges.ty_lo, ranges.ty_hi);
    double yaw = rng.uniform(ranges.yaw_lo, ranges.yaw_hi);
    return {UnitQuat::from_axis_angle({0, 0, 1}, yaw), {tx, ty, 0.0}};
}

}  // namespace artgen
