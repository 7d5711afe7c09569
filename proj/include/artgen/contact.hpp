#pragma once

#include <limits>

#include "artgen/errors.hpp"
#include "artgen/geometry.hpp"

namespace artgen {

struct ContactPair {
    Vec3 pc_robot;
    Vec3 pc_move;
    int frame = 0;
    Vec3 ee_dir{0.0, 0.0, 1.0};

    double separation() const { return (pc_robot - pc_move).norm(); }
};

inline constexpr double kDefaultContactRadius = 0.01;  // meters

// Closest robot/movable point pair at motion onset.
inline ContactPair detect_contact(const LabeledPointCloud& robot_points,
                                  const LabeledPointCloud& movable, const Vec3& ee_dir,
                                  int frame, double contact_radius = kDefaultContactRadius) {
    if (robot_points.empty() || movable.empty())
        throw Error("detect_contact: empty cloud");
    detail::NearestNeighborIndex index(movable.points);
    double best_d2 = std::numeric_limits<double>::max();
    ContactPair pair;
    for (const auto& rp : robot_points.points) {
        const Vec3& mp = movable.points[index.nearest(rp)];
        double d2 = (rp - mp).squared_norm();
        if (d2 < best_d2) {
            best_d2 = d2;
            pair.pc_robot = rp;
            pair.pc_move = mp;
        }
    }
    if (std::sqrt(best_d2) > contact_radius)
        throw NoContact("closest robot/movable distance exceeds contact radius");
    pair.frame = frame;
    pair.ee_dir = ee_dir.normalized();
    return pair;
}

// Transfers a contact point between category instances: both parts are
// normalized per-axis to the unit cube, the source point's normalized
// coordinates are projected onto the nearest destination point, then
// denormalized into destination space.
inline Vec3 nocs_map(const LabeledPointCloud& part_src, const LabeledPointCloud& part_dst,
                     const Vec3& pc_src) {
    if (part_src.empty() || part_dst.empty()) throw Error("nocs_map: empty part");
    auto [src_lo, src_hi] = part_src.aabb();
    auto [dst_lo, dst_hi] = part_dst.aabb();
    Vec3 src_ext = src_hi - src_lo;
    Vec3 dst_ext = dst_hi - dst_lo;
    if (src_ext.x < 1e-6 || src_ext.y < 1e-6 || src_ext.z < 1e-6 ||
        dst_ext.x < 1e-6 || dst_ext.y < 1e-6 || dst_ext.z < 1e-6)
        throw DegeneratePart("nocs_map: part bound extent below 1e-6");

    auto inside = [&](double v, double lo, double ext) {
        return v >= lo - 0.1 * ext && v <= lo + 1.1 * ext;
    };
    if (!inside(pc_src.x, src_lo.x, src_ext.x) || !inside(pc_src.y, src_lo.y, src_ext.y) ||
        !inside(pc_src.z, src_lo.z, src_ext.z))
        throw Error("nocs_map: contact point outside source bounds");

    Vec3 n{(pc_src.x - src_lo.x) / src_ext.x, (pc_src.y - src_lo.y) / src_ext.y,
           (pc_src.z - src_lo.z) / src_ext.z};

    // Project onto the nearest destination point in normalized space.
    double best_d2 = std::numeric_limits<double>::max();
    Vec3 best_n = n;
    for (const auto& p : part_dst.points) {
        Vec3 pn{(p.x - dst_lo.x) / dst_ext.x, (p.y - dst_lo.y) / dst_ext.y,
                (p.z - dst_lo.z) / dst_ext.z};
        double d2 = (pn - n).squared_norm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best_n = pn;
        }
    }
    return {dst_lo.x + best_n.x * dst_ext.x, dst_lo.y + best_n.y * dst_ext.y,
            dst_lo.z + best_n.z * dst_ext.z};
}

}  // namespace artgen
