#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "artgen/errors.hpp"

namespace artgen {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double squared_norm() const { return dot(*this); }
    double norm() const { return std::sqrt(squared_norm()); }

    Vec3 normalized() const {
        double n = norm();
        if (n < 1e-12) throw Error("cannot normalize near-zero vector");
        return {x / n, y / n, z / n};
    }

    Eigen::Vector3d eigen() const { return {x, y, z}; }
    static Vec3 from(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

// Unit quaternion canonicalized to w >= 0 so value equality is well defined.
struct UnitQuat {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

    UnitQuat() = default;
    UnitQuat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {
        normalize_in_place();
    }

    static UnitQuat identity() { return {}; }

    static UnitQuat from_axis_angle(const Vec3& axis, double angle) {
        Vec3 u = axis.normalized();
        double h = 0.5 * angle;
        double s = std::sin(h);
        return {std::cos(h), u.x * s, u.y * s, u.z * s};
    }

    static UnitQuat from_matrix(const Eigen::Matrix3d& m) {
        Eigen::Quaterniond q(m);
        return {q.w(), q.x(), q.y(), q.z()};
    }

    Eigen::Matrix3d matrix() const {
        return Eigen::Quaterniond(w, x, y, z).toRotationMatrix();
    }

    UnitQuat operator*(const UnitQuat& o) const {
        return {w * o.w - x * o.x - y * o.y - z * o.z,
                w * o.x + x * o.w + y * o.z - z * o.y,
                w * o.y - x * o.z + y * o.w + z * o.x,
                w * o.z + x * o.y - y * o.x + z * o.w};
    }

    UnitQuat conjugate() const {
        UnitQuat q;
        q.w = w; q.x = -x; q.y = -y; q.z = -z;
        q.canonicalize();
        return q;
    }
    UnitQuat inverse() const { return conjugate(); }

    Vec3 rotate(const Vec3& v) const {
        // q v q* via the two-cross-product expansion.
        Vec3 u{x, y, z};
        Vec3 t = 2.0 * u.cross(v);
        return v + w * t + u.cross(t);
    }

    double dot(const UnitQuat& o) const { return w * o.w + x * o.x + y * o.y + z * o.z; }

    // Rotation angle of this quaternion, in [0, pi].
    double angle() const {
        double c = std::clamp(std::abs(w), 0.0, 1.0);
        return 2.0 * std::acos(c);
    }

    // Angular distance to another rotation.
    double angle_to(const UnitQuat& o) const { return (conjugate() * o).angle(); }

    void normalize_in_place() {
        double n = std::sqrt(w * w + x * x + y * y + z * z);
        if (n < 1e-12) throw Error("cannot normalize near-zero quaternion");
        w /= n; x /= n; y /= n; z /= n;
        canonicalize();
    }

    void canonicalize() {
        if (w < 0.0) { w = -w; x = -x; y = -y; z = -z; }
    }
};

// Shorter-arc spherical interpolation; t in [0, 1].
inline UnitQuat slerp(const UnitQuat& a, const UnitQuat& b, double t) {
    double d = a.dot(b);
    double sb = d < 0.0 ? -1.0 : 1.0;  // shorter arc
    d = std::clamp(std::abs(d), 0.0, 1.0);
    if (d > 1.0 - 1e-12) {
        // Nearly identical: nlerp is exact enough and avoids 0/0.
        UnitQuat q;
        q.w = a.w + t * (sb * b.w - a.w);
        q.x = a.x + t * (sb * b.x - a.x);
        q.y = a.y + t * (sb * b.y - a.y);
        q.z = a.z + t * (sb * b.z - a.z);
        q.normalize_in_place();
        return q;
    }
    double omega = std::acos(d);
    double s = std::sin(omega);
    double ka = std::sin((1.0 - t) * omega) / s;
    double kb = sb * std::sin(t * omega) / s;
    UnitQuat q;
    q.w = ka * a.w + kb * b.w;
    q.x = ka * a.x + kb * b.x;
    q.y = ka * a.y + kb * b.y;
    q.z = ka * a.z + kb * b.z;
    q.normalize_in_place();
    return q;
}

struct RigidTransform {
    UnitQuat rotation;
    Vec3 translation;

    RigidTransform() = default;
    RigidTransform(const UnitQuat& q, const Vec3& t) : rotation(q), translation(t) {}

    static RigidTransform identity() { return {}; }

    Vec3 apply(const Vec3& p) const { return rotation.rotate(p) + translation; }

    RigidTransform inverse() const {
        UnitQuat qi = rotation.inverse();
        return {qi, -qi.rotate(translation)};
    }
};

// compose(t1, t2): applies t2 first, then t1.
inline RigidTransform compose(const RigidTransform& t1, const RigidTransform& t2) {
    return {t1.rotation * t2.rotation, t1.rotation.rotate(t2.translation) + t1.translation};
}

inline RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) {
    return compose(a, b);
}

// Point labels in clouds and PLY files.
namespace label {
inline constexpr int kStatic = 0;
inline constexpr int kMovable = 1;
inline constexpr int kOther = 2;
inline constexpr int robot_link(int l) { return 100 + l; }
inline constexpr bool is_robot(int lbl) { return lbl >= 100; }
}  // namespace label

struct LabeledPointCloud {
    std::vector<Vec3> points;
    std::vector<int> labels;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }

    void push_back(const Vec3& p, int lbl) {
        points.push_back(p);
        labels.push_back(lbl);
    }

    void check_consistent() const {
        if (points.size() != labels.size())
            throw DimensionMismatch("labels and points differ in length");
    }

    LabeledPointCloud filter(int lbl) const {
        LabeledPointCloud out;
        for (std::size_t i = 0; i < points.size(); ++i)
            if (labels[i] == lbl) out.push_back(points[i], labels[i]);
        return out;
    }

    LabeledPointCloud filter_robot() const {
        LabeledPointCloud out;
        for (std::size_t i = 0; i < points.size(); ++i)
            if (label::is_robot(labels[i])) out.push_back(points[i], labels[i]);
        return out;
    }

    Vec3 centroid() const {
        if (points.empty()) throw Error("centroid of empty cloud");
        Vec3 c;
        for (const auto& p : points) c += p;
        return c / static_cast<double>(points.size());
    }

    std::pair<Vec3, Vec3> aabb() const {
        if (points.empty()) throw Error("bounds of empty cloud");
        Vec3 lo = points[0], hi = points[0];
        for (const auto& p : points) {
            lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y); lo.z = std::min(lo.z, p.z);
            hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y); hi.z = std::max(hi.z, p.z);
        }
        return {lo, hi};
    }

    double diameter() const {
        auto [lo, hi] = aabb();
        return (hi - lo).norm();
    }
};

inline LabeledPointCloud transform_cloud(const RigidTransform& t, const LabeledPointCloud& pc) {
    if (pc.empty()) throw Error("transform_cloud: empty cloud");
    LabeledPointCloud out;
    out.points.reserve(pc.size());
    out.labels = pc.labels;
    for (const auto& p : pc.points) out.points.push_back(t.apply(p));
    return out;
}

struct Edge {
    Vec3 a, b;

    Vec3 direction() const { return (b - a).normalized(); }
    double length() const { return (b - a).norm(); }
    Vec3 point_at(double t) const { return a + t * (b - a); }

    // Distance from a point to the edge segment.
    double distance_to(const Vec3& p) const {
        Vec3 d = b - a;
        double t = std::clamp((p - a).dot(d) / d.squared_norm(), 0.0, 1.0);
        return (p - (a + t * d)).norm();
    }
};

struct OrientedBoundingBox {
    Vec3 center;
    Vec3 half_extents;
    UnitQuat rotation;

    double diagonal() const { return 2.0 * half_extents.norm(); }
    double volume() const { return 8.0 * half_extents.x * half_extents.y * half_extents.z; }

    Vec3 corner(int sx, int sy, int sz) const {
        Vec3 local{sx * half_extents.x, sy * half_extents.y, sz * half_extents.z};
        return center + rotation.rotate(local);
    }

    bool contains(const Vec3& p, double inflate = 1e-6) const {
        Vec3 local = rotation.inverse().rotate(p - center);
        return std::abs(local.x) <= half_extents.x + inflate &&
               std::abs(local.y) <= half_extents.y + inflate &&
               std::abs(local.z) <= half_extents.z + inflate;
    }
};

namespace detail {

inline Eigen::Matrix3d covariance(const std::vector<Vec3>& pts, const Vec3& mean) {
    Eigen::Matrix3d c = Eigen::Matrix3d::Zero();
    for (const auto& p : pts) {
        Eigen::Vector3d d = (p - mean).eigen();
        c += d * d.transpose();
    }
    return c / static_cast<double>(pts.size());
}

// Throws when the cloud does not span 3D (collinear or coplanar points).
inline void require_full_rank(const std::vector<Vec3>& pts, const char* who) {
    if (pts.size() < 4) throw DegenerateCloud(std::string(who) + ": needs >= 4 points");
    Vec3 mean;
    for (const auto& p : pts) mean += p;
    mean = mean / static_cast<double>(pts.size());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(covariance(pts, mean));
    double lmax = es.eigenvalues()(2);
    double lmin = es.eigenvalues()(0);
    if (lmin <= 1e-14 + 1e-9 * lmax)
        throw DegenerateCloud(std::string(who) + ": points are coplanar or collinear");
}

// Brute-force or grid-accelerated nearest neighbor queries against a fixed cloud.
class NearestNeighborIndex {
public:
    explicit NearestNeighborIndex(const std::vector<Vec3>& pts) : pts_(pts) {
        if (pts.size() > kBruteForceLimit) build_grid();
    }

    // Index of the nearest stored point.
    std::size_t nearest(const Vec3& q) const {
        if (cell_ <= 0.0) {
            return nearest_in_range(q, 0, pts_.size());
        }
        // Expanding ring search over grid cells.
        auto [qi, qj, qk] = cell_of(q);
        std::size_t best = pts_.size();
        double best_d2 = std::numeric_limits<double>::max();
        for (int ring = 0; ring < 256; ++ring) {
            // Cells at Chebyshev distance r are at least (r-1)*cell away, so once
            // the current best beats that bound the search is exact.
            if (best < pts_.size() && (ring - 1) * cell_ > std::sqrt(best_d2)) break;
            for (int i = qi - ring; i <= qi + ring; ++i)
                for (int j = qj - ring; j <= qj + ring; ++j)
                    for (int k = qk - ring; k <= qk + ring; ++k) {
                        if (std::max({std::abs(i - qi), std::abs(j - qj), std::abs(k - qk)}) != ring)
                            continue;
                        auto it = grid_.find(key(i, j, k));
                        if (it == grid_.end()) continue;
                        for (std::size_t idx : it->second) {
                            double d2 = (pts_[idx] - q).squared_norm();
                            if (d2 < best_d2) { best_d2 = d2; best = idx; }
                        }
                    }
        }
        if (best == pts_.size()) return nearest_in_range(q, 0, pts_.size());
        return best;
    }

private:
    static constexpr std::size_t kBruteForceLimit = 10000;

    std::size_t nearest_in_range(const Vec3& q, std::size_t lo, std::size_t hi) const {
        std::size_t best = lo;
        double best_d2 = std::numeric_limits<double>::max();
        for (std::size_t i = lo; i < hi; ++i) {
            double d2 = (pts_[i] - q).squared_norm();
            if (d2 < best_d2) { best_d2 = d2; best = i; }
        }
        return best;
    }

    void build_grid() {
        Vec3 lo = pts_[0], hi = pts_[0];
        for (const auto& p : pts_) {
            lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y); lo.z = std::min(lo.z, p.z);
            hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y); hi.z = std::max(hi.z, p.z);
        }
        double extent = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z, 1e-9});
        double target_cells = std::cbrt(static_cast<double>(pts_.size()));
        cell_ = extent / std::max(1.0, target_cells);
        origin_ = lo;
        for (std::size_t i = 0; i < pts_.size(); ++i) {
            auto [a, b, c] = cell_of(pts_[i]);
            grid_[key(a, b, c)].push_back(i);
        }
    }

    std::tuple<int, int, int> cell_of(const Vec3& p) const {
        return {static_cast<int>(std::floor((p.x - origin_.x) / cell_)),
                static_cast<int>(std::floor((p.y - origin_.y) / cell_)),
                static_cast<int>(std::floor((p.z - origin_.z) / cell_))};
    }

    static std::int64_t key(int i, int j, int k) {
        return (static_cast<std::int64_t>(i) & 0x1FFFFF) |
               ((static_cast<std::int64_t>(j) & 0x1FFFFF) << 21) |
               ((static_cast<std::int64_t>(k) & 0x1FFFFF) << 42);
    }

    const std::vector<Vec3>& pts_;
    double cell_ = 0.0;
    Vec3 origin_;
    std::unordered_map<std::int64_t, std::vector<std::size_t>> grid_;
};

// Best-fit rigid transform mapping src onto dst (Kabsch).
inline RigidTransform fit_rigid(const std::vector<Vec3>& src, const std::vector<Vec3>& dst) {
    Vec3 cs, cd;
    for (const auto& p : src) cs += p;
    for (const auto& p : dst) cd += p;
    double n = static_cast<double>(src.size());
    cs = cs / n;
    cd = cd / n;
    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    for (std::size_t i = 0; i < src.size(); ++i)
        h += (src[i] - cs).eigen() * (dst[i] - cd).eigen().transpose();
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d r = svd.matrixV() * svd.matrixU().transpose();
    if (r.determinant() < 0.0) {
        Eigen::Matrix3d v = svd.matrixV();
        v.col(2) *= -1.0;
        r = v * svd.matrixU().transpose();
    }
    UnitQuat q = UnitQuat::from_matrix(r);
    return {q, cd - q.rotate(cs)};
}

}  // namespace detail

// Point-to-point ICP. Exhaustive nearest neighbors for small clouds, a uniform
// grid above 10k points. Two initializations are tried (identity and the
// centroid-aligning translation); the lower final RMS wins.
inline RigidTransform icp_align(const LabeledPointCloud& source, const LabeledPointCloud& target,
                                int max_iters = 50, double tol = 1e-9) {
    detail::require_full_rank(source.points, "icp_align(source)");
    detail::require_full_rank(target.points, "icp_align(target)");

    detail::NearestNeighborIndex index(target.points);

    auto run = [&](RigidTransform t) -> std::pair<RigidTransform, double> {
        double prev_rms = std::numeric_limits<double>::max();
        double rms = prev_rms;
        std::vector<Vec3> moved(source.size());
        std::vector<Vec3> matched(source.size());
        for (int it = 0; it < max_iters; ++it) {
            double sum2 = 0.0;
            for (std::size_t i = 0; i < source.size(); ++i) {
                moved[i] = t.apply(source.points[i]);
                matched[i] = target.points[index.nearest(moved[i])];
                sum2 += (moved[i] - matched[i]).squared_norm();
            }
            rms = std::sqrt(sum2 / static_cast<double>(source.size()));
            if (prev_rms - rms < tol && it > 0) break;
            prev_rms = rms;
            t = compose(detail::fit_rigid(moved, matched), t);
        }
        return {t, rms};
    };

    auto [t_id, rms_id] = run(RigidTransform::identity());
    RigidTransform centroid_shift{UnitQuat::identity(),
                                  target.centroid() - source.centroid()};
    auto [t_cs, rms_cs] = run(centroid_shift);
    return rms_id <= rms_cs ? t_id : t_cs;
}

// Principal-axis OBB: covariance eigenvectors give the orientation, the point
// extents along them give center and half sizes.
inline OrientedBoundingBox obb_fit(const std::vector<Vec3>& points) {
    detail::require_full_rank(points, "obb_fit");
    Vec3 mean;
    for (const auto& p : points) mean += p;
    mean = mean / static_cast<double>(points.size());

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(detail::covariance(points, mean));
    // Columns ordered by descending eigenvalue; right-handed.
    Eigen::Matrix3d axes;
    axes.col(0) = es.eigenvectors().col(2);
    axes.col(1) = es.eigenvectors().col(1);
    axes.col(2) = axes.col(0).cross(axes.col(1));

    // Volume-minimizing refinement. PCA axes are exact only in expectation;
    // finite samples (and near-equal eigenvalues) leave a residual tilt, so
    // descend on the bounding volume one rotation axis at a time.
    auto volume_of = [&](const Eigen::Matrix3d& a) {
        Eigen::Vector3d vlo = Eigen::Vector3d::Constant(std::numeric_limits<double>::max());
        Eigen::Vector3d vhi = -vlo;
        for (const auto& p : points) {
            Eigen::Vector3d local = a.transpose() * (p - mean).eigen();
            vlo = vlo.cwiseMin(local);
            vhi = vhi.cwiseMax(local);
        }
        return (vhi - vlo).prod();
    };
    for (int pass = 0; pass < 2; ++pass) {
        for (int k = 0; k < 3; ++k) {
            auto rotated = [&](double phi) {
                return (Eigen::AngleAxisd(phi, axes.col(k)).toRotationMatrix() * axes).eval();
            };
            auto f = [&](double phi) { return volume_of(rotated(phi)); };
            constexpr int kSamples = 31;
            constexpr double kRange = M_PI / 4.0;
            double step = 2.0 * kRange / (kSamples - 1);
            double best_phi = 0.0, best_v = f(0.0);
            for (int i = 0; i < kSamples; ++i) {
                double phi = -kRange + i * step;
                double v = f(phi);
                if (v < best_v) {
                    best_v = v;
                    best_phi = phi;
                }
            }
            double a = best_phi - step, b = best_phi + step;
            constexpr double kInvPhi = 0.6180339887498949;
            double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
            double fc = f(c), fd = f(d);
            for (int it = 0; it < 48 && b - a > 1e-7; ++it) {
                if (fc < fd) {
                    b = d; d = c; fd = fc;
                    c = b - kInvPhi * (b - a);
                    fc = f(c);
                } else {
                    a = c; c = d; fc = fd;
                    d = a + kInvPhi * (b - a);
                    fd = f(d);
                }
            }
            axes = rotated(fc < fd ? c : d);
        }
    }

    Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::max());
    Eigen::Vector3d hi = -lo;
    for (const auto& p : points) {
        Eigen::Vector3d local = axes.transpose() * (p - mean).eigen();
        lo = lo.cwiseMin(local);
        hi = hi.cwiseMax(local);
    }
    OrientedBoundingBox box;
    box.rotation = UnitQuat::from_matrix(axes);
    box.half_extents = Vec3::from((hi - lo) * 0.5);
    box.center = mean + box.rotation.rotate(Vec3::from((hi + lo) * 0.5));
    return box;
}

// The 12 cuboid edges in a fixed order: 4 parallel to local x, then y, then z.
// Within each group the free signs enumerate as (--, -+, +-, ++).
inline std::vector<Edge> obb_edges(const OrientedBoundingBox& box) {
    std::vector<Edge> edges;
    edges.reserve(12);
    const std::array<int, 2> signs{-1, 1};
    // Parallel to x: vary (sy, sz).
    for (int sy : signs)
        for (int sz : signs)
            edges.push_back({box.corner(-1, sy, sz), box.corner(1, sy, sz)});
    for (int sx : signs)
        for (int sz : signs)
            edges.push_back({box.corner(sx, -1, sz), box.corner(sx, 1, sz)});
    for (int sx : signs)
        for (int sy : signs)
            edges.push_back({box.corner(sx, sy, -1), box.corner(sx, sy, 1)});
    return edges;
}

}  // namespace artgen
