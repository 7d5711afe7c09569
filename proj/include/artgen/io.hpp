#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "artgen/articulation.hpp"
#include "artgen/contact.hpp"
#include "artgen/errors.hpp"
#include "artgen/geometry.hpp"
#include "artgen/masks.hpp"
#include "artgen/oracle.hpp"
#include "artgen/replacement.hpp"
#include "artgen/retarget.hpp"

namespace artgen {

using json = nlohmann::json;

// ---------------------------------------------------------------- PLY

inline void write_ply(const std::filesystem::path& path, const LabeledPointCloud& pc) {
    pc.check_consistent();
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << "ply\nformat ascii 1.0\n";
    out << "element vertex " << pc.size() << "\n";
    out << "property double x\nproperty double y\nproperty double z\n";
    out << "property int label\nend_header\n";
    out.precision(17);
    for (std::size_t i = 0; i < pc.size(); ++i)
        out << pc.points[i].x << " " << pc.points[i].y << " " << pc.points[i].z << " "
            << pc.labels[i] << "\n";
    if (!out) throw IoError("write failed: " + path.string());
}

inline LabeledPointCloud read_ply(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path.string());
    std::string line;
    std::size_t count = 0;
    bool ascii = false;
    std::vector<std::string> props;
    if (!std::getline(in, line) || line.rfind("ply", 0) != 0)
        throw IoError("not a PLY file: " + path.string());
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "format") {
            std::string fmt;
            ls >> fmt;
            ascii = fmt == "ascii";
        } else if (tok == "element") {
            std::string name;
            ls >> name >> count;
            if (name != "vertex") throw IoError("PLY: unsupported element " + name);
        } else if (tok == "property") {
            std::string type, name;
            ls >> type >> name;
            props.push_back(name);
        } else if (tok == "end_header") {
            break;
        }
    }
    if (!ascii) throw IoError("PLY: only ascii format supported");
    int ix = -1, iy = -1, iz = -1, il = -1;
    for (int i = 0; i < static_cast<int>(props.size()); ++i) {
        if (props[i] == "x") ix = i;
        else if (props[i] == "y") iy = i;
        else if (props[i] == "z") iz = i;
        else if (props[i] == "label") il = i;
    }
    if (ix < 0 || iy < 0 || iz < 0) throw IoError("PLY: missing x/y/z properties");
    LabeledPointCloud pc;
    pc.points.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        if (!std::getline(in, line)) throw IoError("PLY: truncated vertex data");
        std::istringstream ls(line);
        std::vector<double> vals(props.size(), 0.0);
        for (auto& v : vals)
            if (!(ls >> v)) throw IoError("PLY: malformed vertex line");
        int lbl = il >= 0 ? static_cast<int>(vals[static_cast<std::size_t>(il)]) : label::kOther;
        pc.push_back({vals[static_cast<std::size_t>(ix)], vals[static_cast<std::size_t>(iy)],
                      vals[static_cast<std::size_t>(iz)]},
                     lbl);
    }
    return pc;
}

// ---------------------------------------------------------------- PGM

inline void write_pgm(const std::filesystem::path& path, const MaskFrame& mask) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << "P5\n" << mask.width << " " << mask.height << "\n255\n";
    std::vector<unsigned char> row(static_cast<std::size_t>(mask.width));
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x)
            row[static_cast<std::size_t>(x)] = mask.at(x, y) ? 255 : 0;
        out.write(reinterpret_cast<const char*>(row.data()), mask.width);
    }
    if (!out) throw IoError("write failed: " + path.string());
}

inline MaskFrame read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    auto next_token = [&in]() {
        std::string tok;
        for (;;) {
            if (!(in >> tok)) throw IoError("PGM: truncated header");
            if (tok[0] == '#') {
                std::string rest;
                std::getline(in, rest);
                continue;
            }
            return tok;
        }
    };
    std::string magic = next_token();
    if (magic != "P5" && magic != "P2") throw IoError("PGM: unsupported magic " + magic);
    int w = std::stoi(next_token());
    int h = std::stoi(next_token());
    int maxval = std::stoi(next_token());
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
        throw IoError("PGM: bad dimensions or maxval");
    MaskFrame mask(w, h);
    if (magic == "P5") {
        in.get();  // single whitespace after maxval
        std::vector<unsigned char> data(static_cast<std::size_t>(w) * h);
        in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
        if (!in) throw IoError("PGM: truncated pixel data");
        for (std::size_t i = 0; i < data.size(); ++i) mask.bits[i] = data[i] ? 1 : 0;
    } else {
        for (auto& b : mask.bits) {
            int v;
            if (!(in >> v)) throw IoError("PGM: truncated pixel data");
            b = v ? 1 : 0;
        }
    }
    return mask;
}

// ---------------------------------------------------------------- JSON

inline json to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }
inline Vec3 vec3_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw IoError("expected a 3-element array");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline json to_json(const JointModel& m) {
    return {{"kind", m.kind == JointKind::revolute ? "revolute" : "prismatic"},
            {"direction", to_json(m.direction)},
            {"center", to_json(m.center)}};
}

inline JointKind joint_kind_from_string(const std::string& s) {
    if (s == "revolute") return JointKind::revolute;
    if (s == "prismatic") return JointKind::prismatic;
    throw IoError("unknown joint kind: " + s);
}

inline JointModel joint_from_json(const json& j) {
    JointModel m;
    m.kind = joint_kind_from_string(j.at("kind").get<std::string>());
    m.direction = vec3_from_json(j.at("direction")).normalized();
    m.center = vec3_from_json(j.at("center"));
    return m;
}

inline json to_json(const ArticulationTrace& t) {
    json arr = json::array();
    for (std::size_t i = 0; i < t.theta.size(); ++i)
        arr.push_back({{"frame", t.start_frame + static_cast<int>(i)},
                       {"theta", t.theta[i]},
                       {"residual", t.residuals[i]}});
    return arr;
}

inline ArticulationTrace trace_from_json(const json& j) {
    ArticulationTrace t;
    if (!j.is_array() || j.empty()) throw IoError("trace: expected a nonempty array");
    t.start_frame = j[0].at("frame").get<int>();
    for (const auto& e : j) {
        t.theta.push_back(e.at("theta").get<double>());
        t.residuals.push_back(e.at("residual").get<double>());
    }
    return t;
}

inline json to_json(const ContactPair& c) {
    return {{"pc_robot", to_json(c.pc_robot)},
            {"pc_move", to_json(c.pc_move)},
            {"frame", c.frame},
            {"ee_dir", to_json(c.ee_dir)}};
}

inline ContactPair contact_from_json(const json& j) {
    ContactPair c;
    c.pc_robot = vec3_from_json(j.at("pc_robot"));
    c.pc_move = vec3_from_json(j.at("pc_move"));
    c.frame = j.at("frame").get<int>();
    c.ee_dir = vec3_from_json(j.at("ee_dir")).normalized();
    return c;
}

inline json to_json(const ReplacementParams& g) {
    return {{"s", g.s}, {"r_init", g.r_init}, {"offset", json::array({g.offset_x, g.offset_y})}};
}

inline ReplacementParams params_from_json(const json& j) {
    ReplacementParams g;
    g.s = j.at("s").get<double>();
    g.r_init = j.at("r_init").get<double>();
    g.offset_x = j.at("offset")[0].get<double>();
    g.offset_y = j.at("offset")[1].get<double>();
    return g;
}

inline json to_json(const EeTrajectory& tau) {
    json frames = json::array();
    for (const auto& p : tau.poses) {
        json row = json::array({p.translation.x, p.translation.y, p.translation.z, p.rotation.w,
                                p.rotation.x, p.rotation.y, p.rotation.z});
        if (p.grip) row.push_back(*p.grip);
        frames.push_back(std::move(row));
    }
    return {{"frames", frames}};
}

inline EeTrajectory trajectory_from_json(const json& j) {
    EeTrajectory tau;
    for (const auto& row : j.at("frames")) {
        if (!row.is_array() || row.size() < 7) throw IoError("trajectory: frame needs >= 7 values");
        EePose p;
        p.translation = {row[0].get<double>(), row[1].get<double>(), row[2].get<double>()};
        p.rotation = UnitQuat(row[3].get<double>(), row[4].get<double>(), row[5].get<double>(),
                              row[6].get<double>());
        if (row.size() > 7) p.grip = row[7].get<double>();
        tau.poses.push_back(p);
    }
    return tau;
}

inline json to_json(const ContactTrajectory& t) {
    json pts = json::array();
    for (const auto& p : t.points) pts.push_back(to_json(p));
    return {{"points", pts}};
}

inline ContactTrajectory contact_trajectory_from_json(const json& j) {
    ContactTrajectory t;
    for (const auto& p : j.at("points")) t.points.push_back(vec3_from_json(p));
    return t;
}

inline json to_json(const KinematicChain& chain) {
    json rows = json::array();
    for (const auto& jnt : chain.joints)
        rows.push_back({{"a", jnt.a},
                        {"alpha", jnt.alpha},
                        {"d", jnt.d},
                        {"theta_offset", jnt.theta_offset},
                        {"limits", json::array({jnt.limit_lo, jnt.limit_hi})}});
    return {{"joints", rows}};
}

inline KinematicChain chain_from_json(const json& j) {
    KinematicChain chain;
    for (const auto& row : j.at("joints")) {
        DhJoint jnt;
        jnt.a = row.at("a").get<double>();
        jnt.alpha = row.at("alpha").get<double>();
        jnt.d = row.at("d").get<double>();
        jnt.theta_offset = row.value("theta_offset", 0.0);
        jnt.limit_lo = row.at("limits")[0].get<double>();
        jnt.limit_hi = row.at("limits")[1].get<double>();
        chain.joints.push_back(jnt);
    }
    chain.validate();
    return chain;
}

inline json to_json(const MotionScoreSeries& s) {
    return {{"raw", s.raw},
            {"smoothed", s.smoothed},
            {"baseline_B", s.baseline_b},
            {"sigma_noise", s.sigma_noise},
            {"threshold_mu", s.threshold_mu},
            {"labels", s.labels},
            {"start_frame", s.start_frame},
            {"end_frame", s.end_frame}};
}

inline json to_json(const GroundTruth& t) {
    return {{"joint", to_json(t.joint)},
            {"theta_true", t.theta_true},
            {"contact_true", to_json(t.contact_true)},
            {"start_true", t.start_true},
            {"end_true", t.end_true}};
}

inline GroundTruth truth_from_json(const json& j) {
    GroundTruth t;
    t.joint = joint_from_json(j.at("joint"));
    t.theta_true = j.at("theta_true").get<std::vector<double>>();
    t.contact_true = vec3_from_json(j.at("contact_true"));
    t.start_true = j.at("start_true").get<int>();
    t.end_true = j.at("end_true").get<int>();
    return t;
}

inline json to_json(const EvalReport& r) {
    return {{"direction_err_deg", r.direction_err_deg},
            {"center_axis_dist_m", r.center_axis_dist_m},
            {"theta_rmse", r.theta_rmse},
            {"keyframe_offsets", json::array({r.keyframe_start_offset, r.keyframe_end_offset})},
            {"replay_success", r.replay_success}};
}

inline json to_json(const SceneConfig& c) {
    return {{"kind", c.kind == JointKind::revolute ? "revolute" : "prismatic"},
            {"base_size", to_json(c.base_size)},
            {"lid_size", to_json(c.lid_size)},
            {"profile", c.profile == MotionProfile::uniform
                            ? "uniform"
                            : c.profile == MotionProfile::ease_in_out ? "ease_in_out" : "piecewise"},
            {"magnitude", c.magnitude},
            {"frames", c.frames},
            {"mask_resolution", json::array({c.mask_width, c.mask_height})},
            {"camera_axis", c.camera_axis},
            {"camera_scale", c.camera_scale},
            {"noise",
             {{"mask_jitter_px", c.noise.mask_jitter_px},
              {"slip_m", c.noise.slip_m},
              {"point_noise_m", c.noise.point_noise_m}}},
            {"seed", c.seed},
            {"points_per_part", c.points_per_part},
            {"rest_tilt", c.rest_tilt},
            {"motion_window", json::array({c.motion_start_frac, c.motion_end_frac})}};
}

inline SceneConfig scene_config_from_json(const json& j) {
    SceneConfig c;
    if (j.contains("kind")) c.kind = joint_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("base_size")) c.base_size = vec3_from_json(j.at("base_size"));
    if (j.contains("lid_size")) c.lid_size = vec3_from_json(j.at("lid_size"));
    if (j.contains("profile")) {
        std::string p = j.at("profile").get<std::string>();
        if (p == "uniform") c.profile = MotionProfile::uniform;
        else if (p == "ease_in_out") c.profile = MotionProfile::ease_in_out;
        else if (p == "piecewise") c.profile = MotionProfile::piecewise;
        else throw IoError("unknown motion profile: " + p);
    }
    if (j.contains("magnitude")) c.magnitude = j.at("magnitude").get<double>();
    if (j.contains("frames")) c.frames = j.at("frames").get<int>();
    if (j.contains("mask_resolution")) {
        c.mask_width = j.at("mask_resolution")[0].get<int>();
        c.mask_height = j.at("mask_resolution")[1].get<int>();
    }
    if (j.contains("camera_axis")) c.camera_axis = j.at("camera_axis").get<int>();
    if (j.contains("camera_scale")) c.camera_scale = j.at("camera_scale").get<double>();
    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        c.noise.mask_jitter_px = n.value("mask_jitter_px", 0);
        c.noise.slip_m = n.value("slip_m", 0.0);
        c.noise.point_noise_m = n.value("point_noise_m", 0.0);
    }
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("points_per_part")) c.points_per_part = j.at("points_per_part").get<int>();
    if (j.contains("rest_tilt")) c.rest_tilt = j.at("rest_tilt").get<double>();
    if (j.contains("motion_window")) {
        c.motion_start_frac = j.at("motion_window")[0].get<double>();
        c.motion_end_frac = j.at("motion_window")[1].get<double>();
    }
    return c;
}

inline json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path.string());
    json j;
    in >> j;
    return j;
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path.string());
}

// ---------------------------------------------------------------- scene bundles

inline std::string frame_name(const char* prefix, int frame, const char* ext) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_%05d.%s", prefix, frame, ext);
    return buf;
}

// Bundle layout: clouds/frame_%05d.ply, masks/{movable,robot}_%05d.pgm,
// trajectory.json, contact_traj.json, ground_truth.json, scene.json.
inline void save_scene_bundle(const SceneData& scene, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "clouds");
    fs::create_directories(dir / "masks");
    for (int f = 0; f < static_cast<int>(scene.clouds.size()); ++f) {
        write_ply(dir / "clouds" / frame_name("frame", f, "ply"),
                  scene.clouds[static_cast<std::size_t>(f)]);
        write_pgm(dir / "masks" / frame_name("movable", f, "pgm"),
                  scene.masks.frames[static_cast<std::size_t>(f)].first);
        write_pgm(dir / "masks" / frame_name("robot", f, "pgm"),
                  scene.masks.frames[static_cast<std::size_t>(f)].second);
    }
    write_json_file(dir / "trajectory.json", to_json(scene.ee));
    ContactTrajectory full{scene.contact_points};
    write_json_file(dir / "contact_traj.json", to_json(full));
    write_json_file(dir / "ground_truth.json", to_json(scene.truth));
    write_json_file(dir / "scene.json", to_json(scene.config));
}

inline MaskSequence load_mask_sequence(const std::filesystem::path& masks_dir) {
    MaskSequence seq;
    for (int f = 0;; ++f) {
        auto movable = masks_dir / frame_name("movable", f, "pgm");
        auto robot = masks_dir / frame_name("robot", f, "pgm");
        if (!std::filesystem::exists(movable)) break;
        if (!std::filesystem::exists(robot))
            throw IoError("missing robot mask for frame " + std::to_string(f));
        seq.frames.emplace_back(read_pgm(movable), read_pgm(robot));
    }
    seq.validate();
    return seq;
}

}  // namespace artgen
