// artgen: synthetic articulated-scene generation, joint/motion estimation,
// replacement fitting, trajectory retargeting and evaluation campaigns.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "artgen/io.hpp"
#include "artgen/pipeline.hpp"

namespace fs = std::filesystem;
using artgen::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitDetection = 3;
constexpr int kExitOptimization = 4;

// Pre-parse of --config so JSON values act as flag defaults; flags win.
json load_cli_config(int argc, char** argv) {
    for (int i = 1; i < argc - 1; ++i) {
        std::string a = argv[i];
        if (a == "--config") return artgen::read_json_file(argv[i + 1]);
        if (a.rfind("--config=", 0) == 0) return artgen::read_json_file(a.substr(9));
    }
    return json::object();
}

template <typename T>
void config_default(const json& cfg, const char* key, T& value) {
    if (cfg.contains(key)) value = cfg.at(key).get<T>();
}

std::pair<double, double> parse_range(const std::string& text, const char* name) {
    double lo, hi;
    char sep;
    std::istringstream in(text);
    if (!(in >> lo >> sep >> hi) || sep != ',')
        throw artgen::BadConfig(std::string(name) + ": expected lo,hi");
    if (lo > hi) throw artgen::BadConfig(std::string(name) + ": lo > hi");
    return {lo, hi};
}

artgen::MaskSequence load_masks_checked(const fs::path& dir) {
    if (!fs::exists(dir / artgen::frame_name("movable", 0, "pgm")))
        throw artgen::IoError("no masks found in " + dir.string());
    return artgen::load_mask_sequence(dir);
}

artgen::LabeledPointCloud load_bundle_cloud(const fs::path& bundle, int frame) {
    return artgen::read_ply(bundle / "clouds" / artgen::frame_name("frame", frame, "ply"));
}

// Contact trajectory restricted to [start, end] inclusive.
artgen::ContactTrajectory slice_contact_traj(const artgen::ContactTrajectory& full, int start,
                                             int end) {
    if (start < 0 || end >= static_cast<int>(full.points.size()) || start > end)
        throw artgen::FrameMismatch("contact trajectory does not cover frames " +
                                    std::to_string(start) + ".." + std::to_string(end));
    artgen::ContactTrajectory out;
    out.points.assign(full.points.begin() + start, full.points.begin() + end + 1);
    return out;
}

struct WindowArgs {
    int start = -1;
    int end = -1;
};

// Motion window: explicit flags win, otherwise detected from the bundle masks.
std::pair<int, int> resolve_window(const WindowArgs& w, const fs::path& bundle,
                                   const artgen::FilterConfig& filt) {
    if (w.start >= 0 && w.end >= 0) return {w.start, w.end};
    auto series = artgen::compute_motion_series(load_masks_checked(bundle / "masks"), filt);
    return {series.start_frame, series.end_frame};
}

// ------------------------------------------------------------------ gen

int cmd_gen(const json& cfg_json, std::uint64_t seed, bool seed_given, const fs::path& out) {
    artgen::SceneConfig cfg = artgen::scene_config_from_json(cfg_json);
    if (seed_given) cfg.seed = seed;
    artgen::SceneData scene = artgen::gen_scene(cfg);
    artgen::save_scene_bundle(scene, out);
    std::cout << "wrote scene bundle (" << cfg.frames << " frames) to " << out.string() << "\n";
    return kExitOk;
}

// ------------------------------------------------------------------ keyframes

int cmd_keyframes(const fs::path& masks_dir, const fs::path& out,
                  const artgen::FilterConfig& filt, bool csv) {
    auto series = artgen::compute_motion_series(load_masks_checked(masks_dir), filt);
    fs::create_directories(out);
    artgen::write_json_file(out / "motion_series.json", artgen::to_json(series));
    if (csv) {
        std::ofstream f(out / "scores.csv");
        if (!f) throw artgen::IoError("cannot write scores.csv");
        f << "frame,raw,smoothed,label\n";
        for (std::size_t i = 0; i < series.raw.size(); ++i)
            f << i << "," << series.raw[i] << "," << series.smoothed[i] << ","
              << series.labels[i] << "\n";
    }
    std::cout << "keyframes: start=" << series.start_frame << " end=" << series.end_frame
              << " mu=" << series.threshold_mu << "\n";
    return kExitOk;
}

// ------------------------------------------------------------------ joint

int cmd_joint(const fs::path& bundle, const fs::path& out, WindowArgs window,
              const artgen::FilterConfig& filt, const artgen::EdgeSelectionConfig& edges,
              double contact_radius, const std::string& kind_flag) {
    auto scene_cfg = artgen::scene_config_from_json(artgen::read_json_file(bundle / "scene.json"));
    artgen::JointKind kind =
        kind_flag.empty() ? scene_cfg.kind : artgen::joint_kind_from_string(kind_flag);

    auto [start, end] = resolve_window(window, bundle, filt);
    artgen::LabeledPointCloud cloud = load_bundle_cloud(bundle, start);
    artgen::LabeledPointCloud movable = cloud.filter(artgen::label::kMovable);
    artgen::LabeledPointCloud statics = cloud.filter(artgen::label::kStatic);
    artgen::LabeledPointCloud robot = cloud.filter_robot();

    auto tau = artgen::trajectory_from_json(artgen::read_json_file(bundle / "trajectory.json"));
    if (start >= static_cast<int>(tau.poses.size()))
        throw artgen::FrameMismatch("trajectory shorter than detected motion window");
    artgen::Vec3 ee_dir = tau.poses[static_cast<std::size_t>(start)].rotation.rotate({0, 0, 1});

    artgen::ContactPair contact =
        artgen::detect_contact(robot, movable, ee_dir, start, contact_radius);
    artgen::JointModel joint =
        artgen::estimate_joint(movable, statics, ee_dir, contact.pc_move, kind, edges);

    fs::create_directories(out);
    artgen::write_json_file(out / "joint.json", artgen::to_json(joint));
    artgen::write_json_file(out / "contact.json", artgen::to_json(contact));
    artgen::write_json_file(out / "window.json", json{{"start", start}, {"end", end}});
    std::cout << "joint: kind=" << (kind == artgen::JointKind::revolute ? "revolute" : "prismatic")
              << " direction=[" << joint.direction.x << "," << joint.direction.y << ","
              << joint.direction.z << "]\n";
    return kExitOk;
}

// ------------------------------------------------------------------ recover

int cmd_recover(const fs::path& bundle, const fs::path& joint_path, const fs::path& contact_path,
                const fs::path& out, WindowArgs window, const artgen::FilterConfig& filt,
                const artgen::MotionRecoveryConfig& rec) {
    auto joint = artgen::joint_from_json(artgen::read_json_file(joint_path));
    auto contact = artgen::contact_from_json(artgen::read_json_file(contact_path));
    auto [start, end] = resolve_window(window, bundle, filt);
    auto full = artgen::contact_trajectory_from_json(
        artgen::read_json_file(bundle / "contact_traj.json"));
    artgen::ContactTrajectory traj = slice_contact_traj(full, start, end);
    artgen::LabeledPointCloud movable =
        load_bundle_cloud(bundle, start).filter(artgen::label::kMovable);

    artgen::ArticulationTrace trace = artgen::recover_motion(movable, joint, contact, traj, rec);
    trace.start_frame = start;
    fs::create_directories(out);
    artgen::write_json_file(out / "trace.json", artgen::to_json(trace));
    std::cout << "recover: " << trace.theta.size() << " frames, final theta="
              << trace.theta.back() << "\n";
    return kExitOk;
}

// ------------------------------------------------------------------ fit

int cmd_fit(const fs::path& bundle, const fs::path& joint_path, const fs::path& asset_dir,
            const fs::path& out, WindowArgs window, const artgen::FilterConfig& filt,
            const artgen::FitOptions& fit_opts, bool stage1_only, double contact_radius) {
    auto joint = artgen::joint_from_json(artgen::read_json_file(joint_path));
    auto [start, end] = resolve_window(window, bundle, filt);
    auto full = artgen::contact_trajectory_from_json(
        artgen::read_json_file(bundle / "contact_traj.json"));
    artgen::ContactTrajectory traj = slice_contact_traj(full, start, end);

    artgen::LabeledPointCloud scene_cloud = load_bundle_cloud(bundle, start);
    artgen::LabeledPointCloud scene_movable = scene_cloud.filter(artgen::label::kMovable);

    // Replacement asset: explicit directory (asset.ply + joint.json), or the
    // bundle's own rest frame re-used as its replacement.
    artgen::ReplacementAsset asset;
    if (!asset_dir.empty()) {
        artgen::LabeledPointCloud apc = artgen::read_ply(asset_dir / "asset.ply");
        asset.part_move = apc.filter(artgen::label::kMovable);
        asset.part_static = apc.filter(artgen::label::kStatic);
        asset.joint = artgen::joint_from_json(artgen::read_json_file(asset_dir / "joint.json"));
    } else {
        artgen::LabeledPointCloud rest = load_bundle_cloud(bundle, 0);
        asset.part_move = rest.filter(artgen::label::kMovable);
        asset.part_static = rest.filter(artgen::label::kStatic);
        asset.joint = joint;
    }
    asset.base_pose = artgen::RigidTransform::identity();

    auto tau = artgen::trajectory_from_json(artgen::read_json_file(bundle / "trajectory.json"));
    artgen::Vec3 ee_dir = tau.poses[static_cast<std::size_t>(start)].rotation.rotate({0, 0, 1});
    artgen::ContactPair contact = artgen::detect_contact(
        scene_cloud.filter_robot(), scene_movable, ee_dir, start, contact_radius);
    artgen::Vec3 pc_map = artgen::nocs_map(scene_movable, asset.part_move, contact.pc_move);

    artgen::FrameWindow fw{start, end};
    artgen::ReplacementParams g = artgen::fit_stage1(pc_map, asset, traj, fw, fit_opts);
    if (!stage1_only) g = artgen::fit_stage2(asset, traj, g, pc_map, fw, fit_opts);

    fs::create_directories(out);
    artgen::write_json_file(out / "params.json", artgen::to_json(g));
    std::cout << "fit: s=" << g.s << " r_init=" << g.r_init << " offset=[" << g.offset_x << ","
              << g.offset_y << "]\n";
    return kExitOk;
}

// ------------------------------------------------------------------ retarget

int cmd_retarget(const fs::path& traj_path, const fs::path& chain_path, const fs::path& out,
                 WindowArgs window, int num_samples, std::uint64_t seed,
                 const artgen::PoseRanges& ranges) {
    if (num_samples <= 0) throw artgen::BadConfig("retarget: --num-samples must be positive");
    if (window.start < 0 || window.end < 0)
        throw artgen::BadConfig("retarget: --start and --end are required");
    auto tau = artgen::trajectory_from_json(artgen::read_json_file(traj_path));
    tau.validate();

    artgen::KinematicChain chain;
    bool have_chain = !chain_path.empty();
    if (have_chain) chain = artgen::chain_from_json(artgen::read_json_file(chain_path));

    fs::create_directories(out);
    json report = json::array();
    for (int i = 0; i < num_samples; ++i) {
        artgen::RigidTransform t_ao = artgen::sample_pose_perturbation(ranges, seed + i);
        artgen::EeTrajectory ret = artgen::retarget(tau, window.start, window.end, t_ao);

        char name[64];
        std::snprintf(name, sizeof(name), "retarget_%03d.json", i);
        artgen::write_json_file(out / name, artgen::to_json(ret));

        json entry = {{"sample", i},
                      {"t_ao",
                       {{"translation", artgen::to_json(t_ao.translation)},
                        {"rotation", json::array({t_ao.rotation.w, t_ao.rotation.x,
                                                  t_ao.rotation.y, t_ao.rotation.z})}}}};
        if (have_chain) {
            json joints = json::array();
            int failures = 0;
            std::vector<double> q = chain.mid_range();
            for (const auto& pose : ret.poses) {
                artgen::IkSolution sol = artgen::ik_solve(chain, pose, q);
                if (sol.converged) {
                    q = sol.joints;
                    joints.push_back(sol.joints);
                } else {
                    ++failures;
                    joints.push_back(nullptr);
                    q = chain.mid_range();
                }
            }
            std::snprintf(name, sizeof(name), "joints_%03d.json", i);
            artgen::write_json_file(out / name, json{{"joints", joints}});
            entry["ik_failures"] = failures;
        }
        report.push_back(std::move(entry));
    }
    artgen::write_json_file(out / "report.json", report);
    std::cout << "retarget: wrote " << num_samples << " samples to " << out.string() << "\n";
    return kExitOk;
}

// ------------------------------------------------------------------ eval

int cmd_eval(int num_scenes, const std::string& kind_flag, std::uint64_t seed,
             const artgen::NoiseConfig& noise, int jobs, const fs::path& out,
             const artgen::PipelineOptions& opts) {
    if (num_scenes <= 0) throw artgen::BadConfig("eval: --num-scenes must be positive");
    if (jobs <= 0) jobs = 1;

    std::vector<artgen::JointKind> kinds;
    if (kind_flag == "revolute" || kind_flag == "both") kinds.push_back(artgen::JointKind::revolute);
    if (kind_flag == "prismatic" || kind_flag == "both")
        kinds.push_back(artgen::JointKind::prismatic);
    if (kinds.empty()) throw artgen::BadConfig("eval: --kind must be revolute|prismatic|both");

    json by_kind = json::object();
    for (artgen::JointKind kind : kinds) {
        std::vector<json> scenes(static_cast<std::size_t>(num_scenes));
        std::atomic<int> next{0};
        auto worker = [&] {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= num_scenes) return;
                std::uint64_t scene_seed = seed + static_cast<std::uint64_t>(i);
                json entry = {{"seed", scene_seed}};
                try {
                    artgen::SceneConfig cfg = artgen::random_scene_config(kind, scene_seed, noise);
                    artgen::PipelineResult res =
                        artgen::run_pipeline(artgen::gen_scene(cfg), opts);
                    entry["success"] = res.replay.success;
                    entry["max_error"] = res.replay.max_error;
                    entry["report"] = artgen::to_json(res.report);
                } catch (const artgen::Error& e) {
                    entry["success"] = false;
                    entry["error"] = e.what();
                }
                scenes[static_cast<std::size_t>(i)] = std::move(entry);
            }
        };
        std::vector<std::thread> pool;
        for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();

        int successes = 0;
        json scene_arr = json::array();
        for (auto& s : scenes) {
            if (s.value("success", false)) ++successes;
            scene_arr.push_back(std::move(s));
        }
        const char* kind_name = kind == artgen::JointKind::revolute ? "revolute" : "prismatic";
        by_kind[kind_name] = {{"num_scenes", num_scenes},
                              {"successes", successes},
                              {"success_rate", static_cast<double>(successes) / num_scenes},
                              {"scenes", std::move(scene_arr)}};
        std::cout << "eval " << kind_name << ": " << successes << "/" << num_scenes
                  << " replay successes\n";
    }
    if (!out.empty()) {
        if (out.has_parent_path()) fs::create_directories(out.parent_path());
        artgen::write_json_file(out, by_kind);
    }
    return kExitOk;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"Articulated-object manipulation data generator"};
    app.require_subcommand(1);

    json cfg = load_cli_config(argc, argv);
    std::string config_path;  // consumed by load_cli_config; registered so CLI11 accepts it

    std::uint64_t seed = 0;
    fs::path out_dir;
    int jobs = 1;
    config_default(cfg, "seed", seed);
    config_default(cfg, "jobs", jobs);

    auto add_globals = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file; flags override its values");
        sub->add_option("--seed", seed, "random seed");
        sub->add_option("--out", out_dir, "output directory or file");
        sub->add_option("--jobs", jobs, "worker threads");
    };

    artgen::FilterConfig filt;
    config_default(cfg, "window", filt.window);
    config_default(cfg, "order", filt.order);
    WindowArgs window;
    config_default(cfg, "start", window.start);
    config_default(cfg, "end", window.end);
    auto add_window = [&](CLI::App* sub) {
        sub->add_option("--start", window.start, "motion window start frame");
        sub->add_option("--end", window.end, "motion window end frame");
    };

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic scene bundle");
    add_globals(gen);
    std::string gen_kind;
    int gen_frames = -1, gen_jitter = -1;
    double gen_slip = -1.0, gen_magnitude = -1.0;
    gen->add_option("--kind", gen_kind, "revolute|prismatic");
    gen->add_option("--frames", gen_frames, "frame count");
    gen->add_option("--jitter", gen_jitter, "mask jitter radius, pixels");
    gen->add_option("--slip", gen_slip, "contact slip, meters");
    gen->add_option("--magnitude", gen_magnitude, "motion magnitude (rad or m)");

    // keyframes
    auto* keyframes = app.add_subcommand("keyframes", "motion scores and keyframes from masks");
    add_globals(keyframes);
    fs::path masks_dir;
    bool csv = true;
    keyframes->add_option("--masks", masks_dir, "mask directory")->required();
    keyframes->add_option("--window-size", filt.window, "Savitzky-Golay window");
    keyframes->add_option("--order", filt.order, "Savitzky-Golay polynomial order");
    keyframes->add_flag("--csv,!--no-csv", csv, "also write scores.csv");

    // joint
    auto* joint = app.add_subcommand("joint", "estimate the joint model from a scene bundle");
    add_globals(joint);
    add_window(joint);
    fs::path bundle;
    std::string joint_kind;
    artgen::EdgeSelectionConfig edges;
    double contact_radius = artgen::kDefaultContactRadius;
    config_default(cfg, "lambda1", edges.lambda1);
    config_default(cfg, "lambda2", edges.lambda2);
    config_default(cfg, "lambda3", edges.lambda3);
    config_default(cfg, "k_pairs", edges.k_pairs);
    config_default(cfg, "epsilon", edges.epsilon);
    config_default(cfg, "contact_radius", contact_radius);
    joint->add_option("--bundle", bundle, "scene bundle directory")->required();
    joint->add_option("--kind", joint_kind, "revolute|prismatic (default: bundle scene.json)");
    joint->add_option("--lambda1", edges.lambda1, "edge-score weight");
    joint->add_option("--lambda2", edges.lambda2, "end-effector alignment weight");
    joint->add_option("--lambda3", edges.lambda3, "contact distance weight");
    joint->add_option("--k-pairs", edges.k_pairs, "seam pairs for the joint center");
    joint->add_option("--epsilon", edges.epsilon, "seam distance threshold, meters (0 = auto)");
    joint->add_option("--contact-radius", contact_radius, "contact search radius, meters");

    // recover
    auto* recover = app.add_subcommand("recover", "recover per-frame articulation");
    add_globals(recover);
    add_window(recover);
    fs::path joint_path, contact_path;
    artgen::MotionRecoveryConfig rec;
    recover->add_option("--bundle", bundle, "scene bundle directory")->required();
    recover->add_option("--joint", joint_path, "joint model JSON")->required();
    recover->add_option("--contact", contact_path, "contact pair JSON")->required();
    recover->add_option("--face-radius", rec.face_radius, "contact face plane radius, meters");

    // fit
    auto* fit = app.add_subcommand("fit", "fit replacement placement parameters");
    add_globals(fit);
    add_window(fit);
    fs::path asset_dir;
    artgen::FitOptions fit_opts;
    bool stage1_only = false;
    fit->add_option("--bundle", bundle, "scene bundle directory")->required();
    fit->add_option("--joint", joint_path, "joint model JSON")->required();
    fit->add_option("--asset", asset_dir, "asset directory (asset.ply + joint.json)");
    fit->add_option("--contact-radius", contact_radius, "contact search radius, meters");
    fit->add_flag("--stage1-only", stage1_only, "skip stage-2 refinement");

    // retarget
    auto* retarget = app.add_subcommand("retarget", "sample pose perturbations and retarget");
    add_globals(retarget);
    add_window(retarget);
    fs::path traj_path, chain_path;
    int num_samples = 1;
    std::string tx_range, ty_range, yaw_range;
    config_default(cfg, "num_samples", num_samples);
    retarget->add_option("--trajectory", traj_path, "end-effector trajectory JSON")->required();
    retarget->add_option("--chain", chain_path, "kinematic chain JSON (enables IK output)");
    retarget->add_option("--num-samples", num_samples, "number of sampled placements");
    retarget->add_option("--tx-range", tx_range, "x translation range lo,hi (m)");
    retarget->add_option("--ty-range", ty_range, "y translation range lo,hi (m)");
    retarget->add_option("--yaw-range", yaw_range, "yaw range lo,hi (degrees)");

    // eval
    auto* eval = app.add_subcommand("eval", "run a scored pipeline campaign");
    add_globals(eval);
    int num_scenes = 0;
    std::string eval_kind = "both";
    artgen::NoiseConfig noise;
    config_default(cfg, "num_scenes", num_scenes);
    config_default(cfg, "mask_jitter_px", noise.mask_jitter_px);
    config_default(cfg, "slip_m", noise.slip_m);
    eval->add_option("--num-scenes", num_scenes, "scenes per joint kind")->required();
    eval->add_option("--kind", eval_kind, "revolute|prismatic|both");
    eval->add_option("--jitter", noise.mask_jitter_px, "mask jitter radius, pixels");
    eval->add_option("--slip", noise.slip_m, "contact slip, meters");
    eval->add_option("--point-noise", noise.point_noise_m, "point noise sigma, meters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInput;
    }

    bool seed_given = gen->count("--seed") > 0 || cfg.contains("seed");

    if (gen->parsed()) {
        json scene_cfg = cfg;
        if (!gen_kind.empty()) scene_cfg["kind"] = gen_kind;
        if (gen_frames >= 0) scene_cfg["frames"] = gen_frames;
        if (gen_magnitude >= 0.0) scene_cfg["magnitude"] = gen_magnitude;
        if (gen_jitter >= 0 || gen_slip >= 0.0) {
            json n = scene_cfg.value("noise", json::object());
            if (gen_jitter >= 0) n["mask_jitter_px"] = gen_jitter;
            if (gen_slip >= 0.0) n["slip_m"] = gen_slip;
            scene_cfg["noise"] = n;
        }
        if (out_dir.empty()) throw artgen::BadConfig("gen: --out is required");
        return cmd_gen(scene_cfg, seed, seed_given, out_dir);
    }
    if (keyframes->parsed()) {
        if (out_dir.empty()) throw artgen::BadConfig("keyframes: --out is required");
        return cmd_keyframes(masks_dir, out_dir, filt, csv);
    }
    if (joint->parsed()) {
        if (out_dir.empty()) throw artgen::BadConfig("joint: --out is required");
        return cmd_joint(bundle, out_dir, window, filt, edges, contact_radius, joint_kind);
    }
    if (recover->parsed()) {
        if (out_dir.empty()) throw artgen::BadConfig("recover: --out is required");
        return cmd_recover(bundle, joint_path, contact_path, out_dir, window, filt, rec);
    }
    if (fit->parsed()) {
        if (out_dir.empty()) throw artgen::BadConfig("fit: --out is required");
        return cmd_fit(bundle, joint_path, asset_dir, out_dir, window, filt, fit_opts,
                       stage1_only, contact_radius);
    }
    if (retarget->parsed()) {
        if (out_dir.empty()) throw artgen::BadConfig("retarget: --out is required");
        artgen::PoseRanges ranges;
        if (!tx_range.empty()) std::tie(ranges.tx_lo, ranges.tx_hi) = parse_range(tx_range, "--tx-range");
        if (!ty_range.empty()) std::tie(ranges.ty_lo, ranges.ty_hi) = parse_range(ty_range, "--ty-range");
        if (!yaw_range.empty()) {
            auto [lo, hi] = parse_range(yaw_range, "--yaw-range");
            ranges.yaw_lo = lo * M_PI / 180.0;
            ranges.yaw_hi = hi * M_PI / 180.0;
        }
        return cmd_retarget(traj_path, chain_path, out_dir, window, num_samples, seed, ranges);
    }
    if (eval->parsed()) {
        artgen::PipelineOptions opts;
        return cmd_eval(num_scenes, eval_kind, seed, noise, jobs, out_dir, opts);
    }
    return kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const artgen::OptimizationDiverged& e) {
        std::cerr << "error (optimization): " << e.what() << "\n";
        return kExitOptimization;
    } catch (const artgen::NoMotionDetected& e) {
        std::cerr << "error (detection): " << e.what() << "\n";
        return kExitDetection;
    } catch (const artgen::NoContact& e) {
        std::cerr << "error (detection): " << e.what() << "\n";
        return kExitDetection;
    } catch (const artgen::InsufficientPairs& e) {
        std::cerr << "error (estimation): " << e.what() << "\n";
        return kExitDetection;
    } catch (const artgen::DegenerateCloud& e) {
        std::cerr << "error (estimation): " << e.what() << "\n";
        return kExitDetection;
    } catch (const artgen::DegeneratePart& e) {
        std::cerr << "error (estimation): " << e.what() << "\n";
        return kExitDetection;
    } catch (const artgen::EmptyMask& e) {
        std::cerr << "error (detection): " << e.what() << "\n";
        return kExitDetection;
    } catch (const artgen::IkNoConvergence& e) {
        std::cerr << "error (estimation): " << e.what() << "\n";
        return kExitDetection;
    } catch (const artgen::Error& e) {
        std::cerr << "error (input): " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
}
