#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "artgen/io.hpp"

using namespace artgen;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    std::string cmd = std::string(ARTGEN_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// One shared workspace with a generated bundle; built once per process.
struct Workspace {
    fs::path root;
    fs::path bundle;

    Workspace() {
        root = fs::temp_directory_path() / ("artgen_cli_" + std::to_string(::getpid()));
        fs::remove_all(root);
        fs::create_directories(root);
        bundle = root / "bundle";
        REQUIRE(run("gen --seed 5 --frames 40 --out " + bundle.string()) == 0);
    }
};

Workspace& ws() {
    static Workspace w;
    return w;
}

}  // namespace

TEST_CASE("cli gen writes a complete bundle and is deterministic") {
    const Workspace& w = ws();
    CHECK(fs::exists(w.bundle / "scene.json"));
    CHECK(fs::exists(w.bundle / "trajectory.json"));
    CHECK(fs::exists(w.bundle / "clouds" / "frame_00039.ply"));
    CHECK(fs::exists(w.bundle / "masks" / "robot_00039.pgm"));

    fs::path again = w.root / "bundle2";
    REQUIRE(run("gen --seed 5 --frames 40 --out " + again.string()) == 0);
    CHECK(slurp(again / "ground_truth.json") == slurp(w.bundle / "ground_truth.json"));
    CHECK(slurp(again / "masks" / "movable_00020.pgm") ==
          slurp(w.bundle / "masks" / "movable_00020.pgm"));
    CHECK(slurp(again / "clouds" / "frame_00020.ply") ==
          slurp(w.bundle / "clouds" / "frame_00020.ply"));

    CHECK(run("gen --seed 5 --frames 5 --out " + (w.root / "tooshort").string()) == 2);
    CHECK(run("gen --seed 5 --frames 40") == 2);  // --out required
}

TEST_CASE("cli keyframes finds the motion window on a bundle") {
    const Workspace& w = ws();
    fs::path out = w.root / "kf";
    REQUIRE(run("keyframes --masks " + (w.bundle / "masks").string() + " --out " + out.string()) ==
            0);
    json series = read_json_file(out / "motion_series.json");
    GroundTruth truth = truth_from_json(read_json_file(w.bundle / "ground_truth.json"));
    CHECK(std::abs(series.at("start_frame").get<int>() - truth.start_true) <= 2);
    CHECK(std::abs(series.at("end_frame").get<int>() - truth.end_true) <= 2);
    CHECK(fs::exists(out / "scores.csv"));

    // No motion at all: magnitude zero.
    fs::path still = w.root / "still";
    REQUIRE(run("gen --seed 6 --frames 40 --magnitude 0 --out " + still.string()) == 0);
    CHECK(run("keyframes --masks " + (still / "masks").string() + " --out " +
              (w.root / "kf_still").string()) == 3);

    CHECK(run("keyframes --masks " + (w.root / "nonexistent").string() + " --out " +
              (w.root / "kf_missing").string()) == 2);
}

TEST_CASE("cli joint estimates the hinge from a bundle") {
    const Workspace& w = ws();
    fs::path out = w.root / "joint";
    REQUIRE(run("joint --bundle " + w.bundle.string() + " --out " + out.string()) == 0);
    JointModel joint = joint_from_json(read_json_file(out / "joint.json"));
    GroundTruth truth = truth_from_json(read_json_file(w.bundle / "ground_truth.json"));
    double c = std::abs(joint.direction.dot(truth.joint.direction));
    CHECK(std::acos(std::clamp(c, 0.0, 1.0)) * 180.0 / M_PI < 5.0);
    CHECK(fs::exists(out / "contact.json"));
    CHECK(fs::exists(out / "window.json"));

    CHECK(run("joint --bundle " + w.bundle.string() + " --contact-radius 1e-6 --out " +
              (w.root / "joint_bad").string()) == 3);
    CHECK(run("joint --bundle " + (w.root / "nonexistent").string() + " --out " +
              (w.root / "joint_missing").string()) == 2);
}

TEST_CASE("cli recover produces a trace; static contact gives zero motion") {
    const Workspace& w = ws();
    fs::path jd = w.root / "joint";  // produced by the joint test case above
    REQUIRE(fs::exists(jd / "joint.json"));
    fs::path out = w.root / "trace";
    REQUIRE(run("recover --bundle " + w.bundle.string() + " --joint " +
                (jd / "joint.json").string() + " --contact " + (jd / "contact.json").string() +
                " --out " + out.string()) == 0);
    ArticulationTrace trace = trace_from_json(read_json_file(out / "trace.json"));
    GroundTruth truth = truth_from_json(read_json_file(w.bundle / "ground_truth.json"));
    CHECK(std::abs(trace.theta.back() -
                   (truth.theta_true.back() -
                    truth.theta_true[static_cast<std::size_t>(trace.start_frame)])) < 0.05);

    // Static copy: the contact trajectory never moves.
    fs::path still = w.root / "still_bundle";
    fs::copy(w.bundle, still, fs::copy_options::recursive);
    ContactTrajectory traj =
        contact_trajectory_from_json(read_json_file(w.bundle / "contact_traj.json"));
    json window = read_json_file(jd / "window.json");
    int start = window.at("start").get<int>(), end = window.at("end").get<int>();
    Vec3 anchor = traj.points[static_cast<std::size_t>(start)];
    for (auto& p : traj.points) p = anchor;
    write_json_file(still / "contact_traj.json", to_json(traj));
    fs::path out2 = w.root / "trace_still";
    REQUIRE(run("recover --bundle " + still.string() + " --joint " +
                (jd / "joint.json").string() + " --contact " + (jd / "contact.json").string() +
                " --start " + std::to_string(start) + " --end " + std::to_string(end) + " --out " +
                out2.string()) == 0);
    ArticulationTrace flat = trace_from_json(read_json_file(out2 / "trace.json"));
    for (double th : flat.theta) CHECK(std::abs(th) < 1e-3);

    // Window outside the stored trajectory.
    CHECK(run("recover --bundle " + w.bundle.string() + " --joint " +
              (jd / "joint.json").string() + " --contact " + (jd / "contact.json").string() +
              " --start 0 --end 9999 --out " + (w.root / "trace_bad").string()) == 2);
}

TEST_CASE("cli fit recovers a near-identity placement for the bundle's own object") {
    const Workspace& w = ws();
    fs::path jd = w.root / "joint";
    REQUIRE(fs::exists(jd / "joint.json"));
    fs::path out = w.root / "fit";
    REQUIRE(run("fit --bundle " + w.bundle.string() + " --joint " + (jd / "joint.json").string() +
                " --stage1-only --out " + out.string()) == 0);
    ReplacementParams g = params_from_json(read_json_file(out / "params.json"));
    CHECK(std::abs(g.s - 1.0) < 0.05);
    CHECK(std::abs(g.offset_x) < 0.01);
    CHECK(std::abs(g.offset_y) < 0.01);

    // Unreachable contact trajectory: the optimizer cannot get close.
    fs::path far = w.root / "far_bundle";
    fs::copy(w.bundle, far, fs::copy_options::recursive);
    ContactTrajectory traj =
        contact_trajectory_from_json(read_json_file(w.bundle / "contact_traj.json"));
    for (auto& p : traj.points) p = {100.0, 100.0, 100.0};
    write_json_file(far / "contact_traj.json", to_json(traj));
    CHECK(run("fit --bundle " + far.string() + " --joint " + (jd / "joint.json").string() +
              " --out " + (w.root / "fit_far").string()) == 4);
}

TEST_CASE("cli retarget identity reproduces a piecewise-linear trajectory") {
    const Workspace& w = ws();
    // Piecewise-linear positions with a constant orientation: exactly
    // reproducible by the re-interpolated approach and retreat.
    EeTrajectory tau;
    for (int i = 0; i < 21; ++i) {
        EePose p;
        double t = i / 20.0;
        p.translation = {t, 2.0 * t, 0.0};
        p.rotation = UnitQuat::from_axis_angle({0, 0, 1}, 0.3);
        tau.poses.push_back(p);
    }
    fs::path traj_path = w.root / "traj.json";
    write_json_file(traj_path, to_json(tau));

    fs::path out = w.root / "retarget_id";
    REQUIRE(run("retarget --trajectory " + traj_path.string() +
                " --start 5 --end 15 --num-samples 1 --tx-range 0,0 --ty-range 0,0" +
                " --yaw-range 0,0 --out " + out.string()) == 0);
    EeTrajectory back = trajectory_from_json(read_json_file(out / "retarget_000.json"));
    REQUIRE(back.size() == tau.size());
    for (std::size_t i = 0; i < tau.size(); ++i) {
        CHECK(distance(back.poses[i].translation, tau.poses[i].translation) < 1e-9);
        CHECK(back.poses[i].rotation.angle_to(tau.poses[i].rotation) < 1e-9);
    }

    // Deterministic across runs for a fixed seed.
    fs::path s1 = w.root / "retarget_s1", s2 = w.root / "retarget_s2";
    std::string sampled = "retarget --trajectory " + traj_path.string() +
                          " --start 5 --end 15 --num-samples 3 --seed 9 --out ";
    REQUIRE(run(sampled + s1.string()) == 0);
    REQUIRE(run(sampled + s2.string()) == 0);
    CHECK(slurp(s1 / "report.json") == slurp(s2 / "report.json"));
    CHECK(slurp(s1 / "retarget_002.json") == slurp(s2 / "retarget_002.json"));

    CHECK(run("retarget --trajectory " + traj_path.string() + " --num-samples 1 --out " +
              (w.root / "retarget_nowin").string()) == 2);
}

TEST_CASE("cli eval runs a small campaign and validates its arguments") {
    const Workspace& w = ws();
    fs::path report = w.root / "eval.json";
    REQUIRE(run("eval --num-scenes 1 --kind revolute --seed 1000 --out " + report.string()) == 0);
    json r = read_json_file(report);
    CHECK(r.at("revolute").at("num_scenes").get<int>() == 1);
    CHECK(r.at("revolute").at("success_rate").get<double>() == 1.0);

    CHECK(run("eval --num-scenes 0") == 2);
    CHECK(run("eval --num-scenes 1 --kind bogus") == 2);
}

TEST_CASE("cli rejects unknown subcommands and missing required flags") {
    CHECK(run("bogus") == 2);
    CHECK(run("keyframes") == 2);  // --masks required
}
