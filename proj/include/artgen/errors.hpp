#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace artgen {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateCloud : Error {
    explicit DegenerateCloud(const std::string& msg) : Error(msg) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

struct EmptyMask : Error {
    explicit EmptyMask(const std::string& msg) : Error(msg) {}
};

struct BadFilterConfig : Error {
    explicit BadFilterConfig(const std::string& msg) : Error(msg) {}
};

struct NoMotionDetected : Error {
    explicit NoMotionDetected(const std::string& msg) : Error(msg) {}
};

struct NoContact : Error {
    explicit NoContact(const std::string& msg) : Error(msg) {}
};

struct DegeneratePart : Error {
    explicit DegeneratePart(const std::string& msg) : Error(msg) {}
};

struct InsufficientPairs : Error {
    explicit InsufficientPairs(const std::string& msg) : Error(msg) {}
};

struct OptimizationDiverged : Error {
    explicit OptimizationDiverged(const std::string& msg) : Error(msg) {}
};

struct BadSplit : Error {
    explicit BadSplit(const std::string& msg) : Error(msg) {}
};

struct JointLimit : Error {
    explicit JointLimit(const std::string& msg) : Error(msg) {}
};

// Carries the best iterate so callers can still inspect partial results.
struct IkNoConvergence : Error {
    std::vector<double> best_joints;
    double position_error = 0.0;
    double orientation_error = 0.0;

    IkNoConvergence(const std::string& msg, std::vector<double> joints,
                    double pos_err, double ori_err)
        : Error(msg),
          best_joints(std::move(joints)),
          position_error(pos_err),
          orientation_error(ori_err) {}
};

struct BadConfig : Error {
    explicit BadConfig(const std::string& msg) : Error(msg) {}
};

struct FrameMismatch : Error {
    explicit FrameMismatch(const std::string& msg) : Error(msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace artgen
