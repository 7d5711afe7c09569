#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "artgen/errors.hpp"

namespace artgen {

struct MaskFrame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;  // row-major, nonzero = set

    MaskFrame() = default;
    MaskFrame(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

    bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v = true) {
        bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
    }

    std::size_t count() const {
        std::size_t n = 0;
        for (auto b : bits) n += b != 0;
        return n;
    }

    bool same_size(const MaskFrame& o) const {
        return width == o.width && height == o.height;
    }
};

struct MaskSequence {
    // Per frame: movable-part mask and robot mask, uniform dimensions.
    std::vector<std::pair<MaskFrame, MaskFrame>> frames;

    void validate() const {
        if (frames.size() < 2) throw BadConfig("mask sequence needs >= 2 frames");
        for (const auto& [m, r] : frames) {
            if (!m.same_size(frames[0].first) || !r.same_size(frames[0].first))
                throw DimensionMismatch("mask sequence has mixed dimensions");
        }
    }
};

// M^t = dyn_t AND NOT robot_{t+1};  M^{t+1} = dyn_{t+1} AND NOT robot_t.
inline std::pair<MaskFrame, MaskFrame> subtract_masks(const MaskFrame& m_dyn_t,
                                                      const MaskFrame& m_robot_t1,
                                                      const MaskFrame& m_dyn_t1,
                                                      const MaskFrame& m_robot_t) {
    if (!m_dyn_t.same_size(m_robot_t1) || !m_dyn_t.same_size(m_dyn_t1) ||
        !m_dyn_t.same_size(m_robot_t))
        throw DimensionMismatch("subtract_masks: mask dimensions differ");
    MaskFrame mt(m_dyn_t.width, m_dyn_t.height);
    MaskFrame mt1(m_dyn_t.width, m_dyn_t.height);
    for (std::size_t i = 0; i < mt.bits.size(); ++i) {
        mt.bits[i] = (m_dyn_t.bits[i] && !m_robot_t1.bits[i]) ? 1 : 0;
        mt1.bits[i] = (m_dyn_t1.bits[i] && !m_robot_t.bits[i]) ? 1 : 0;
    }
    return {mt, mt1};
}

// Fraction of M^t pixels absent from M^{t+1}.
inline double motion_score(const MaskFrame& m_t, const MaskFrame& m_t1) {
    if (!m_t.same_size(m_t1)) throw DimensionMismatch("motion_score: mask dimensions differ");
    std::size_t total = 0, gone = 0;
    for (std::size_t i = 0; i < m_t.bits.size(); ++i) {
        if (!m_t.bits[i]) continue;
        ++total;
        if (!m_t1.bits[i]) ++gone;
    }
    if (total == 0) throw EmptyMask("motion_score: M^t has no pixels");
    return static_cast<double>(gone) / static_cast<double>(total);
}

// Centered least-squares polynomial smoothing coefficients.
inline std::vector<double> savgol_coefficients(int window, int order) {
    if (window < 1 || window % 2 == 0 || order < 0 || order >= window)
        throw BadFilterConfig("savgol: window must be odd and order < window");
    int half = window / 2;
    Eigen::MatrixXd a(window, order + 1);
    for (int i = 0; i < window; ++i) {
        double t = i - half;
        double v = 1.0;
        for (int j = 0; j <= order; ++j) {
            a(i, j) = v;
            v *= t;
        }
    }
    // Smoothed value = e0^T (A^T A)^-1 A^T y.
    Eigen::MatrixXd ata = a.transpose() * a;
    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(order + 1);
    e0(0) = 1.0;
    Eigen::VectorXd c = a * ata.ldlt().solve(e0);
    return {c.data(), c.data() + window};
}

// Savitzky-Golay smoothing with mirror padding at the edges.
inline std::vector<double> savgol_smooth(const std::vector<double>& series, int window,
                                         int order) {
    auto coeffs = savgol_coefficients(window, order);
    int n = static_cast<int>(series.size());
    if (n < window) throw BadFilterConfig("savgol: series shorter than window");
    int half = window / 2;
    auto mirrored = [&](int i) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * (n - 1) - i;
        return series[static_cast<std::size_t>(i)];
    };
    std::vector<double> out(series.size());
    for (int t = 0; t < n; ++t) {
        double acc = 0.0;
        for (int k = -half; k <= half; ++k) acc += coeffs[static_cast<std::size_t>(k + half)] * mirrored(t + k);
        out[static_cast<std::size_t>(t)] = acc;
    }
    return out;
}

struct ThresholdResult {
    double baseline_b = 0.0;
    double sigma_noise = 0.0;
    double threshold_mu = 0.0;
};

// Linearly interpolated order statistic (type-7), p in [0, 1].
inline double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw BadConfig("percentile of empty series");
    std::sort(values.begin(), values.end());
    double h = p * static_cast<double>(values.size() - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(h));
    std::size_t hi = std::min(lo + 1, values.size() - 1);
    double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

// B = 20th percentile; sigma over the quiet regime (values <= B); mu = B + 3 sigma.
inline ThresholdResult dynamic_threshold(const std::vector<double>& smoothed) {
    if (smoothed.size() < 5) throw BadConfig("dynamic_threshold: series too short");
    ThresholdResult r;
    r.baseline_b = percentile(smoothed, 0.20);
    std::vector<double> quiet;
    for (double v : smoothed)
        if (v <= r.baseline_b) quiet.push_back(v);
    if (quiet.size() >= 2) {
        double mean = 0.0;
        for (double v : quiet) mean += v;
        mean /= static_cast<double>(quiet.size());
        double ss = 0.0;
        for (double v : quiet) ss += (v - mean) * (v - mean);
        r.sigma_noise = std::sqrt(ss / static_cast<double>(quiet.size() - 1));
    }
    r.threshold_mu = r.baseline_b + 3.0 * r.sigma_noise;
    return r;
}

// First and last index with score strictly above mu.
inline std::pair<int, int> extract_keyframes(const std::vector<double>& smoothed, double mu) {
    int start = -1, end = -1;
    for (int t = 0; t < static_cast<int>(smoothed.size()); ++t) {
        if (smoothed[static_cast<std::size_t>(t)] > mu) {
            if (start < 0) start = t;
            end = t;
        }
    }
    if (start < 0) throw NoMotionDetected("no smoothed score above threshold");
    return {start, end};
}

struct MotionScoreSeries {
    std::vector<double> raw;       // length T-1
    std::vector<double> smoothed;  // length T-1
    double baseline_b = 0.0;
    double sigma_noise = 0.0;
    double threshold_mu = 0.0;
    std::vector<bool> labels;
    int start_frame = 0;
    int end_frame = 0;
};

// Window 5 keeps the smoothing bleed at motion boundaries within one frame:
// the outer window-5 coefficients are negative, so positions two frames past a
// motion edge never inherit a positive score.
struct FilterConfig {
    int window = 5;
    int order = 2;
};

// Full keyframe pipeline: mask subtraction, per-frame scores (fully occluded
// frames reuse the previous score), smoothing, dynamic threshold, labels.
inline MotionScoreSeries compute_motion_series(const MaskSequence& seq,
                                               const FilterConfig& filt = {}) {
    seq.validate();
    MotionScoreSeries out;
    std::size_t t_count = seq.frames.size() - 1;
    out.raw.reserve(t_count);
    double prev = 0.0;
    for (std::size_t t = 0; t < t_count; ++t) {
        const auto& [dyn_t, rob_t] = seq.frames[t];
        const auto& [dyn_t1, rob_t1] = seq.frames[t + 1];
        auto [mt, mt1] = subtract_masks(dyn_t, rob_t1, dyn_t1, rob_t);
        double score;
        try {
            score = motion_score(mt, mt1);
        } catch (const EmptyMask&) {
            score = prev;  // full occlusion
        }
        out.raw.push_back(score);
        prev = score;
    }
    out.smoothed = savgol_smooth(out.raw, filt.window, filt.order);
    auto thr = dynamic_threshold(out.smoothed);
    out.baseline_b = thr.baseline_b;
    out.sigma_noise = thr.sigma_noise;
    out.threshold_mu = thr.threshold_mu;
    out.labels.reserve(out.smoothed.size());
    for (double v : out.smoothed) out.labels.push_back(v > out.threshold_mu);
    auto [start, end] = extract_keyframes(out.smoothed, out.threshold_mu);
    out.start_frame = start;
    out.end_frame = end;
    return out;
}

}  // namespace artgen
