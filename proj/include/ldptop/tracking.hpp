#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "ldptop/ingest.hpp"

namespace ldptop {

/// Landmarks whose mean displacement drives the tracker. Defaults follow the
/// 68-point layout: inner corner of each eye and the top of the nose bridge.
struct LandmarkIndices {
    int right_eye = 39;
    int left_eye = 42;
    int nose_top = 27;
};

struct Displacement {
    double dx = 0.0;
    double dy = 0.0;
};

/// Inter-frame displacement; entry k is the motion from frame k to k+1.
using MotionSeries = std::vector<Displacement>;

struct SmootherConfig {
    int window = 7;
    int order = 2;
};

struct RoiPosition {
    int top = 0;
    int left = 0;

    bool operator==(const RoiPosition&) const = default;
};

/// Fixed-size face rectangle per frame.
struct RoiTrack {
    int height = 0;
    int width = 0;
    std::vector<RoiPosition> positions;
    /// Frames whose rectangle had to be pulled back inside the frame.
    std::size_t clamped_frames = 0;

    std::size_t size() const { return positions.size(); }
    Box box(std::size_t k) const { return {positions[k].top, positions[k].left, height, width}; }
};

MotionSeries compute_motion(const LandmarkTrack& track, const LandmarkIndices& indices = {});

/// Savitzky-Golay smoothing with mirror padding at both ends (reflection about
/// the end samples); output length equals input length.
std::vector<double> savgol_smooth(std::span<const double> series, int window, int order);

/// Convolution weights of the centred least-squares fit, length `window`.
std::vector<double> savgol_coefficients(int window, int order);

/// Smooths the dx and dy components independently.
MotionSeries smooth_motion(const MotionSeries& motion, const SmootherConfig& cfg = {});

/// Shifts `initial` by the accumulated motion. Positions accumulate in floating
/// point and are rounded half away from zero per frame, then clamped to the frame.
RoiTrack build_roi_track(const Box& initial, const MotionSeries& motion, FrameDims frame);

/// Bounding box of the landmarks grown by `margin_factor` times its extent on
/// each side, clamped to the frame.
Box derive_initial_box(const LandmarkFrame& landmarks, double margin_factor, FrameDims frame);

/// Debug dump: `frame,dx_raw,dy_raw,dx_smooth,dy_smooth`.
void write_motion_csv(const MotionSeries& raw, const MotionSeries& smoothed, const std::filesystem::path& path);

}  // namespace ldptop
