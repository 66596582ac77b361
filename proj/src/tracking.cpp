#include "ldptop/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <Eigen/Dense>

#include "ldptop/errors.hpp"

namespace ldptop {

namespace {

void check_index(int idx, const char* name) {
    if (idx < 0 || idx >= kLandmarkCount)
        throw ParameterError(std::string("landmark index ") + name + "=" + std::to_string(idx) + " outside [0, 68)");
}

// Mirror index without repeating the end sample: -1 -> 1, n -> n-2.
std::size_t mirror(long i, long n) {
    if (n == 1) return 0;
    const long period = 2 * (n - 1);
    i %= period;
    if (i < 0) i += period;
    return static_cast<std::size_t>(i < n ? i : period - i);
}

}  // namespace

MotionSeries compute_motion(const LandmarkTrack& track, const LandmarkIndices& idx) {
    check_index(idx.right_eye, "r");
    check_index(idx.left_eye, "l");
    check_index(idx.nose_top, "n");
    if (track.size() < 2) throw TooSmallError("motion needs at least 2 frames, got " + std::to_string(track.size()));

    const int picks[3] = {idx.right_eye, idx.left_eye, idx.nose_top};
    MotionSeries motion(track.size() - 1);
    for (std::size_t k = 0; k + 1 < track.size(); ++k) {
        double sx = 0.0, sy = 0.0;
        for (int p : picks) {
            sx += track.frames[k + 1][p].x - track.frames[k][p].x;
            sy += track.frames[k + 1][p].y - track.frames[k][p].y;
        }
        motion[k] = {sx / 3.0, sy / 3.0};
    }
    return motion;
}

std::vector<double> savgol_coefficients(int window, int order) {
    if (window < 3 || window % 2 == 0) throw ParameterError("Savitzky-Golay window must be odd and >= 3");
    if (order < 0 || order >= window) throw ParameterError("Savitzky-Golay order must satisfy 0 <= order < window");
    const int half = window / 2;
    Eigen::MatrixXd vander(window, order + 1);
    for (int i = 0; i < window; ++i) {
        double t = 1.0;
        for (int p = 0; p <= order; ++p) {
            vander(i, p) = t;
            t *= static_cast<double>(i - half);
        }
    }
    // The fitted value at t = 0 is the constant term: row 0 of the pseudo-inverse.
    const Eigen::MatrixXd pinv = vander.completeOrthogonalDecomposition().pseudoInverse();
    std::vector<double> coeffs(window);
    for (int i = 0; i < window; ++i) coeffs[i] = pinv(0, i);
    return coeffs;
}

std::vector<double> savgol_smooth(std::span<const double> series, int window, int order) {
    const auto coeffs = savgol_coefficients(window, order);
    if (series.empty()) throw ParameterError("Savitzky-Golay input is empty");
    const long n = static_cast<long>(series.size());
    const long half = window / 2;
    std::vector<double> out(series.size());
    for (long i = 0; i < n; ++i) {
        double acc = 0.0;
        for (long j = -half; j <= half; ++j) acc += coeffs[j + half] * series[mirror(i + j, n)];
        out[i] = acc;
    }
    return out;
}

MotionSeries smooth_motion(const MotionSeries& motion, const SmootherConfig& cfg) {
    if (motion.empty()) return {};
    std::vector<double> dx(motion.size()), dy(motion.size());
    for (std::size_t k = 0; k < motion.size(); ++k) {
        dx[k] = motion[k].dx;
        dy[k] = motion[k].dy;
    }
    const auto sx = savgol_smooth(dx, cfg.window, cfg.order);
    const auto sy = savgol_smooth(dy, cfg.window, cfg.order);
    MotionSeries out(motion.size());
    for (std::size_t k = 0; k < motion.size(); ++k) out[k] = {sx[k], sy[k]};
    return out;
}

RoiTrack build_roi_track(const Box& initial, const MotionSeries& motion, FrameDims frame) {
    if (initial.height <= 0 || initial.width <= 0 || initial.top < 0 || initial.left < 0 ||
        initial.top + initial.height > frame.height || initial.left + initial.width > frame.width)
        throw ParameterError("initial box " + format_box(initial) + " is not inside the " + std::to_string(frame.height) +
                             "x" + std::to_string(frame.width) + " frame");

    RoiTrack track;
    track.height = initial.height;
    track.width = initial.width;
    track.positions.reserve(motion.size() + 1);
    const int max_top = frame.height - initial.height;
    const int max_left = frame.width - initial.width;

    double top = initial.top;
    double left = initial.left;
    track.positions.push_back({initial.top, initial.left});
    for (const auto& d : motion) {
        top += d.dy;
        left += d.dx;
        // std::lround rounds half away from zero.
        const long rt = std::lround(top);
        const long rl = std::lround(left);
        const int ct = static_cast<int>(std::clamp<long>(rt, 0, max_top));
        const int cl = static_cast<int>(std::clamp<long>(rl, 0, max_left));
        if (ct != rt || cl != rl) ++track.clamped_frames;
        track.positions.push_back({ct, cl});
    }
    return track;
}

Box derive_initial_box(const LandmarkFrame& pts, double margin_factor, FrameDims frame) {
    if (margin_factor < 0.0) throw ParameterError("margin factor must be non-negative");
    double min_x = pts[0].x, max_x = pts[0].x, min_y = pts[0].y, max_y = pts[0].y;
    for (const auto& p : pts) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw ParameterError("non-finite landmark coordinate");
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    if (!(max_x > min_x) || !(max_y > min_y)) throw ParameterError("degenerate landmark cloud (zero-area bounding box)");

    const double pad_y = std::round(margin_factor * (max_y - min_y));
    const double pad_x = std::round(margin_factor * (max_x - min_x));
    const long top = static_cast<long>(std::floor(min_y - pad_y));
    const long left = static_cast<long>(std::floor(min_x - pad_x));
    const long bottom = static_cast<long>(std::ceil(max_y + pad_y));  // inclusive
    const long right = static_cast<long>(std::ceil(max_x + pad_x));

    const long ct = std::max(0L, top);
    const long cl = std::max(0L, left);
    const long cb = std::min<long>(frame.height - 1, bottom);
    const long cr = std::min<long>(frame.width - 1, right);
    if (cb < ct || cr < cl) throw ParameterError("landmark bounding box lies outside the frame");
    return {static_cast<int>(ct), static_cast<int>(cl), static_cast<int>(cb - ct + 1), static_cast<int>(cr - cl + 1)};
}

void write_motion_csv(const MotionSeries& raw, const MotionSeries& smoothed, const std::filesystem::path& path) {
    if (raw.size() != smoothed.size()) throw DimensionMismatchError("raw and smoothed motion differ in length");
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write " + path.string());
    out.precision(17);
    out << "frame,dx_raw,dy_raw,dx_smooth,dy_smooth\n";
    for (std::size_t k = 0; k < raw.size(); ++k)
        out << k << ',' << raw[k].dx << ',' << raw[k].dy << ',' << smoothed[k].dx << ',' << smoothed[k].dy << '\n';
}

}  // namespace ldptop
