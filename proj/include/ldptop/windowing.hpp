#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ldptop/ingest.hpp"
#include "ldptop/tracking.hpp"

namespace ldptop {

struct VolumeProvenance {
    std::string video_id;
    int window_index = 0;
    Area area = Area::Full;
    int start_frame = 0;
};

/// H x W x K block of 8-bit luma, stored frame-major (each k-slice contiguous).
class VideoVolume {
public:
    VideoVolume() = default;
    VideoVolume(int height, int width, int depth, double fps = 0.0);

    int height() const { return height_; }
    int width() const { return width_; }
    int depth() const { return depth_; }
    double fps() const { return fps_; }

    std::uint8_t operator()(int h, int w, int k) const { return samples_[index(h, w, k)]; }
    std::uint8_t& operator()(int h, int w, int k) { return samples_[index(h, w, k)]; }

    const std::vector<std::uint8_t>& samples() const { return samples_; }

    VolumeProvenance provenance;

    /// Pixel equality; provenance is ignored.
    bool same_pixels(const VideoVolume& other) const {
        return height_ == other.height_ && width_ == other.width_ && depth_ == other.depth_ && samples_ == other.samples_;
    }

private:
    std::size_t index(int h, int w, int k) const {
        return (static_cast<std::size_t>(k) * height_ + h) * width_ + w;
    }

    int height_ = 0;
    int width_ = 0;
    int depth_ = 0;
    double fps_ = 0.0;
    std::vector<std::uint8_t> samples_;
};

struct WindowingConfig {
    double d_seconds = 2.0;
    double s_seconds = 1.0;
    bool sliding = true;
};

/// Window length and hop in frames: round(d * fps), round(s * fps).
struct WindowFrames {
    int length = 0;
    int hop = 0;
};

WindowFrames window_frames(const WindowingConfig& cfg, double fps);

/// Number of windows `partition` emits for a clip of `frame_count` frames.
int window_count(int frame_count, const WindowingConfig& cfg, double fps);

/// Slice k is the ROI crop of frame k.
VideoVolume extract_patch_volume(const FrameSequence& frames, const RoiTrack& roi);

/// Complete overlapping windows; a clip shorter than one window, or
/// non-sliding mode, yields the whole clip as a single window.
std::vector<VideoVolume> partition(const VideoVolume& volume, const WindowingConfig& cfg);

/// F keeps everything, T keeps rows [0, H/2), B keeps rows [H/2, H).
VideoVolume select_area(const VideoVolume& volume, Area area);

}  // namespace ldptop
