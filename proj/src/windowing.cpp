#include "ldptop/windowing.hpp"

#include <cmath>
#include <cstring>

#include "ldptop/errors.hpp"

namespace ldptop {

VideoVolume::VideoVolume(int height, int width, int depth, double fps)
    : height_(height), width_(width), depth_(depth), fps_(fps) {
    if (height < 0 || width < 0 || depth < 0) throw ParameterError("negative volume size");
    samples_.assign(static_cast<std::size_t>(height) * width * depth, 0);
}

WindowFrames window_frames(const WindowingConfig& cfg, double fps) {
    if (!(cfg.d_seconds > 0.0) || !(cfg.s_seconds > 0.0)) throw ParameterError("window length and stride must be positive");
    if (!(fps > 0.0)) throw ParameterError("fps must be positive");
    const auto length = std::lround(cfg.d_seconds * fps);
    const auto hop = std::lround(cfg.s_seconds * fps);
    if (length < 1) throw ParameterError("window shorter than one frame at " + std::to_string(fps) + " fps");
    if (hop < 1) throw ParameterError("stride shorter than one frame at " + std::to_string(fps) + " fps");
    return {static_cast<int>(length), static_cast<int>(hop)};
}

int window_count(int frame_count, const WindowingConfig& cfg, double fps) {
    if (frame_count <= 0) return 0;
    if (!cfg.sliding) return 1;
    const auto wf = window_frames(cfg, fps);
    if (frame_count < wf.length) return 1;
    return (frame_count - wf.length) / wf.hop + 1;
}

VideoVolume extract_patch_volume(const FrameSequence& frames, const RoiTrack& roi) {
    validate(frames);
    if (roi.size() != frames.size())
        throw DimensionMismatchError("ROI track has " + std::to_string(roi.size()) + " entries for " +
                                     std::to_string(frames.size()) + " frames");
    const auto dims = frames.dims();
    VideoVolume vol(roi.height, roi.width, static_cast<int>(frames.size()), frames.fps);
    vol.provenance.video_id = frames.source_id;
    for (int k = 0; k < vol.depth(); ++k) {
        const auto& pos = roi.positions[k];
        if (pos.top < 0 || pos.left < 0 || pos.top + roi.height > dims.height || pos.left + roi.width > dims.width)
            throw ParameterError("ROI at frame " + std::to_string(k) + " is outside the frame");
        const auto& f = frames.frames[k];
        for (int h = 0; h < roi.height; ++h)
            for (int w = 0; w < roi.width; ++w) vol(h, w, k) = f(pos.top + h, pos.left + w);
    }
    return vol;
}

namespace {

VideoVolume temporal_slice(const VideoVolume& v, int start, int length) {
    VideoVolume out(v.height(), v.width(), length, v.fps());
    out.provenance = v.provenance;
    out.provenance.start_frame = v.provenance.start_frame + start;
    for (int k = 0; k < length; ++k)
        for (int h = 0; h < v.height(); ++h)
            for (int w = 0; w < v.width(); ++w) out(h, w, k) = v(h, w, start + k);
    return out;
}

}  // namespace

std::vector<VideoVolume> partition(const VideoVolume& volume, const WindowingConfig& cfg) {
    if (volume.depth() == 0 || volume.height() == 0 || volume.width() == 0) throw TooSmallError("empty volume");
    const int count = window_count(volume.depth(), cfg, volume.fps());
    std::vector<VideoVolume> windows;
    windows.reserve(count);
    if (count == 1 && (!cfg.sliding || volume.depth() < window_frames(cfg, volume.fps()).length)) {
        windows.push_back(volume);
        windows.back().provenance.window_index = 0;
        return windows;
    }
    const auto wf = window_frames(cfg, volume.fps());
    for (int n = 0; n < count; ++n) {
        windows.push_back(temporal_slice(volume, n * wf.hop, wf.length));
        windows.back().provenance.window_index = n;
    }
    return windows;
}

VideoVolume select_area(const VideoVolume& volume, Area area) {
    int first = 0;
    int rows = volume.height();
    if (area == Area::Top) {
        rows = volume.height() / 2;
    } else if (area == Area::Bottom) {
        first = volume.height() / 2;
        rows = volume.height() - first;
    }
    if (rows < 5)
        throw TooSmallError("area " + std::string(to_string(area)) + " leaves " + std::to_string(rows) +
                            " rows; at least 5 are needed");
    VideoVolume out(rows, volume.width(), volume.depth(), volume.fps());
    out.provenance = volume.provenance;
    out.provenance.area = area;
    for (int k = 0; k < volume.depth(); ++k)
        for (int h = 0; h < rows; ++h)
            for (int w = 0; w < volume.width(); ++w) out(h, w, k) = volume(first + h, w, k);
    return out;
}

}  // namespace ldptop
