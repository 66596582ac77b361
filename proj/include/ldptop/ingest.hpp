#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ldptop/types.hpp"

namespace ldptop {

/// Decoded grayscale video. All frames share one size; fps > 0.
struct FrameSequence {
    std::vector<Grayscale2D> frames;
    double fps = 0.0;
    std::string source_id;

    std::size_t size() const { return frames.size(); }
    FrameDims dims() const { return frames.empty() ? FrameDims{} : FrameDims{frames[0].height(), frames[0].width()}; }
};

/// Checks the FrameSequence invariants, throwing on violation.
void validate(const FrameSequence& seq);

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point2&) const = default;
};

inline constexpr int kLandmarkCount = 68;
using LandmarkFrame = std::array<Point2, kLandmarkCount>;

/// Per-frame 68-point landmarks, frame k at index k.
struct LandmarkTrack {
    std::vector<LandmarkFrame> frames;

    std::size_t size() const { return frames.size(); }
    bool operator==(const LandmarkTrack&) const = default;
};

struct VideoRecord {
    std::string id;
    std::string frames_path;     ///< as written in the manifest
    std::string landmarks_path;  ///< as written in the manifest
    std::optional<Box> initial_box;
    int label = 0;  ///< 0 real, 1 manipulated
    Technique technique = Technique::Original;
    bool train = true;  ///< split: train or test

    bool operator==(const VideoRecord&) const = default;
};

struct DatasetManifest {
    std::vector<VideoRecord> records;
    /// Directory relative paths are resolved against (the manifest's own directory).
    std::filesystem::path base_dir;

    std::filesystem::path resolve(const std::string& path) const;
    const VideoRecord* find(const std::string& id) const;
};

/// BT.601 luma with integer rounding: round(0.299 R + 0.587 G + 0.114 B).
std::uint8_t luma_bt601(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// Loads either a directory of PNG/PGM frames with `meta.json` ({"fps": float}),
/// or a Y4M file (luma plane used as-is).
FrameSequence load_frames(const std::filesystem::path& path);
FrameSequence load_y4m(const std::filesystem::path& path);
FrameSequence load_frame_directory(const std::filesystem::path& dir);

/// Writes frames as `frame_NNNNNN.pgm` plus `meta.json`.
void save_frame_directory(const FrameSequence& seq, const std::filesystem::path& dir);

/// JSON-Lines, one `{"frame": k, "points": [[x, y] x 68]}` object per frame.
LandmarkTrack load_landmarks(const std::filesystem::path& path);
void save_landmarks(const LandmarkTrack& track, const std::filesystem::path& path);

/// CSV (header `id,frames_path,landmarks_path,initial_box,label,technique,split`)
/// or JSON (`{"records": [...]}` with the same keys), chosen by extension.
DatasetManifest load_manifest(const std::filesystem::path& path);
/// Parses manifest CSV text; paths are checked against `base_dir` when `check_paths`.
DatasetManifest parse_manifest_csv(const std::string& text, const std::filesystem::path& base_dir,
                                   bool check_paths = true);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
std::string format_manifest_csv(const DatasetManifest& manifest);

}  // namespace ldptop
