#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ldptop/ingest.hpp"

namespace fixture {

/// Synthetic talking-head videos. Real videos carry a smooth texture that
/// drifts with the head; manipulated ones add per-frame flicker in a band of
/// the face that depends on the technique (DF: mouth, F2F: eyes, FSW: whole face).
struct Spec {
    int train_per_class = 4;
    int test_per_class = 2;
    int frames = 90;
    double fps = 30.0;
    int frame_height = 96;
    int frame_width = 96;
    ldptop::Box face{24, 24, 48, 48};
    std::vector<ldptop::Technique> techniques{ldptop::Technique::Deepfakes};
    /// Leave the manifest box empty for every other video, so it is derived from landmarks.
    bool derive_some_boxes = false;
    std::uint64_t seed = 7;
};


/// Writes frames, landmarks and `manifest.csv` under `root`; returns the manifest path.
std::filesystem::path generate(const Spec& spec, const std::filesystem::path& root);

/// Renders one video in memory.
struct Video {
    ldptop::FrameSequence frames;
    ldptop::LandmarkTrack landmarks;
};
Video render(const Spec& spec, ldptop::Technique technique, std::uint64_t seed);

/// Fresh scratch directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

}  // namespace fixture
