#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ldptop/descriptors.hpp"
#include "ldptop/learn.hpp"

namespace ldptop {

struct WindowPrediction {
    int label = 0;
    double score = 0.0;
    int window_index = 0;
};

struct VideoVerdict {
    std::string video_id;
    int label = 0;       ///< p-hat
    double score = 0.0;  ///< s-hat
    std::vector<WindowPrediction> windows;
    std::optional<Technique> attribution;
    /// Fusion only: argmax technique even when the video is judged real.
    std::optional<Technique> top_technique;
    /// True when `score` is not the reduced mean of one classifier: the fused
    /// score of a video judged real, or a reduced mean with no matching window.
    bool score_is_fallback = false;
    std::vector<std::string> model_refs;

    std::size_t window_count() const { return windows.size(); }
};

/// Most frequent label; an exact tie goes to 0.
int majority_vote(std::span<const int> labels);

struct ReducedMean {
    double value = 0.0;
    /// No window carried the requested label; `value` is the mean of all scores.
    bool fallback = false;
};

/// Mean score over the windows whose label equals `video_label`.
ReducedMean reduced_mean(std::span<const WindowPrediction> windows, int video_label);

/// Majority vote and reduced mean over per-window predictions.
VideoVerdict aggregate(std::string video_id, std::vector<WindowPrediction> windows);

VideoVerdict classify_video(const LinearSvmModel& model, std::span<const FeatureVector> features);

/// OR-fusion of the DF, F2F and FSW verdicts of one video. When any says
/// manipulated, the technique with the largest score is attributed (ties favor
/// DF, then F2F) and the fused score is that maximum; otherwise the fused score
/// is the mean of the three and is flagged as a fallback.
VideoVerdict fuse_and_attribute(const std::map<Technique, VideoVerdict>& verdicts);

nlohmann::json verdict_to_json(const VideoVerdict& v);
VideoVerdict verdict_from_json(const nlohmann::json& j);

/// JSON Lines: {video_id, p_hat, s_hat, N, per_window, attribution?, model_refs, ...}.
void write_verdicts(const std::filesystem::path& path, const std::vector<VideoVerdict>& verdicts,
                    const nlohmann::json& config);
std::vector<VideoVerdict> read_verdicts(const std::filesystem::path& path);

}  // namespace ldptop
