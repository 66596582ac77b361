#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ldptop/config.hpp"
#include "ldptop/decision.hpp"
#include "ldptop/descriptors.hpp"
#include "ldptop/ingest.hpp"
#include "ldptop/learn.hpp"
#include "ldptop/tracking.hpp"
#include "ldptop/windowing.hpp"

namespace ldptop {

/// Tracked face-patch volume of one video, before windowing.
struct PreparedVideo {
    VideoVolume volume;
    MotionSeries raw_motion;
    MotionSeries smoothed_motion;
    std::size_t clamped_frames = 0;
};

/// Loads frames and landmarks, tracks the face box and crops the patch volume.
PreparedVideo prepare_video(const VideoRecord& record, const DatasetManifest& manifest, const RunConfig& cfg);

/// Partitions, selects the area and describes every window of a prepared volume.
std::vector<FeatureVector> window_features(const VideoVolume& volume, const RunConfig& cfg, std::optional<int> label);

/// Worker count: `requested` if positive, else $LDPTOP_WORKERS, else the hardware concurrency.
int worker_count(int requested = 0);

/// Runs fn(0..n-1) on `workers` threads; fn must only touch slot i of shared output.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

std::filesystem::path feature_file_path(const std::filesystem::path& dir, const std::string& video_id);

struct ExtractOptions {
    int workers = 0;
    std::optional<std::filesystem::path> motion_dump_dir;
    bool csv = false;
};

struct ExtractSummary {
    std::size_t written = 0;
    /// `id: message` for each video that failed.
    std::vector<std::string> failures;
    std::vector<std::string> warnings;
};

/// One feature file per manifest video in `out_dir`; failures are isolated per video.
ExtractSummary run_extract(const DatasetManifest& manifest, const RunConfig& cfg, const std::filesystem::path& out_dir,
                           const ExtractOptions& opts = {});

/// Video id -> window features.
using FeatureTable = std::map<std::string, std::vector<FeatureVector>>;

/// Reads the feature files of `records` from `dir`.
FeatureTable load_feature_table(const DatasetManifest& manifest, const std::filesystem::path& dir);

/// Training windows of the train-split OR videos (label 0) and `technique` videos (label 1).
LabeledSet training_set(const DatasetManifest& manifest, const FeatureTable& features, Technique technique);

ModelMetadata model_metadata(const RunConfig& cfg, Technique technique);

LinearSvmModel run_train(const DatasetManifest& manifest, const FeatureTable& features, Technique technique,
                         const RunConfig& cfg);

enum class SplitFilter { Train, Test, All };

/// With one model: the OR and model-technique videos of the split. With three
/// (DF, F2F, FSW): every video of the split, fused and attributed.
std::vector<VideoVerdict> run_classify(const DatasetManifest& manifest, const FeatureTable& features,
                                       const std::vector<LinearSvmModel>& models,
                                       const std::vector<std::string>& model_refs, SplitFilter split);

struct TechniqueResult {
    Technique technique = Technique::Deepfakes;
    double accuracy = 0.0;
    std::optional<double> auc;
    std::size_t train_windows = 0;
    std::size_t test_windows = 0;
};

/// Trains on the train split and scores the test split for one technique.
TechniqueResult run_single_technique(const DatasetManifest& manifest, const FeatureTable& features,
                                     Technique technique, const RunConfig& cfg);

/// Manipulation techniques having both train and test videos in the manifest.
std::vector<Technique> techniques_present(const DatasetManifest& manifest);

/// Extracts features for several configs in one pass over the videos. Configs
/// must agree on everything that precedes windowing (smoother, landmarks, margin).
std::vector<FeatureTable> extract_tables(const DatasetManifest& manifest, const std::vector<RunConfig>& cfgs,
                                         int workers, std::vector<std::string>* failures = nullptr);

struct AblationCell {
    Technique technique = Technique::Deepfakes;
    double sliding = 0.0;
    double non_sliding = 0.0;
    double loss() const { return sliding - non_sliding; }
};

struct AblationRow {
    Area area = Area::Full;
    TemporalMode mode = TemporalMode::Direct;
    std::vector<AblationCell> cells;
};

/// Accuracy with and without temporal partitioning for each (area, mode) pair.
std::vector<AblationRow> sliding_ablation(const DatasetManifest& manifest, const RunConfig& base,
                                          const std::vector<std::pair<Area, TemporalMode>>& variants, int workers = 0);

struct GridRow {
    Area area = Area::Full;
    TemporalMode mode = TemporalMode::Direct;
    std::vector<TechniqueResult> results;
};

/// Single-technique accuracy and AUC for each (area, mode) pair.
std::vector<GridRow> technique_grid(const DatasetManifest& manifest, const RunConfig& base,
                                    const std::vector<std::pair<Area, TemporalMode>>& variants, int workers = 0);

/// All nine (area, mode) combinations.
std::vector<std::pair<Area, TemporalMode>> all_variants();

nlohmann::json ablation_to_json(const std::vector<AblationRow>& rows, const RunConfig& cfg);
nlohmann::json grid_to_json(const std::vector<GridRow>& rows, const RunConfig& cfg);

}  // namespace ldptop
