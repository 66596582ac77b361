#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "ldptop/decision.hpp"
#include "ldptop/ingest.hpp"

namespace ldptop {

/// Fraction of predictions equal to the truth.
double accuracy(std::span<const int> predicted, std::span<const int> truth);

/// ROC AUC of `scores` against 0/1 labels (Mann-Whitney, ties count one half).
double auc(std::span<const double> scores, std::span<const int> labels);

/// FPR = FP / (FP + TN), FNR = FN / (FN + TP); absent when the denominator is zero.
struct Rates {
    std::optional<double> fpr;
    std::optional<double> fnr;
};

Rates rates(std::span<const int> predicted, std::span<const int> truth);

/// Rows: true technique (DF, F2F, FSW); columns: attributed technique.
struct ConfusionMatrix {
    std::array<std::array<std::size_t, 3>, 3> counts{};

    std::size_t row_total(std::size_t row) const;
    /// Row-normalised percentage; absent for an empty row.
    std::optional<double> percent(std::size_t row, std::size_t col) const;
    nlohmann::json to_json() const;
};

/// Index of a manipulation technique in the 3x3 layout; throws for OR.
std::size_t technique_index(Technique t);

/// Counts only manipulated videos detected as such (p-hat = 1). With
/// `conditioned` false, every manipulated video is counted using the argmax
/// technique even when it was judged real.
ConfusionMatrix attribution_confusion(std::span<const VideoVerdict> verdicts, std::span<const Technique> truth,
                                      bool conditioned = true);

struct EvalReport {
    std::size_t videos = 0;
    double accuracy = 0.0;
    std::optional<double> auc;  ///< absent when only one class is present
    Rates rates;
    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
    /// Accuracy over OR plus each manipulation technique's videos.
    std::vector<std::pair<Technique, double>> per_technique_accuracy;
    std::optional<ConfusionMatrix> confusion;
    /// AUC over per-window scores, each window carrying its video's label.
    std::optional<double> window_auc;
    nlohmann::json config;

    nlohmann::json to_json() const;
};

struct EvalOptions {
    bool conditioned_confusion = true;
    bool window_auc = false;
};

/// Joins verdicts with the manifest by video id (unknown ids are an error).
EvalReport evaluate(std::span<const VideoVerdict> verdicts, const DatasetManifest& manifest, const EvalOptions& opts = {});

void write_report_json(const EvalReport& report, const std::filesystem::path& path);
/// One `metric,value` row per scalar, plus the confusion matrix when present.
void write_report_csv(const EvalReport& report, const std::filesystem::path& path);

struct BarSeries {
    std::string label;
    double value = 0.0;
};

/// Minimal SVG bar chart (values in [0, 1] unless `signed_values`).
void write_bar_chart_svg(const std::filesystem::path& path, const std::string& title, std::span<const BarSeries> bars,
                         bool signed_values = false);

}  // namespace ldptop
