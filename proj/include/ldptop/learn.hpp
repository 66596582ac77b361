#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include <json.hpp>

#include "ldptop/types.hpp"
#include "ldptop/windowing.hpp"

namespace ldptop {

/// Window-level training matrix; labels are 0 (real) or 1 (manipulated).
struct LabeledSet {
    std::vector<std::vector<double>> features;
    std::vector<int> labels;

    std::size_t size() const { return features.size(); }
    std::size_t dim() const { return features.empty() ? 0 : features.front().size(); }
    std::size_t count(int label) const;
    void add(std::vector<double> x, int label);
};

/// Per-feature standardization statistics (population standard deviation).
struct Scaler {
    std::vector<double> mean;
    std::vector<double> stddev;

    std::size_t dim() const { return mean.size(); }
    /// Features with zero spread; they scale to 0.
    std::size_t constant_features() const;
    bool operator==(const Scaler&) const = default;
};

Scaler fit_scaler(const LabeledSet& set);
std::vector<double> apply_scaler(const Scaler& scaler, std::span<const double> x);
LabeledSet apply_scaler(const Scaler& scaler, const LabeledSet& set);

struct SvmParams {
    double C = 1.0;
    double tol = 1e-3;
    /// Epoch budget, one epoch being n_samples pair updates; 0 means 10 * n_samples.
    long max_epochs = 0;
    /// Kernel row cache budget.
    std::size_t cache_megabytes = 512;
};

/// Raw dual solution of the soft-margin linear SVM on the given features.
struct SvmSolution {
    std::vector<double> weights;
    double bias = 0.0;
    std::vector<double> alpha;  ///< one dual variable per sample, in [0, C]
    long iterations = 0;
    bool converged = false;
    double max_violation = 0.0;  ///< final KKT gap (m(alpha) - M(alpha))
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    /// Objectives sampled after every epoch and at termination.
    std::vector<double> dual_trace;
    std::vector<double> primal_trace;
};

/// SMO with second-order working-set selection over a linear kernel.
/// Labels 0/1 map to -1/+1.
SvmSolution solve_svm(const LabeledSet& set, const SvmParams& params = {});

/// 0.5 |w|^2 + C * sum hinge(1 - y (w.x + b)).
double primal_objective(std::span<const double> weights, double bias, const LabeledSet& set, double C);

struct ModelMetadata {
    Technique technique = Technique::Deepfakes;
    Area area = Area::Full;
    TemporalMode mode = TemporalMode::Direct;
    DescriptorKind descriptor = DescriptorKind::LdpTop;
    WindowingConfig windowing;
    nlohmann::json config;  ///< full run-config echo
};

struct LinearSvmModel {
    std::vector<double> weights;
    double bias = 0.0;
    double C = 1.0;
    double tol = 1e-3;
    Scaler scaler;
    ModelMetadata metadata;
    long iterations = 0;
    bool converged = false;

    std::size_t dim() const { return weights.size(); }
};

/// Standardizes `set`, then solves the SVM on the standardized features.
LinearSvmModel train_svm(const LabeledSet& set, const SvmParams& params, const ModelMetadata& metadata);

struct Prediction {
    int label = 0;  ///< 1 iff score > 0
    double score = 0.0;
};

/// Score w . standardize(x) + b; positive means manipulated.
Prediction predict(const LinearSvmModel& model, std::span<const double> x);

inline constexpr int kModelSchemaVersion = 1;

nlohmann::json model_to_json(const LinearSvmModel& model);
LinearSvmModel model_from_json(const nlohmann::json& j);
void save_model(const LinearSvmModel& model, const std::filesystem::path& path);
LinearSvmModel load_model(const std::filesystem::path& path);

/// Lossless hex-float text for a double, and its inverse.
std::string encode_double(double v);
double decode_double(const std::string& s);

}  // namespace ldptop
