#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "ldptop/learn.hpp"
#include "ldptop/tracking.hpp"
#include "ldptop/types.hpp"
#include "ldptop/windowing.hpp"

namespace ldptop {

/// Every knob of an experiment. Serialised verbatim into each output artifact.
struct RunConfig {
    Area area = Area::Full;
    TemporalMode mode = TemporalMode::Direct;
    DescriptorKind descriptor = DescriptorKind::LdpTop;
    WindowingConfig windowing;
    SmootherConfig smoother;
    LandmarkIndices landmarks;
    /// Margin used when the manifest carries no initial box.
    double margin_factor = 0.1;
    SvmParams svm;
    std::uint64_t seed = 0;
};

nlohmann::json to_json(const RunConfig& cfg);

/// Applies the keys present in `j` on top of `base`; unknown keys are rejected.
RunConfig merge_config(const RunConfig& base, const nlohmann::json& j);

RunConfig load_config(const std::filesystem::path& path);

/// `dotted.key=value`, e.g. `window.d_seconds=1.5` or `area=B`.
RunConfig apply_override(const RunConfig& cfg, const std::string& assignment);

}  // namespace ldptop
