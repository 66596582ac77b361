#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ldptop/descriptors.hpp"

namespace ldptop {

/// Feature files hold one record per window: a JSON header line (kind, mode,
/// area, provenance, label, config echo) followed by `[u32 dim][f64 x dim]`,
/// little-endian.
struct FeatureFile {
    std::vector<FeatureVector> records;
    nlohmann::json config;  ///< config echo of the first record (null when empty)
};

void write_feature_record(std::ostream& out, const FeatureVector& fv, const nlohmann::json& config);
void write_feature_file(const std::filesystem::path& path, const std::vector<FeatureVector>& records,
                        const nlohmann::json& config);
FeatureFile read_feature_file(const std::filesystem::path& path);

/// Debug CSV: `video_id,window_index,start_frame,label,f0,...`.
void write_feature_csv(const std::filesystem::path& path, const std::vector<FeatureVector>& records);

}  // namespace ldptop
