#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ldptop/types.hpp"
#include "ldptop/windowing.hpp"

namespace ldptop {

enum class Direction { Deg0, Deg45, Deg90, Deg135 };

inline constexpr Direction kDirections[] = {Direction::Deg0, Direction::Deg45, Direction::Deg90, Direction::Deg135};

inline constexpr std::size_t kLdpBins = 256;
inline constexpr std::size_t kLbpBins = 59;
inline constexpr std::size_t kLdpPlaneLength = kLdpBins * 4;
inline constexpr std::size_t kLdpTopLength = kLdpPlaneLength * 3;  // 3072
inline constexpr std::size_t kLbpTopLength = kLbpBins * 3;         // 177

/// Histogram descriptor of one temporal window.
struct FeatureVector {
    std::vector<double> values;
    DescriptorKind kind = DescriptorKind::LdpTop;
    TemporalMode mode = TemporalMode::Direct;
    Area area = Area::Full;
    std::string video_id;
    int window_index = 0;
    int start_frame = 0;
    std::optional<int> label;

    bool operator==(const FeatureVector&) const = default;
};

/// Expected descriptor length for a kind/mode pair.
std::size_t descriptor_length(DescriptorKind kind, TemporalMode mode);

/// First-order derivative A(h,w) - A(neighbor), neighbor being (h,w+1), (h-1,w+1),
/// (h-1,w) or (h-1,w-1) for 0, 45, 90 and 135 degrees.
int first_derivative(const Grayscale2D& a, Direction dir, int h, int w);

/// Second-order LDP code at (h,w): one bit per 8-neighbor, set when the
/// derivative there and at the centre do not share a strict sign. Neighbors
/// run clockwise from the top-left; the first one is the most significant bit.
std::uint8_t ldp2_code(const Grayscale2D& a, Direction dir, int h, int w);

/// Inclusive-exclusive rectangle of positions where every direction's code is defined.
struct ValidRegion {
    int row_begin = 0;
    int row_end = 0;
    int col_begin = 0;
    int col_end = 0;

    bool empty() const { return row_end <= row_begin || col_end <= col_begin; }
    std::size_t size() const {
        return empty() ? 0 : static_cast<std::size_t>(row_end - row_begin) * (col_end - col_begin);
    }
};

/// Rows [2, H-2] and cols [2, W-3].
ValidRegion ldp_valid_region(int height, int width);

using LdpCounts = std::array<std::array<std::uint32_t, kLdpBins>, 4>;

/// Raw per-direction code counts over the common valid region.
LdpCounts ldp_histogram_counts(const Grayscale2D& a);

/// Four L1-normalised 256-bin histograms (0, 45, 90, 135 degrees), concatenated.
std::vector<double> ldp_histograms(const Grayscale2D& a);

/// Central XY (H x W), XT (K x W, time on rows) and YT (H x K, time on columns) planes.
struct TopPlanes {
    Grayscale2D xy;
    Grayscale2D xt;
    Grayscale2D yt;
};

TopPlanes central_planes(const VideoVolume& v);

VideoVolume time_reverse(const VideoVolume& v);

/// LDP histograms of the XY, XT and YT planes. Inverse mode runs on the
/// time-reversed volume; bidirectional appends the inverse vector to the direct one.
FeatureVector ldp_top(const VideoVolume& v, TemporalMode mode);

/// 8-neighbor radius-1 LBP code; a neighbor >= the centre sets its bit.
std::uint8_t lbp_code(const Grayscale2D& a, int h, int w);

/// Maps an LBP code to its uniform-pattern bin: 0..57 for the 58 codes with at
/// most two circular 0/1 transitions (in ascending code order), 58 otherwise.
const std::array<std::uint8_t, 256>& uniform_lbp_table();

/// 59-bin L1-normalised uniform LBP histogram over rows/cols [1, dim-2].
std::vector<double> lbp_histogram(const Grayscale2D& a);

/// Uniform LBP histograms of the three central planes (177 values). The
/// temporal mode is recorded but not applied.
FeatureVector lbp_top(const VideoVolume& v);

/// Dispatches on kind and copies the window provenance.
FeatureVector extract_descriptor(const VideoVolume& v, DescriptorKind kind, TemporalMode mode);

}  // namespace ldptop
