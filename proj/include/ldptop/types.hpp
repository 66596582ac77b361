#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ldptop {

/// Row-major 8-bit grayscale image.
class Grayscale2D {
public:
    Grayscale2D() = default;
    Grayscale2D(int height, int width, std::uint8_t fill = 0);
    Grayscale2D(int height, int width, std::vector<std::uint8_t> samples);

    int height() const { return height_; }
    int width() const { return width_; }
    bool empty() const { return samples_.empty(); }

    std::uint8_t operator()(int h, int w) const { return samples_[static_cast<std::size_t>(h) * width_ + w]; }
    std::uint8_t& operator()(int h, int w) { return samples_[static_cast<std::size_t>(h) * width_ + w]; }

    const std::vector<std::uint8_t>& samples() const { return samples_; }
    std::vector<std::uint8_t>& samples() { return samples_; }

    bool operator==(const Grayscale2D&) const = default;

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<std::uint8_t> samples_;
};

/// Axis-aligned integer rectangle in pixel coordinates.
struct Box {
    int top = 0;
    int left = 0;
    int height = 0;
    int width = 0;

    bool operator==(const Box&) const = default;
};

struct FrameDims {
    int height = 0;
    int width = 0;
};

/// Parses `top:left:height:width`.
Box parse_box(std::string_view text);
std::string format_box(const Box& box);

enum class Technique { Original, Deepfakes, Face2Face, FaceSwap };
enum class Area { Full, Top, Bottom };
enum class TemporalMode { Direct, Inverse, Bidirectional };
enum class DescriptorKind { LdpTop, LbpTop };

/// Short codes used in files: OR, DF, F2F, FSW.
std::string_view to_string(Technique t);
/// F, T, B.
std::string_view to_string(Area a);
/// direct, inverse, bidirectional.
std::string_view to_string(TemporalMode m);
/// LDP-TOP, LBP-TOP.
std::string_view to_string(DescriptorKind k);

Technique parse_technique(std::string_view s);
Area parse_area(std::string_view s);
TemporalMode parse_mode(std::string_view s);
DescriptorKind parse_descriptor(std::string_view s);

/// The three manipulation techniques, in attribution tie-break order.
inline constexpr Technique kManipulations[] = {Technique::Deepfakes, Technique::Face2Face, Technique::FaceSwap};

}  // namespace ldptop
