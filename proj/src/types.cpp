#include "ldptop/types.hpp"

#include <charconv>

#include "ldptop/errors.hpp"

namespace ldptop {

Grayscale2D::Grayscale2D(int height, int width, std::uint8_t fill)
    : height_(height), width_(width) {
    if (height < 0 || width < 0) throw ParameterError("negative image size");
    samples_.assign(static_cast<std::size_t>(height) * width, fill);
}

Grayscale2D::Grayscale2D(int height, int width, std::vector<std::uint8_t> samples)
    : height_(height), width_(width), samples_(std::move(samples)) {
    if (height < 0 || width < 0) throw ParameterError("negative image size");
    if (samples_.size() != static_cast<std::size_t>(height) * width)
        throw DimensionMismatchError("sample count " + std::to_string(samples_.size()) + " != " +
                                     std::to_string(height) + "x" + std::to_string(width));
}

namespace {

int parse_int(std::string_view s, std::string_view what) {
    int value = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (ec != std::errc{} || ptr != end) throw FormatError("bad integer for " + std::string(what) + ": '" + std::string(s) + "'");
    return value;
}

}  // namespace

Box parse_box(std::string_view text) {
    int parts[4];
    std::size_t start = 0;
    for (int i = 0; i < 4; ++i) {
        const auto colon = text.find(':', start);
        if ((i < 3) == (colon == std::string_view::npos))
            throw FormatError("box must be top:left:height:width, got '" + std::string(text) + "'");
        const auto end = i < 3 ? colon : text.size();
        parts[i] = parse_int(text.substr(start, end - start), "box");
        start = end + 1;
    }
    Box box{parts[0], parts[1], parts[2], parts[3]};
    if (box.height <= 0 || box.width <= 0 || box.top < 0 || box.left < 0)
        throw FormatError("box must have non-negative origin and positive size: '" + std::string(text) + "'");
    return box;
}

std::string format_box(const Box& box) {
    return std::to_string(box.top) + ":" + std::to_string(box.left) + ":" + std::to_string(box.height) + ":" +
           std::to_string(box.width);
}

std::string_view to_string(Technique t) {
    switch (t) {
        case Technique::Original: return "OR";
        case Technique::Deepfakes: return "DF";
        case Technique::Face2Face: return "F2F";
        case Technique::FaceSwap: return "FSW";
    }
    return "?";
}

std::string_view to_string(Area a) {
    switch (a) {
        case Area::Full: return "F";
        case Area::Top: return "T";
        case Area::Bottom: return "B";
    }
    return "?";
}

std::string_view to_string(TemporalMode m) {
    switch (m) {
        case TemporalMode::Direct: return "direct";
        case TemporalMode::Inverse: return "inverse";
        case TemporalMode::Bidirectional: return "bidirectional";
    }
    return "?";
}

std::string_view to_string(DescriptorKind k) {
    switch (k) {
        case DescriptorKind::LdpTop: return "LDP-TOP";
        case DescriptorKind::LbpTop: return "LBP-TOP";
    }
    return "?";
}

Technique parse_technique(std::string_view s) {
    if (s == "OR") return Technique::Original;
    if (s == "DF") return Technique::Deepfakes;
    if (s == "F2F") return Technique::Face2Face;
    if (s == "FSW") return Technique::FaceSwap;
    throw FormatError("unknown technique '" + std::string(s) + "' (expected OR, DF, F2F or FSW)");
}

Area parse_area(std::string_view s) {
    if (s == "F") return Area::Full;
    if (s == "T") return Area::Top;
    if (s == "B") return Area::Bottom;
    throw FormatError("unknown area '" + std::string(s) + "' (expected F, T or B)");
}

TemporalMode parse_mode(std::string_view s) {
    if (s == "direct" || s == "->" || s == "→") return TemporalMode::Direct;
    if (s == "inverse" || s == "<-" || s == "←") return TemporalMode::Inverse;
    if (s == "bidirectional" || s == "<->" || s == "↔") return TemporalMode::Bidirectional;
    throw FormatError("unknown temporal mode '" + std::string(s) + "'");
}

DescriptorKind parse_descriptor(std::string_view s) {
    if (s == "LDP-TOP" || s == "ldp-top" || s == "ldptop") return DescriptorKind::LdpTop;
    if (s == "LBP-TOP" || s == "lbp-top" || s == "lbptop") return DescriptorKind::LbpTop;
    throw FormatError("unknown descriptor '" + std::string(s) + "'");
}

}  // namespace ldptop
