#include "ldptop/descriptors.hpp"

#include <bit>

#include "ldptop/errors.hpp"

namespace ldptop {

namespace {

struct Offset {
    int dh;
    int dw;
};

// Neighbor of the derivative operator, indexed by Direction.
constexpr Offset kDerivativeNeighbor[4] = {{0, 1}, {-1, 1}, {-1, 0}, {-1, -1}};

// 3x3 neighborhood, most significant bit first.
constexpr Offset kRing[8] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}};

bool inside(const Grayscale2D& a, int h, int w) { return h >= 0 && w >= 0 && h < a.height() && w < a.width(); }

bool derivative_defined(const Grayscale2D& a, Direction dir, int h, int w) {
    const auto off = kDerivativeNeighbor[static_cast<int>(dir)];
    return inside(a, h, w) && inside(a, h + off.dh, w + off.dw);
}

constexpr std::array<std::uint8_t, 256> build_uniform_table() {
    std::array<std::uint8_t, 256> table{};
    std::uint8_t next = 0;
    for (unsigned code = 0; code < 256; ++code) {
        const unsigned rotated = ((code << 1) | (code >> 7)) & 0xFFu;
        const int transitions = std::popcount(code ^ rotated);
        table[code] = transitions <= 2 ? next++ : 58;
    }
    return table;
}

constexpr auto kUniformTable = build_uniform_table();
static_assert(kUniformTable[255] == 57 && kUniformTable[5] == 58);

void append_normalized(std::vector<double>& out, const std::uint32_t* counts, std::size_t bins, std::size_t mass) {
    const auto total = static_cast<double>(mass);
    for (std::size_t b = 0; b < bins; ++b) out.push_back(static_cast<double>(counts[b]) / total);
}

void check_plane(const Grayscale2D& plane, const char* name) {
    if (ldp_valid_region(plane.height(), plane.width()).empty())
        throw TooSmallError(std::string("plane ") + name + " (" + std::to_string(plane.height()) + "x" +
                            std::to_string(plane.width()) + ") has no valid LDP positions");
}

void append_ldp_planes(std::vector<double>& out, const VideoVolume& v) {
    const auto planes = central_planes(v);
    check_plane(planes.xy, "XY");
    check_plane(planes.xt, "XT");
    check_plane(planes.yt, "YT");
    for (const auto* plane : {&planes.xy, &planes.xt, &planes.yt}) {
        const auto h = ldp_histograms(*plane);
        out.insert(out.end(), h.begin(), h.end());
    }
}

FeatureVector with_provenance(const VideoVolume& v, DescriptorKind kind, TemporalMode mode) {
    FeatureVector fv;
    fv.kind = kind;
    fv.mode = mode;
    fv.area = v.provenance.area;
    fv.video_id = v.provenance.video_id;
    fv.window_index = v.provenance.window_index;
    fv.start_frame = v.provenance.start_frame;
    return fv;
}

}  // namespace

std::size_t descriptor_length(DescriptorKind kind, TemporalMode mode) {
    if (kind == DescriptorKind::LbpTop) return kLbpTopLength;
    return mode == TemporalMode::Bidirectional ? 2 * kLdpTopLength : kLdpTopLength;
}

int first_derivative(const Grayscale2D& a, Direction dir, int h, int w) {
    if (!derivative_defined(a, dir, h, w))
        throw PreconditionError("derivative neighbor of (" + std::to_string(h) + "," + std::to_string(w) +
                                ") is out of bounds");
    const auto off = kDerivativeNeighbor[static_cast<int>(dir)];
    return static_cast<int>(a(h, w)) - static_cast<int>(a(h + off.dh, w + off.dw));
}

std::uint8_t ldp2_code(const Grayscale2D& a, Direction dir, int h, int w) {
    const int centre = first_derivative(a, dir, h, w);
    unsigned code = 0;
    for (const auto& n : kRing) {
        const int other = first_derivative(a, dir, h + n.dh, w + n.dw);
        code = (code << 1) | (centre * other > 0 ? 0u : 1u);
    }
    return static_cast<std::uint8_t>(code);
}

ValidRegion ldp_valid_region(int height, int width) {
    ValidRegion r{2, height - 1, 2, width - 2};
    if (r.empty()) return {0, 0, 0, 0};
    return r;
}

LdpCounts ldp_histogram_counts(const Grayscale2D& a) {
    const auto region = ldp_valid_region(a.height(), a.width());
    if (region.empty())
        throw TooSmallError("image " + std::to_string(a.height()) + "x" + std::to_string(a.width()) +
                            " has no valid LDP positions");
    const int width = a.width();
    const auto* px = a.samples().data();

    // Sign of the derivative: 1 positive, 2 negative, 0 zero. Two derivatives
    // have a strictly positive product iff their sign masks share a bit.
    std::vector<std::uint8_t> sign(a.samples().size());
    std::ptrdiff_t ring[8];
    for (int i = 0; i < 8; ++i) ring[i] = static_cast<std::ptrdiff_t>(kRing[i].dh) * width + kRing[i].dw;

    LdpCounts counts{};
    for (int d = 0; d < 4; ++d) {
        const auto off = kDerivativeNeighbor[d];
        const std::ptrdiff_t noff = static_cast<std::ptrdiff_t>(off.dh) * width + off.dw;
        for (int h = region.row_begin - 1; h <= region.row_end; ++h) {
            const std::size_t row = static_cast<std::size_t>(h) * width;
            for (int w = region.col_begin - 1; w <= region.col_end; ++w) {
                const std::size_t i = row + w;
                const int diff = static_cast<int>(px[i]) - static_cast<int>(px[i + noff]);
                sign[i] = static_cast<std::uint8_t>((diff > 0) | ((diff < 0) << 1));
            }
        }
        auto& hist = counts[d];
        const auto* s = sign.data();
        for (int h = region.row_begin; h < region.row_end; ++h) {
            const std::size_t row = static_cast<std::size_t>(h) * width;
            for (int w = region.col_begin; w < region.col_end; ++w) {
                const std::size_t i = row + w;
                const std::uint8_t c = s[i];
                unsigned code = 0;
                for (int k = 0; k < 8; ++k) code = (code << 1) | ((c & s[i + ring[k]]) == 0);
                ++hist[code];
            }
        }
    }
    return counts;
}

std::vector<double> ldp_histograms(const Grayscale2D& a) {
    const auto counts = ldp_histogram_counts(a);
    const auto mass = ldp_valid_region(a.height(), a.width()).size();
    std::vector<double> out;
    out.reserve(kLdpPlaneLength);
    for (const auto& hist : counts) append_normalized(out, hist.data(), kLdpBins, mass);
    return out;
}

TopPlanes central_planes(const VideoVolume& v) {
    const int H = v.height(), W = v.width(), K = v.depth();
    if (H < 1 || W < 1 || K < 1) throw TooSmallError("volume has an empty dimension");
    TopPlanes p{Grayscale2D(H, W), Grayscale2D(K, W), Grayscale2D(H, K)};
    const int kc = K / 2, hc = H / 2, wc = W / 2;
    for (int h = 0; h < H; ++h)
        for (int w = 0; w < W; ++w) p.xy(h, w) = v(h, w, kc);
    for (int k = 0; k < K; ++k)
        for (int w = 0; w < W; ++w) p.xt(k, w) = v(hc, w, k);
    for (int h = 0; h < H; ++h)
        for (int k = 0; k < K; ++k) p.yt(h, k) = v(h, wc, k);
    return p;
}

VideoVolume time_reverse(const VideoVolume& v) {
    VideoVolume out(v.height(), v.width(), v.depth(), v.fps());
    out.provenance = v.provenance;
    const int K = v.depth();
    for (int k = 0; k < K; ++k)
        for (int h = 0; h < v.height(); ++h)
            for (int w = 0; w < v.width(); ++w) out(h, w, k) = v(h, w, K - 1 - k);
    return out;
}

FeatureVector ldp_top(const VideoVolume& v, TemporalMode mode) {
    auto fv = with_provenance(v, DescriptorKind::LdpTop, mode);
    fv.values.reserve(descriptor_length(DescriptorKind::LdpTop, mode));
    if (mode != TemporalMode::Inverse) append_ldp_planes(fv.values, v);
    if (mode != TemporalMode::Direct) append_ldp_planes(fv.values, time_reverse(v));
    return fv;
}

std::uint8_t lbp_code(const Grayscale2D& a, int h, int w) {
    if (h < 1 || w < 1 || h + 1 >= a.height() || w + 1 >= a.width())
        throw PreconditionError("LBP neighborhood of (" + std::to_string(h) + "," + std::to_string(w) +
                                ") is out of bounds");
    const auto centre = a(h, w);
    unsigned code = 0;
    for (const auto& n : kRing) code = (code << 1) | (a(h + n.dh, w + n.dw) >= centre ? 1u : 0u);
    return static_cast<std::uint8_t>(code);
}

const std::array<std::uint8_t, 256>& uniform_lbp_table() { return kUniformTable; }

std::vector<double> lbp_histogram(const Grayscale2D& a) {
    if (a.height() < 3 || a.width() < 3)
        throw TooSmallError("LBP needs at least 3x3, got " + std::to_string(a.height()) + "x" + std::to_string(a.width()));
    std::array<std::uint32_t, kLbpBins> counts{};
    const int width = a.width();
    std::ptrdiff_t ring[8];
    for (int i = 0; i < 8; ++i) ring[i] = static_cast<std::ptrdiff_t>(kRing[i].dh) * width + kRing[i].dw;
    const auto* px = a.samples().data();
    for (int h = 1; h + 1 < a.height(); ++h) {
        for (int w = 1; w + 1 < width; ++w) {
            const std::size_t i = static_cast<std::size_t>(h) * width + w;
            const auto c = px[i];
            unsigned code = 0;
            for (int k = 0; k < 8; ++k) code = (code << 1) | (px[i + ring[k]] >= c);
            ++counts[kUniformTable[code]];
        }
    }
    std::vector<double> out;
    out.reserve(kLbpBins);
    append_normalized(out, counts.data(), kLbpBins, static_cast<std::size_t>(a.height() - 2) * (width - 2));
    return out;
}

FeatureVector lbp_top(const VideoVolume& v) {
    auto fv = with_provenance(v, DescriptorKind::LbpTop, TemporalMode::Direct);
    const auto planes = central_planes(v);
    fv.values.reserve(kLbpTopLength);
    for (const auto* plane : {&planes.xy, &planes.xt, &planes.yt}) {
        const auto h = lbp_histogram(*plane);
        fv.values.insert(fv.values.end(), h.begin(), h.end());
    }
    return fv;
}

FeatureVector extract_descriptor(const VideoVolume& v, DescriptorKind kind, TemporalMode mode) {
    if (kind == DescriptorKind::LdpTop) return ldp_top(v, mode);
    auto fv = lbp_top(v);
    fv.mode = mode;
    return fv;
}

}  // namespace ldptop
