#include "fixture.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace fs = std::filesystem;
using ldptop::Technique;

namespace fixture {

namespace {

/// 68-point layout in face-box units (x, y in [0, 1]).
std::array<ldptop::Point2, 68> template_points() {
    std::array<ldptop::Point2, 68> p{};
    for (int i = 0; i <= 16; ++i) {
        const double t = std::numbers::pi * i / 16.0;
        p[i] = {0.5 - 0.48 * std::cos(t), 0.3 + 0.68 * std::sin(t)};
    }
    for (int i = 17; i <= 26; ++i) p[i] = {0.15 + 0.7 * (i - 17) / 9.0, 0.2};
    for (int i = 27; i <= 30; ++i) p[i] = {0.5, 0.35 + 0.08 * (i - 27)};
    for (int i = 31; i <= 35; ++i) p[i] = {0.4 + 0.05 * (i - 31), 0.62};
    for (int i = 36; i <= 41; ++i) p[i] = {0.22 + 0.04 * (i - 36), 0.35};
    for (int i = 42; i <= 47; ++i) p[i] = {0.58 + 0.04 * (i - 42), 0.35};
    p[39] = {0.42, 0.35};
    for (int i = 48; i <= 67; ++i) {
        const double t = 2.0 * std::numbers::pi * (i - 48) / 20.0;
        p[i] = {0.5 + 0.18 * std::cos(t), 0.76 + 0.07 * std::sin(t)};
    }
    return p;
}

struct Band {
    double begin = 0.0, end = 0.0;
    int amplitude = 0;
};

Band artifact_band(Technique t) {
    switch (t) {
        case Technique::Deepfakes: return {0.6, 0.9, 14};
        case Technique::Face2Face: return {0.15, 0.45, 14};
        case Technique::FaceSwap: return {0.0, 1.0, 8};
        case Technique::Original: break;
    }
    return {};
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng() >> 11) / 9007199254740992.0;
}

}  // namespace

Video render(const Spec& spec, Technique technique, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const double two_pi = 2.0 * std::numbers::pi;
    const double ax = uniform(rng, 1.0, 3.5), ay = uniform(rng, 0.5, 2.5);
    const double tx = uniform(rng, 60.0, 140.0), ty = uniform(rng, 70.0, 160.0);
    const double px = uniform(rng, 0.0, two_pi), py = uniform(rng, 0.0, two_pi);
    const double f1 = uniform(rng, 9.0, 20.0), f2 = uniform(rng, 9.0, 20.0), f3 = uniform(rng, 7.0, 14.0);
    const double p1 = uniform(rng, 0.0, two_pi), p2 = uniform(rng, 0.0, two_pi), p3 = uniform(rng, 0.0, two_pi);
    const double drift = uniform(rng, 2.0, 8.0);
    const auto band = artifact_band(technique);
    const auto layout = template_points();
    const auto& box = spec.face;

    Video video;
    video.frames.fps = spec.fps;
    for (int k = 0; k < spec.frames; ++k) {
        const double dx = ax * std::sin(two_pi * k / tx + px);
        const double dy = ay * std::sin(two_pi * k / ty + py);
        const double bright = drift * std::sin(two_pi * k / (2.0 * spec.frames));
        ldptop::Grayscale2D frame(spec.frame_height, spec.frame_width);
        for (int y = 0; y < spec.frame_height; ++y)
            for (int x = 0; x < spec.frame_width; ++x) {
                const double u = x - (box.left + dx), v = y - (box.top + dy);
                double value = 60.0 + 0.3 * x;
                if (u >= 0 && v >= 0 && u < box.width && v < box.height) {
                    value = 128.0 + bright + 35.0 * std::sin(two_pi * u / f1 + p1) * std::cos(two_pi * v / f2 + p2) +
                            20.0 * std::sin(two_pi * (u + v) / f3 + p3);
                    const double rel = v / box.height;
                    if (band.amplitude > 0 && rel >= band.begin && rel < band.end)
                        value += static_cast<double>(static_cast<int>(rng() % (2 * band.amplitude + 1)) - band.amplitude);
                }
                frame(y, x) = static_cast<std::uint8_t>(std::clamp(std::lround(value), 0L, 255L));
            }
        video.frames.frames.push_back(std::move(frame));

        ldptop::LandmarkFrame points{};
        for (int i = 0; i < 68; ++i)
            points[i] = {box.left + dx + layout[i].x * box.width + uniform(rng, -0.3, 0.3),
                         box.top + dy + layout[i].y * box.height + uniform(rng, -0.3, 0.3)};
        video.landmarks.frames.push_back(points);
    }
    return video;
}

fs::path generate(const Spec& spec, const fs::path& root) {
    fs::create_directories(root);
    ldptop::DatasetManifest manifest;
    manifest.base_dir = root;
    std::vector<Technique> classes{Technique::Original};
    classes.insert(classes.end(), spec.techniques.begin(), spec.techniques.end());
    std::uint64_t counter = 0;
    for (bool train : {true, false}) {
        const int count = train ? spec.train_per_class : spec.test_per_class;
        for (auto t : classes)
            for (int i = 0; i < count; ++i) {
                ldptop::VideoRecord rec;
                rec.id = std::string(ldptop::to_string(t)) + (train ? "_train_" : "_test_") + std::to_string(i);
                rec.frames_path = "videos/" + rec.id + "/frames";
                rec.landmarks_path = "videos/" + rec.id + "/landmarks.jsonl";
                rec.label = t == Technique::Original ? 0 : 1;
                rec.technique = t;
                rec.train = train;
                const auto video = render(spec, t, spec.seed * 1000003 + counter);
                if (!spec.derive_some_boxes || counter % 2 == 0) {
                    // Face box at frame 0, which the renderer shifts by the head motion.
                    const auto& lm = video.landmarks.frames.front();
                    const double x27 = lm[27].x - 0.5 * spec.face.width, y27 = lm[27].y - 0.35 * spec.face.height;
                    rec.initial_box = ldptop::Box{static_cast<int>(std::lround(y27)), static_cast<int>(std::lround(x27)),
                                                  spec.face.height, spec.face.width};
                }
                ldptop::save_frame_directory(video.frames, root / rec.frames_path);
                ldptop::save_landmarks(video.landmarks, root / rec.landmarks_path);
                manifest.records.push_back(std::move(rec));
                ++counter;
            }
    }
    const auto path = root / "manifest.csv";
    ldptop::save_manifest(manifest, path);
    return path;
}

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("ldptop_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace fixture
