#include <doctest.h>

#include <fstream>
#include <sstream>

#include "ldptop/errors.hpp"
#include "ldptop/tracking.hpp"

using namespace ldptop;

namespace {

LandmarkTrack still_track(int frames) {
    LandmarkFrame f{};
    for (int i = 0; i < 68; ++i) f[i] = {50.0 + i, 40.0 + (i % 7)};
    return {std::vector<LandmarkFrame>(frames, f)};
}

}  // namespace

TEST_CASE("motion averages the three tracked landmarks") {
    auto track = still_track(3);
    for (int i : {39, 42, 27}) {
        track.frames[1][i].x += 2;
        track.frames[1][i].y += 3;
        track.frames[2][i] = track.frames[1][i];
    }
    track.frames[2][39].x += 3;
    const auto m = compute_motion(track);
    REQUIRE(m.size() == 2);
    CHECK(m[0].dx == doctest::Approx(2.0));
    CHECK(m[0].dy == doctest::Approx(3.0));
    CHECK(m[1].dx == doctest::Approx(1.0));
    CHECK(m[1].dy == 0.0);
    // Other landmarks do not matter.
    track.frames[2][0].x += 100;
    CHECK(compute_motion(track)[1].dx == doctest::Approx(1.0));
}

TEST_CASE("motion needs two frames and valid indices") {
    CHECK_THROWS_AS(compute_motion(still_track(1)), TooSmallError);
    CHECK_THROWS_AS(compute_motion(still_track(3), {68, 42, 27}), ParameterError);
}

TEST_CASE("savgol 5/2 weights") {
    const auto c = savgol_coefficients(5, 2);
    const double expected[] = {-3, 12, 17, 12, -3};
    for (int i = 0; i < 5; ++i) CHECK(c[i] == doctest::Approx(expected[i] / 35.0).epsilon(1e-13));
    const std::vector<double> impulse{0, 0, 1, 0, 0};
    CHECK(savgol_smooth(impulse, 5, 2)[2] == doctest::Approx(17.0 / 35.0).epsilon(1e-13));
}

TEST_CASE("savgol reproduces quadratics away from the ends") {
    std::vector<double> y;
    for (int t = 0; t < 20; ++t) y.push_back(3.0 * t * t + t);
    const auto s = savgol_smooth(y, 5, 2);
    for (int t = 2; t < 18; ++t) CHECK(std::abs(s[t] - y[t]) <= 1e-9);
    const std::vector<double> flat(9, 4.25);
    for (double v : savgol_smooth(flat, 7, 2)) CHECK(std::abs(v - 4.25) <= 1e-12);
}

TEST_CASE("savgol matches frozen scipy output with mirror edges") {
    std::ifstream in(LDPTOP_TEST_DATA "/savgol_cases.txt");
    REQUIRE(in);
    int cases = 0;
    std::string header, xs, ys;
    while (std::getline(in, header) && std::getline(in, xs) && std::getline(in, ys)) {
        int window = 0, order = 0;
        std::istringstream(header) >> window >> order;
        std::vector<double> x, y;
        std::istringstream sx(xs), sy(ys);
        for (double v; sx >> v;) x.push_back(v);
        for (double v; sy >> v;) y.push_back(v);
        const auto s = savgol_smooth(x, window, order);
        REQUIRE(s.size() == y.size());
        for (std::size_t i = 0; i < y.size(); ++i) CHECK(std::abs(s[i] - y[i]) <= 1e-12);
        ++cases;
    }
    CHECK(cases == 4);
}

TEST_CASE("savgol parameter errors") {
    const std::vector<double> x{1, 2, 3};
    CHECK_THROWS_AS(savgol_smooth(x, 4, 2), ParameterError);
    CHECK_THROWS_AS(savgol_smooth(x, 5, 5), ParameterError);
    CHECK_THROWS_AS(savgol_smooth(std::vector<double>{}, 5, 2), ParameterError);
}

TEST_CASE("savgol keeps length on series shorter than the window") {
    for (std::size_t n : {1u, 2u, 3u, 6u}) {
        const std::vector<double> x(n, 2.0);
        const auto s = savgol_smooth(x, 7, 2);
        REQUIRE(s.size() == n);
        for (double v : s) CHECK(v == doctest::Approx(2.0));
    }
}

TEST_CASE("roi track accumulates before rounding") {
    const MotionSeries m(4, {0.4, 0.0});
    const auto track = build_roi_track({5, 10, 20, 20}, m, {100, 100});
    const int expected[] = {10, 10, 11, 11, 12};
    REQUIRE(track.size() == 5);
    for (int k = 0; k < 5; ++k) {
        CHECK(track.positions[k].left == expected[k]);
        CHECK(track.positions[k].top == 5);
    }
    const auto unit = build_roi_track({5, 10, 20, 20}, MotionSeries(4, {1.0, 0.0}), {100, 100});
    for (int k = 0; k < 5; ++k) CHECK(unit.positions[k].left == 10 + k);
}

TEST_CASE("roi track rounds half away from zero") {
    const auto track = build_roi_track({10, 10, 5, 5}, MotionSeries{{0.5, -0.5}, {-1.0, 0.0}}, {50, 50});
    CHECK(track.positions[1] == RoiPosition{10, 11});
    CHECK(track.positions[1].top == 10);
    CHECK(build_roi_track({10, 10, 5, 5}, MotionSeries{{0.0, -0.5}}, {50, 50}).positions[1].top == 10);
    CHECK(build_roi_track({10, 10, 5, 5}, MotionSeries{{0.0, -0.6}}, {50, 50}).positions[1].top == 9);
    CHECK(build_roi_track({10, 10, 5, 5}, MotionSeries{{0.0, 0.5}}, {50, 50}).positions[1].top == 11);
}

TEST_CASE("zero motion gives the identity track") {
    const Box box{3, 4, 10, 12};
    const auto track = build_roi_track(box, MotionSeries(9), {40, 40});
    for (std::size_t k = 0; k < track.size(); ++k) CHECK(track.box(k) == box);
    CHECK(track.clamped_frames == 0);
}

TEST_CASE("roi track clamps at the frame border and keeps its size") {
    const auto track = build_roi_track({2, 2, 10, 10}, MotionSeries(5, {-1.0, 3.0}), {25, 30});
    CHECK(track.clamped_frames > 0);
    for (std::size_t k = 0; k < track.size(); ++k) {
        const auto b = track.box(k);
        CHECK(b.height == 10);
        CHECK(b.width == 10);
        CHECK(b.left >= 0);
        CHECK(b.top + b.height <= 25);
    }
    CHECK(track.positions.back() == RoiPosition{15, 0});
    CHECK_THROWS_AS(build_roi_track({20, 0, 10, 10}, {}, {25, 30}), ParameterError);
}

TEST_CASE("initial box from the landmark cloud") {
    LandmarkFrame f{};
    for (int i = 0; i < 68; ++i) f[i] = {50.0 + (i % 2) * 100.0, 100.0 + (i % 3 == 0) * 100.0};
    CHECK(derive_initial_box(f, 0.0, {480, 640}) == Box{100, 50, 101, 101});
    CHECK(derive_initial_box(f, 0.1, {480, 640}) == Box{90, 40, 121, 121});
    CHECK(derive_initial_box(f, 0.1, {150, 640}) == Box{90, 40, 60, 121});
    LandmarkFrame same{};
    same.fill({5.0, 5.0});
    CHECK_THROWS_AS(derive_initial_box(same, 0.1, {100, 100}), ParameterError);
}

TEST_CASE("smooth motion filters each component") {
    MotionSeries m;
    for (int k = 0; k < 12; ++k) m.push_back({k % 2 ? 1.0 : 0.0, 2.0});
    const auto s = smooth_motion(m, {5, 2});
    REQUIRE(s.size() == m.size());
    for (const auto& d : s) CHECK(d.dy == doctest::Approx(2.0));
    CHECK(std::abs(s[6].dx - 0.5) < 0.2);
}
