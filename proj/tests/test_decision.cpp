#include <doctest.h>

#include <filesystem>

#include "fixture.hpp"
#include "ldptop/decision.hpp"
#include "ldptop/errors.hpp"

using namespace ldptop;

namespace {

VideoVerdict verdict(const std::string& id, int label, double score) {
    VideoVerdict v;
    v.video_id = id;
    v.label = label;
    v.score = score;
    v.windows = {{label, score, 0}};
    return v;
}

}  // namespace

TEST_CASE("majority vote against counting over every list up to length 15") {
    for (int len = 1; len <= 15; ++len)
        for (int mask = 0; mask < (1 << len); ++mask) {
            std::vector<int> labels(len);
            int ones = 0;
            for (int i = 0; i < len; ++i) ones += labels[i] = (mask >> i) & 1;
            const int zeros = len - ones;
            REQUIRE(majority_vote(labels) == (ones > zeros ? 1 : 0));
        }
    CHECK(majority_vote(std::vector<int>{0, 1}) == 0);
    CHECK_THROWS_AS(majority_vote(std::vector<int>{}), ParameterError);
    CHECK_THROWS_AS(majority_vote(std::vector<int>{2}), ParameterError);
}

TEST_CASE("reduced mean over windows agreeing with the verdict") {
    const std::vector<WindowPrediction> w{{1, 0.8, 0}, {1, 0.6, 1}, {0, -0.4, 2}};
    const auto rm = reduced_mean(w, 1);
    CHECK(rm.value == doctest::Approx(0.7));
    CHECK_FALSE(rm.fallback);
    CHECK(reduced_mean(w, 0).value == doctest::Approx(-0.4));
    const auto none = reduced_mean(std::vector<WindowPrediction>{{1, 0.2, 0}, {1, 0.4, 1}}, 0);
    CHECK(none.fallback);
    CHECK(none.value == doctest::Approx(0.3));
}

TEST_CASE("aggregate votes then averages") {
    const auto v = aggregate("x", {{1, 0.1, 0}, {0, -0.2, 1}, {0, -0.3, 2}});
    CHECK(v.label == 0);
    CHECK(v.score == doctest::Approx(-0.25));
    CHECK(v.window_count() == 3);
    const auto tie = aggregate("y", {{1, 0.5, 0}, {0, -0.1, 1}});
    CHECK(tie.label == 0);
    CHECK(tie.score == doctest::Approx(-0.1));
}

TEST_CASE("fusion is the logical or of the three verdicts") {
    for (int mask = 0; mask < 8; ++mask) {
        std::map<Technique, VideoVerdict> per;
        int i = 0;
        for (auto t : kManipulations) {
            const int p = (mask >> i) & 1;
            per[t] = verdict("v", p, p ? 0.1 * (i + 1) : -0.1 * (i + 1));
            ++i;
        }
        const auto f = fuse_and_attribute(per);
        CHECK(f.label == (mask != 0 ? 1 : 0));
        CHECK(f.attribution.has_value() == (mask != 0));
        CHECK(f.score_is_fallback == (mask == 0));
    }
}

TEST_CASE("attribution is the largest score") {
    std::map<Technique, VideoVerdict> per{{Technique::Deepfakes, verdict("v", 1, 0.3)},
                                          {Technique::Face2Face, verdict("v", 1, 0.9)},
                                          {Technique::FaceSwap, verdict("v", 0, -0.1)}};
    const auto f = fuse_and_attribute(per);
    CHECK(f.label == 1);
    CHECK(f.attribution == Technique::Face2Face);
    CHECK(f.score == 0.9);

    per[Technique::Deepfakes] = verdict("v", 1, 0.9);
    CHECK(fuse_and_attribute(per).attribution == Technique::Deepfakes);
    per[Technique::Deepfakes] = verdict("v", 0, -1.0);
    per[Technique::FaceSwap] = verdict("v", 1, 0.9);
    CHECK(fuse_and_attribute(per).attribution == Technique::Face2Face);
}

TEST_CASE("fusion of a real verdict keeps the mean score and no attribution") {
    std::map<Technique, VideoVerdict> per{{Technique::Deepfakes, verdict("v", 0, -0.3)},
                                          {Technique::Face2Face, verdict("v", 0, -0.6)},
                                          {Technique::FaceSwap, verdict("v", 0, -0.9)}};
    const auto f = fuse_and_attribute(per);
    CHECK(f.label == 0);
    CHECK_FALSE(f.attribution.has_value());
    CHECK(f.top_technique == Technique::Deepfakes);
    CHECK(f.score == doctest::Approx(-0.6));
    per.erase(Technique::FaceSwap);
    CHECK_THROWS_AS(fuse_and_attribute(per), ParameterError);
}

TEST_CASE("fusing different videos is rejected") {
    std::map<Technique, VideoVerdict> per{{Technique::Deepfakes, verdict("a", 0, -0.3)},
                                          {Technique::Face2Face, verdict("b", 0, -0.6)},
                                          {Technique::FaceSwap, verdict("a", 0, -0.9)}};
    CHECK_THROWS_AS(fuse_and_attribute(per), ParameterError);
}

TEST_CASE("verdict json round trip") {
    auto v = aggregate("clip", {{1, 0.123456789012345, 0}, {1, 1e-300, 1}, {0, -2.5, 2}});
    v.attribution = Technique::FaceSwap;
    v.top_technique = Technique::FaceSwap;
    v.model_refs = {"m.json"};
    const auto dir = fixture::scratch_dir("verdicts");
    write_verdicts(dir / "v.jsonl", {v, verdict("other", 0, -1.0)}, {{"area", "B"}});
    const auto back = read_verdicts(dir / "v.jsonl");
    REQUIRE(back.size() == 2);
    CHECK(back[0].score == v.score);
    CHECK(back[0].windows[1].score == 1e-300);
    CHECK(back[0].attribution == Technique::FaceSwap);
    CHECK(back[0].model_refs == v.model_refs);
    CHECK_FALSE(back[1].attribution.has_value());

    auto j = verdict_to_json(v);
    j["N"] = 7;
    CHECK_THROWS_AS(verdict_from_json(j), FormatError);
    CHECK_THROWS_AS(verdict_from_json(nlohmann::json{{"video_id", "x"}}), FormatError);
}
