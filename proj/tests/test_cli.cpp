#include <doctest.h>

#include <fstream>
#include <sstream>

#include "fixture.hpp"
#include "ldptop/cli.hpp"
#include "ldptop/decision.hpp"
#include "ldptop/learn.hpp"

using namespace ldptop;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string out, err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    Run r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

nlohmann::json read_json(const fs::path& p) {
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
    CHECK(cli({}).code == kExitUsage);
    CHECK(cli({"frobnicate"}).code == kExitUsage);
    CHECK(cli({"extract", "--out", "x"}).code == kExitUsage);
    CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("extract, train, classify and evaluate from the command line") {
    const auto root = fixture::scratch_dir("cli");
    fixture::Spec spec;
    spec.train_per_class = 3;
    spec.test_per_class = 2;
    spec.techniques = {Technique::Deepfakes, Technique::Face2Face, Technique::FaceSwap};
    const auto manifest = fixture::generate(spec, root / "data").string();
    const auto feats = (root / "feats").string();
    std::ofstream(root / "cfg.json") << R"({"area": "B", "mode": "bidirectional"})";

    auto r = cli({"extract", "--manifest", manifest, "--out", feats, "--config", (root / "cfg.json").string(), "--set",
                  "window.s_seconds=0.5", "--workers", "2"});
    CHECK(r.code == kExitOk);
    CHECK(r.err.empty());

    std::vector<std::string> models;
    for (const char* t : {"DF", "F2F", "FSW"}) {
        const auto model = (root / (std::string(t) + ".json")).string();
        r = cli({"train", "--manifest", manifest, "--features", feats, "--technique", t, "--out", model});
        REQUIRE(r.code == kExitOk);
        models.push_back(model);
    }
    const auto m = load_model(models[0]);
    CHECK(m.metadata.area == Area::Bottom);
    CHECK(m.metadata.mode == TemporalMode::Bidirectional);
    CHECK(m.metadata.config["window"]["s_seconds"] == 0.5);
    CHECK(m.dim() == 6144);

    r = cli({"train", "--manifest", manifest, "--features", feats, "--technique", "DF", "--out",
             (root / "x.json").string(), "--set", "area=T"});
    CHECK(r.code == kExitUsage);
    r = cli({"train", "--manifest", manifest, "--features", feats, "--technique", "OR", "--out",
             (root / "x.json").string()});
    CHECK(r.code == kExitUsage);

    const auto single = (root / "df.jsonl").string();
    r = cli({"classify", "--manifest", manifest, "--features", feats, "--model", models[0], "--out", single});
    REQUIRE(r.code == kExitOk);
    for (const auto& v : read_verdicts(single)) CHECK_FALSE(v.attribution.has_value());

    const auto fused = (root / "fused.jsonl").string();
    r = cli({"classify", "--manifest", manifest, "--features", feats, "--model", models[0], "--model", models[1],
             "--model", models[2], "--out", fused});
    REQUIRE(r.code == kExitOk);
    const auto verdicts = read_verdicts(fused);
    CHECK(verdicts.size() == 8);
    for (const auto& v : verdicts) CHECK(v.attribution.has_value() == (v.label == 1));

    r = cli({"evaluate", "--verdicts", fused, "--manifest", manifest, "--out", (root / "report").string()});
    REQUIRE(r.code == kExitOk);
    const auto report = read_json(root / "report" / "report.json");
    CHECK(report["videos"] == 8);
    CHECK(report["config"]["area"] == "B");
    CHECK(report.contains("attribution_confusion"));
    CHECK(fs::exists(root / "report" / "report.csv"));

    // A verdict file naming a video the manifest lacks.
    std::ofstream(root / "stray.jsonl") << R"({"video_id":"ghost","p_hat":1,"s_hat":0.5,"N":1,"per_window":[{"p":1,"s":0.5}]})"
                                        << '\n';
    r = cli({"evaluate", "--verdicts", (root / "stray.jsonl").string(), "--manifest", manifest, "--out",
             (root / "r2").string()});
    CHECK(r.code == kExitUsage);
}

TEST_CASE("partial extraction failure exits with 1") {
    const auto root = fixture::scratch_dir("cli_partial");
    fixture::Spec spec;
    spec.train_per_class = 1;
    spec.test_per_class = 0;
    const auto manifest = fixture::generate(spec, root / "data");
    fs::remove(root / "data" / "videos" / "OR_train_0" / "frames" / "meta.json");
    const auto r = cli({"extract", "--manifest", manifest.string(), "--out", (root / "f").string()});
    CHECK(r.code == kExitPartial);
    CHECK(r.err.find("OR_train_0") != std::string::npos);
    CHECK(fs::exists(root / "f" / "DF_train_0.feat"));
}

TEST_CASE("bad config exits with 2") {
    const auto root = fixture::scratch_dir("cli_badcfg");
    fixture::Spec spec;
    spec.train_per_class = 1;
    spec.test_per_class = 0;
    const auto manifest = fixture::generate(spec, root / "data").string();
    CHECK(cli({"extract", "--manifest", manifest, "--out", (root / "f").string(), "--set", "colour=red"}).code ==
          kExitUsage);
    std::ofstream(root / "c.json") << R"({"svm": {"C": 0}})";
    CHECK(cli({"extract", "--manifest", manifest, "--out", (root / "f").string(), "--config",
               (root / "c.json").string()})
              .code == kExitUsage);
}

TEST_CASE("ablate and grid reports") {
    const auto root = fixture::scratch_dir("cli_ablate");
    fixture::Spec spec;
    spec.train_per_class = 3;
    spec.test_per_class = 2;
    const auto manifest = fixture::generate(spec, root / "data").string();
    auto r = cli({"ablate", "--manifest", manifest, "--out", (root / "ab").string(), "--variant", "B:bidirectional",
                  "--variant", "T:direct"});
    REQUIRE(r.code == kExitOk);
    const auto ab = read_json(root / "ab" / "ablation.json");
    CHECK(ab["rows"].size() == 2);
    CHECK(fs::exists(root / "ab" / "ablation.svg"));
    r = cli({"grid", "--manifest", manifest, "--out", (root / "grid").string(), "--variant", "F:inverse"});
    REQUIRE(r.code == kExitOk);
    const auto grid = read_json(root / "grid" / "grid.json");
    CHECK(grid["rows"][0]["techniques"][0]["technique"] == "DF");
    CHECK(cli({"grid", "--manifest", manifest, "--out", (root / "g2").string(), "--variant", "Q"}).code == kExitUsage);
}
