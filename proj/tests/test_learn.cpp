#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "fixture.hpp"
#include "ldptop/errors.hpp"
#include "ldptop/learn.hpp"

using namespace ldptop;

namespace {

LabeledSet toy_line() {
    LabeledSet s;
    for (int i = 0; i < 20; ++i) {
        s.add({-1.0, 0.0}, 0);
        s.add({1.0, 0.0}, 1);
    }
    return s;
}

struct QpCase {
    LabeledSet set;
    double dual = 0.0;
    double primal = 0.0;
};

QpCase load_qp() {
    QpCase q;
    std::ifstream csv(LDPTOP_TEST_DATA "/qp_50x10.csv");
    std::string line;
    std::getline(csv, line);
    while (std::getline(csv, line)) {
        std::istringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        const int label = std::stoi(cell);
        std::vector<double> x;
        while (std::getline(ss, cell, ',')) x.push_back(std::stod(cell));
        q.set.add(x, label);
    }
    std::ifstream obj(LDPTOP_TEST_DATA "/qp_50x10_objective.txt");
    for (std::string key; obj >> key;) {
        double v = 0.0;
        obj >> v;
        if (key == "dual") q.dual = v;
        if (key == "primal") q.primal = v;
    }
    return q;
}

double train_accuracy(const LinearSvmModel& m, const LabeledSet& s) {
    std::size_t ok = 0;
    for (std::size_t i = 0; i < s.size(); ++i) ok += predict(m, s.features[i]).label == s.labels[i];
    return static_cast<double>(ok) / static_cast<double>(s.size());
}

}  // namespace

TEST_CASE("scaler statistics") {
    LabeledSet s;
    s.add({0.0, 2.0}, 0);
    s.add({2.0, 2.0}, 1);
    const auto sc = fit_scaler(s);
    CHECK(sc.mean == std::vector<double>{1.0, 2.0});
    CHECK(sc.stddev == std::vector<double>{1.0, 0.0});
    CHECK(sc.constant_features() == 1);
    CHECK(apply_scaler(sc, std::vector<double>{1.0, 2.0}) == std::vector<double>{0.0, 0.0});
    CHECK(apply_scaler(sc, std::vector<double>{3.0, 99.0}) == std::vector<double>{2.0, 0.0});
    const Scaler unit{{1.0, 2.0}, {1.0, 1.0}};
    CHECK(apply_scaler(unit, std::vector<double>{3.0, 2.0}) == std::vector<double>{2.0, 0.0});
    CHECK_THROWS_AS(apply_scaler(unit, std::vector<double>{1.0}), DimensionMismatchError);
}

TEST_CASE("toy problem separates along x") {
    const auto set = toy_line();
    const auto sol = solve_svm(set);
    CHECK(sol.converged);
    CHECK(sol.weights[0] > 0.0);
    CHECK(std::abs(sol.weights[1]) < 1e-12);
    CHECK(std::abs(sol.bias) < 1e-6);
    const auto model = train_svm(set, {}, {});
    CHECK(train_accuracy(model, set) == 1.0);
    CHECK(predict(model, std::vector<double>{1.0, 0.0}).score > 0.0);
    const auto on_plane = predict(model, std::vector<double>{0.0, 0.0});
    CHECK(std::abs(on_plane.score) < 1e-6);
    for (double scale : {0.1, 2.0, 50.0}) CHECK(predict(model, std::vector<double>{scale, 0.0}).label == 1);
}

TEST_CASE("score zero is labelled real") {
    LinearSvmModel m;
    m.weights = {1.0};
    m.scaler = {{0.0}, {1.0}};
    CHECK(predict(m, std::vector<double>{0.0}).label == 0);
    CHECK(predict(m, std::vector<double>{1e-9}).label == 1);
}

TEST_CASE("objective matches the QP oracle") {
    const auto q = load_qp();
    REQUIRE(q.set.size() == 50);
    const auto coarse = solve_svm(q.set);
    CHECK(coarse.converged);
    CHECK(std::abs(coarse.dual_objective - q.dual) / q.dual < 1e-4);
    const auto fine = solve_svm(q.set, {1.0, 1e-6});
    CHECK(std::abs(fine.dual_objective - q.dual) / q.dual < 1e-8);
    CHECK(std::abs(fine.primal_objective - q.primal) / q.primal < 1e-5);
}

TEST_CASE("dual objective never decreases and the gap closes") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g(0.0, 1.0);
    LabeledSet s;
    for (int i = 0; i < 120; ++i) {
        std::vector<double> x(8);
        for (auto& v : x) v = g(rng);
        const int label = i % 2;
        x[0] += label ? 0.8 : -0.8;
        s.add(x, label);
    }
    const auto sol = solve_svm(s, {1.0, 1e-4});
    REQUIRE(sol.dual_trace.size() >= 2);
    for (std::size_t i = 1; i < sol.dual_trace.size(); ++i) CHECK(sol.dual_trace[i] >= sol.dual_trace[i - 1] - 1e-9);
    CHECK(sol.primal_objective >= sol.dual_objective - 1e-9);
    CHECK((sol.primal_objective - sol.dual_objective) / sol.primal_objective < 1e-2);
    CHECK(sol.primal_objective == doctest::Approx(primal_objective(sol.weights, sol.bias, s, 1.0)));
}

TEST_CASE("solver input errors") {
    LabeledSet one;
    one.add({1.0}, 1);
    one.add({2.0}, 1);
    CHECK_THROWS_AS(solve_svm(one), ParameterError);
    auto bad = toy_line();
    bad.features[3][0] = std::nan("");
    CHECK_THROWS_AS(solve_svm(bad), ParameterError);
    CHECK_THROWS_AS(solve_svm(toy_line(), {0.0}), ParameterError);
    CHECK_THROWS_AS(solve_svm(toy_line(), {1.0, -1.0}), ParameterError);
}

TEST_CASE("iteration cap is reported") {
    const auto q = load_qp();
    SvmParams p;
    p.max_epochs = 1;
    p.tol = 1e-12;
    const auto sol = solve_svm(q.set, p);
    CHECK_FALSE(sol.converged);
}

TEST_CASE("training is deterministic") {
    const auto q = load_qp();
    const auto a = train_svm(q.set, {}, {});
    const auto b = train_svm(q.set, {}, {});
    CHECK(a.weights == b.weights);
    CHECK(a.bias == b.bias);
}

TEST_CASE("model file round trip is exact") {
    const auto q = load_qp();
    ModelMetadata md;
    md.technique = Technique::Face2Face;
    md.area = Area::Bottom;
    md.mode = TemporalMode::Bidirectional;
    md.config = {{"area", "B"}};
    const auto model = train_svm(q.set, {}, md);
    const auto dir = fixture::scratch_dir("model");
    save_model(model, dir / "m.json");
    const auto back = load_model(dir / "m.json");
    CHECK(back.weights == model.weights);
    CHECK(back.bias == model.bias);
    CHECK(back.scaler == model.scaler);
    CHECK(back.metadata.technique == Technique::Face2Face);
    CHECK(back.metadata.area == Area::Bottom);
    CHECK(back.metadata.mode == TemporalMode::Bidirectional);
    CHECK(back.metadata.config == md.config);
    for (std::size_t i = 0; i < q.set.size(); ++i)
        CHECK(predict(back, q.set.features[i]).score == predict(model, q.set.features[i]).score);

    auto j = model_to_json(model);
    j.erase("scaler_mean");
    CHECK_THROWS_AS(model_from_json(j), FormatError);
    j = model_to_json(model);
    j["schema_version"] = 99;
    CHECK_THROWS_AS(model_from_json(j), FormatError);
}

TEST_CASE("hex float encoding is lossless") {
    for (double v : {0.0, -0.0, 1.0 / 3.0, 1e-308, -123456.789, 5e-324}) {
        const double back = decode_double(encode_double(v));
        CHECK(std::signbit(back) == std::signbit(v));
        CHECK(back == v);
    }
    CHECK_THROWS_AS(decode_double("zz"), FormatError);
}
