#include "ldptop/decision.hpp"

#include <cmath>
#include <limits>
#include <fstream>

#include "ldptop/errors.hpp"

using json = nlohmann::json;

namespace ldptop {

int majority_vote(std::span<const int> labels) {
    if (labels.empty()) throw ParameterError("majority vote over an empty list");
    std::size_t ones = 0;
    for (int l : labels) {
        if (l != 0 && l != 1) throw ParameterError("labels must be 0 or 1");
        ones += static_cast<std::size_t>(l);
    }
    return 2 * ones > labels.size() ? 1 : 0;
}

ReducedMean reduced_mean(std::span<const WindowPrediction> windows, int video_label) {
    if (windows.empty()) throw ParameterError("reduced mean over an empty list");
    double sum = 0.0, all = 0.0;
    std::size_t count = 0;
    for (const auto& w : windows) {
        all += w.score;
        if (w.label == video_label) {
            sum += w.score;
            ++count;
        }
    }
    if (count == 0) return {all / static_cast<double>(windows.size()), true};
    return {sum / static_cast<double>(count), false};
}

VideoVerdict aggregate(std::string video_id, std::vector<WindowPrediction> windows) {
    std::vector<int> labels;
    labels.reserve(windows.size());
    for (const auto& w : windows) {
        if (!std::isfinite(w.score)) throw ParameterError("non-finite window score in " + video_id);
        labels.push_back(w.label);
    }
    VideoVerdict v;
    v.video_id = std::move(video_id);
    v.label = majority_vote(labels);
    const auto rm = reduced_mean(windows, v.label);
    v.score = rm.value;
    v.score_is_fallback = rm.fallback;
    v.windows = std::move(windows);
    return v;
}

VideoVerdict classify_video(const LinearSvmModel& model, std::span<const FeatureVector> features) {
    if (features.empty()) throw ParameterError("no feature vectors to classify");
    std::vector<WindowPrediction> windows;
    windows.reserve(features.size());
    for (const auto& fv : features) {
        const auto p = predict(model, fv.values);
        windows.push_back({p.label, p.score, fv.window_index});
    }
    return aggregate(features.front().video_id, std::move(windows));
}

VideoVerdict fuse_and_attribute(const std::map<Technique, VideoVerdict>& verdicts) {
    for (auto t : kManipulations)
        if (!verdicts.contains(t))
            throw ParameterError("fusion needs a verdict for " + std::string(to_string(t)));
    VideoVerdict fused;
    fused.video_id = verdicts.at(Technique::Deepfakes).video_id;
    double best = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    Technique arg = Technique::Deepfakes;
    for (auto t : kManipulations) {
        const auto& v = verdicts.at(t);
        if (v.video_id != fused.video_id)
            throw ParameterError("fusing verdicts of different videos: " + fused.video_id + " vs " + v.video_id);
        fused.label |= v.label;
        sum += v.score;
        if (v.score > best) {  // strict: earlier techniques win ties
            best = v.score;
            arg = t;
        }
        fused.model_refs.insert(fused.model_refs.end(), v.model_refs.begin(), v.model_refs.end());
    }
    fused.top_technique = arg;
    if (fused.label == 1) {
        fused.attribution = arg;
        fused.score = best;
        fused.windows = verdicts.at(arg).windows;
    } else {
        fused.score = sum / 3.0;
        fused.score_is_fallback = true;
        fused.windows = verdicts.at(Technique::Deepfakes).windows;
    }
    return fused;
}

json verdict_to_json(const VideoVerdict& v) {
    json windows = json::array();
    for (const auto& w : v.windows) windows.push_back({{"p", w.label}, {"s", w.score}, {"window", w.window_index}});
    json j = {{"video_id", v.video_id}, {"p_hat", v.label},       {"s_hat", v.score},
              {"N", v.windows.size()},  {"per_window", windows}, {"model_refs", v.model_refs}};
    if (v.attribution) j["attribution"] = to_string(*v.attribution);
    if (v.top_technique) j["top_technique"] = to_string(*v.top_technique);
    if (v.score_is_fallback) j["s_hat_fallback"] = true;
    return j;
}

VideoVerdict verdict_from_json(const json& j) {
    VideoVerdict v;
    try {
        v.video_id = j.at("video_id").get<std::string>();
        v.label = j.at("p_hat").get<int>();
        v.score = j.at("s_hat").get<double>();
        for (const auto& w : j.at("per_window"))
            v.windows.push_back({w.at("p").get<int>(), w.at("s").get<double>(), w.value("window", 0)});
        if (j.contains("attribution")) v.attribution = parse_technique(j["attribution"].get<std::string>());
        if (j.contains("top_technique")) v.top_technique = parse_technique(j["top_technique"].get<std::string>());
        v.score_is_fallback = j.value("s_hat_fallback", false);
        if (j.contains("model_refs")) v.model_refs = j["model_refs"].get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad verdict record: ") + e.what());
    }
    if (j.contains("N") && j["N"].get<std::size_t>() != v.windows.size())
        throw FormatError("verdict " + v.video_id + ": N disagrees with per_window");
    return v;
}

void write_verdicts(const std::filesystem::path& path, const std::vector<VideoVerdict>& verdicts, const json& config) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write verdicts " + path.string());
    for (const auto& v : verdicts) {
        auto j = verdict_to_json(v);
        j["config"] = config;
        out << j.dump() << '\n';
    }
}

std::vector<VideoVerdict> read_verdicts(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open verdicts " + path.string());
    std::vector<VideoVerdict> out;
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        if (line.empty()) continue;
        try {
            out.push_back(verdict_from_json(json::parse(line)));
        } catch (const json::parse_error& e) {
            throw FormatError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace ldptop
