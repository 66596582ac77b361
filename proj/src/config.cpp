#include "ldptop/config.hpp"

#include <fstream>

#include "ldptop/errors.hpp"

using json = nlohmann::json;

namespace ldptop {

json to_json(const RunConfig& c) {
    return {{"area", to_string(c.area)},
            {"mode", to_string(c.mode)},
            {"descriptor", to_string(c.descriptor)},
            {"window", {{"d_seconds", c.windowing.d_seconds}, {"s_seconds", c.windowing.s_seconds}, {"sliding", c.windowing.sliding}}},
            {"smoother", {{"window", c.smoother.window}, {"order", c.smoother.order}}},
            {"landmarks", {{"r", c.landmarks.right_eye}, {"l", c.landmarks.left_eye}, {"n", c.landmarks.nose_top}}},
            {"margin_factor", c.margin_factor},
            {"svm", {{"C", c.svm.C}, {"tol", c.svm.tol}, {"max_iter", c.svm.max_epochs}}},
            {"seed", c.seed}};
}

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ParameterError("unknown config key '" + where + key + "'");
    }
}

template <typename T>
void take(const json& j, const char* key, T& dst) {
    if (j.contains(key)) dst = j[key].get<T>();
}

const json& section(const json& j, const char* key) {
    if (!j[key].is_object()) throw ParameterError(std::string("config section '") + key + "' must be an object");
    return j[key];
}

}  // namespace

RunConfig merge_config(const RunConfig& base, const json& j) {
    if (!j.is_object()) throw ParameterError("config must be a JSON object");
    RunConfig c = base;
    reject_unknown(j, {"area", "mode", "descriptor", "window", "smoother", "landmarks", "margin_factor", "svm", "seed"}, "");
    try {
        if (j.contains("area")) c.area = parse_area(j["area"].get<std::string>());
        if (j.contains("mode")) c.mode = parse_mode(j["mode"].get<std::string>());
        if (j.contains("descriptor")) c.descriptor = parse_descriptor(j["descriptor"].get<std::string>());
        if (j.contains("window")) {
            const auto& w = section(j, "window");
            reject_unknown(w, {"d_seconds", "s_seconds", "sliding"}, "window.");
            take(w, "d_seconds", c.windowing.d_seconds);
            take(w, "s_seconds", c.windowing.s_seconds);
            take(w, "sliding", c.windowing.sliding);
        }
        if (j.contains("smoother")) {
            const auto& s = section(j, "smoother");
            reject_unknown(s, {"window", "order"}, "smoother.");
            take(s, "window", c.smoother.window);
            take(s, "order", c.smoother.order);
        }
        if (j.contains("landmarks")) {
            const auto& l = section(j, "landmarks");
            reject_unknown(l, {"r", "l", "n"}, "landmarks.");
            take(l, "r", c.landmarks.right_eye);
            take(l, "l", c.landmarks.left_eye);
            take(l, "n", c.landmarks.nose_top);
        }
        take(j, "margin_factor", c.margin_factor);
        if (j.contains("svm")) {
            const auto& s = section(j, "svm");
            reject_unknown(s, {"C", "tol", "max_iter"}, "svm.");
            take(s, "C", c.svm.C);
            take(s, "tol", c.svm.tol);
            take(s, "max_iter", c.svm.max_epochs);
        }
        take(j, "seed", c.seed);
    } catch (const json::exception& e) {
        throw ParameterError(std::string("bad config value: ") + e.what());
    } catch (const FormatError& e) {
        throw ParameterError(e.what());
    }
    if (!(c.windowing.d_seconds > 0.0) || !(c.windowing.s_seconds > 0.0))
        throw ParameterError("window.d_seconds and window.s_seconds must be positive");
    if (c.smoother.window < 3 || c.smoother.window % 2 == 0 || c.smoother.order < 0 || c.smoother.order >= c.smoother.window)
        throw ParameterError("smoother.window must be odd >= 3 and smoother.order < window");
    if (!(c.svm.C > 0.0) || !(c.svm.tol > 0.0)) throw ParameterError("svm.C and svm.tol must be positive");
    if (c.margin_factor < 0.0) throw ParameterError("margin_factor must be non-negative");
    for (int idx : {c.landmarks.right_eye, c.landmarks.left_eye, c.landmarks.nose_top})
        if (idx < 0 || idx >= 68) throw ParameterError("landmark indices must lie in [0, 68)");
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ParameterError("cannot parse config " + path.string() + ": " + e.what());
    }
    return merge_config(RunConfig{}, j);
}

RunConfig apply_override(const RunConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ParameterError("override must be key=value: '" + assignment + "'");
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::exception&) {
        value = raw;  // bare strings such as area=B
    }
    json patch = value;
    std::string rest = key;
    std::vector<std::string> parts;
    for (std::size_t pos; (pos = rest.find('.')) != std::string::npos; rest = rest.substr(pos + 1))
        parts.push_back(rest.substr(0, pos));
    parts.push_back(rest);
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = json{{*it, patch}};
    return merge_config(cfg, patch);
}

}  // namespace ldptop
