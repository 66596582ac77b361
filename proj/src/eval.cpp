#include "ldptop/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "ldptop/errors.hpp"

using json = nlohmann::json;

namespace ldptop {

namespace {

void check_aligned(std::size_t a, std::size_t b) {
    if (a != b) throw DimensionMismatchError("prediction/truth length mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
    if (a == 0) throw ParameterError("metrics need at least one sample");
}

}  // namespace

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
    check_aligned(predicted.size(), truth.size());
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) correct += predicted[i] == truth[i];
    return static_cast<double>(correct) / static_cast<double>(truth.size());
}

double auc(std::span<const double> scores, std::span<const int> labels) {
    check_aligned(scores.size(), labels.size());
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Average 1-based ranks over tied groups.
    double pos_rank_sum = 0.0;
    std::size_t positives = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k)
            if (labels[order[k]] == 1) {
                pos_rank_sum += rank;
                ++positives;
            }
        i = j;
    }
    const std::size_t negatives = n - positives;
    if (positives == 0 || negatives == 0) throw ParameterError("AUC needs both classes");
    const double p = static_cast<double>(positives);
    return (pos_rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(negatives));
}

Rates rates(std::span<const int> predicted, std::span<const int> truth) {
    check_aligned(predicted.size(), truth.size());
    std::size_t fp = 0, tn = 0, fn = 0, tp = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == 0) (predicted[i] == 1 ? fp : tn)++;
        else (predicted[i] == 0 ? fn : tp)++;
    }
    Rates r;
    if (fp + tn > 0) r.fpr = static_cast<double>(fp) / static_cast<double>(fp + tn);
    if (fn + tp > 0) r.fnr = static_cast<double>(fn) / static_cast<double>(fn + tp);
    return r;
}

std::size_t ConfusionMatrix::row_total(std::size_t row) const {
    return std::accumulate(counts[row].begin(), counts[row].end(), std::size_t{0});
}

std::optional<double> ConfusionMatrix::percent(std::size_t row, std::size_t col) const {
    const auto total = row_total(row);
    if (total == 0) return std::nullopt;
    return 100.0 * static_cast<double>(counts[row][col]) / static_cast<double>(total);
}

json ConfusionMatrix::to_json() const {
    json rows = json::array();
    for (std::size_t r = 0; r < 3; ++r) {
        json pct = json::array();
        for (std::size_t c = 0; c < 3; ++c) {
            const auto p = percent(r, c);
            pct.push_back(p ? json(*p) : json(nullptr));
        }
        rows.push_back({{"true", to_string(kManipulations[r])},
                        {"count", row_total(r)},
                        {"counts", counts[r]},
                        {"percent", pct}});
    }
    return {{"columns", {"DF", "F2F", "FSW"}}, {"rows", rows}};
}

std::size_t technique_index(Technique t) {
    switch (t) {
        case Technique::Deepfakes: return 0;
        case Technique::Face2Face: return 1;
        case Technique::FaceSwap: return 2;
        case Technique::Original: break;
    }
    throw ParameterError("OR has no attribution index");
}

ConfusionMatrix attribution_confusion(std::span<const VideoVerdict> verdicts, std::span<const Technique> truth,
                                      bool conditioned) {
    if (verdicts.size() != truth.size()) throw DimensionMismatchError("verdict/truth length mismatch");
    ConfusionMatrix m;
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        if (truth[i] == Technique::Original) continue;
        const auto& v = verdicts[i];
        std::optional<Technique> col;
        if (v.label == 1) col = v.attribution;
        else if (!conditioned) col = v.top_technique;
        if (!col) continue;
        ++m.counts[technique_index(truth[i])][technique_index(*col)];
    }
    return m;
}

json EvalReport::to_json() const {
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json per = json::object();
    for (const auto& [t, acc] : per_technique_accuracy) per[std::string(to_string(t))] = acc;
    json j = {{"videos", videos},
              {"accuracy", accuracy},
              {"auc", opt(auc)},
              {"fpr", opt(rates.fpr)},
              {"fnr", opt(rates.fnr)},
              {"counts", {{"tp", tp}, {"tn", tn}, {"fp", fp}, {"fn", fn}}},
              {"per_technique_accuracy", per},
              {"config", config}};
    if (confusion) j["attribution_confusion"] = confusion->to_json();
    if (window_auc) j["window_auc"] = *window_auc;
    return j;
}

EvalReport evaluate(std::span<const VideoVerdict> verdicts, const DatasetManifest& manifest, const EvalOptions& opts) {
    if (verdicts.empty()) throw ParameterError("no verdicts to evaluate");
    std::vector<int> predicted, truth;
    std::vector<double> scores;
    std::vector<Technique> techniques;
    bool any_attribution = false;
    for (const auto& v : verdicts) {
        const auto* rec = manifest.find(v.video_id);
        if (!rec) throw ValidationError("verdict for unknown video id '" + v.video_id + "' (not in manifest)");
        predicted.push_back(v.label);
        truth.push_back(rec->label);
        scores.push_back(v.score);
        techniques.push_back(rec->technique);
        any_attribution = any_attribution || v.top_technique.has_value() || v.attribution.has_value();
    }
    EvalReport r;
    r.videos = verdicts.size();
    r.accuracy = accuracy(predicted, truth);
    r.rates = rates(predicted, truth);
    const auto pos = std::count(truth.begin(), truth.end(), 1);
    if (pos > 0 && static_cast<std::size_t>(pos) < truth.size()) r.auc = auc(scores, truth);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == 1) (predicted[i] == 1 ? r.tp : r.fn)++;
        else (predicted[i] == 1 ? r.fp : r.tn)++;
    }
    for (auto t : kManipulations) {
        std::vector<int> p, y;
        bool has_fake = false;
        for (std::size_t i = 0; i < truth.size(); ++i)
            if (techniques[i] == Technique::Original || techniques[i] == t) {
                p.push_back(predicted[i]);
                y.push_back(truth[i]);
                has_fake = has_fake || techniques[i] == t;
            }
        if (has_fake) r.per_technique_accuracy.emplace_back(t, accuracy(p, y));
    }
    if (any_attribution) r.confusion = attribution_confusion(verdicts, techniques, opts.conditioned_confusion);
    if (opts.window_auc) {
        std::vector<double> ws;
        std::vector<int> wl;
        for (std::size_t i = 0; i < verdicts.size(); ++i)
            for (const auto& w : verdicts[i].windows) {
                ws.push_back(w.score);
                wl.push_back(truth[i]);
            }
        const auto wpos = std::count(wl.begin(), wl.end(), 1);
        if (wpos > 0 && static_cast<std::size_t>(wpos) < wl.size()) r.window_auc = auc(ws, wl);
    }
    return r;
}

void write_report_json(const EvalReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write " + path.string());
    out << report.to_json().dump(2) << '\n';
}

void write_report_csv(const EvalReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write " + path.string());
    out.precision(10);
    auto opt = [&](const std::optional<double>& v) {
        if (v) out << *v;
    };
    out << "metric,value\n";
    out << "videos," << report.videos << '\n';
    out << "accuracy," << report.accuracy << '\n';
    out << "auc,";
    opt(report.auc);
    out << "\nfpr,";
    opt(report.rates.fpr);
    out << "\nfnr,";
    opt(report.rates.fnr);
    out << '\n';
    if (report.window_auc) out << "window_auc," << *report.window_auc << '\n';
    for (const auto& [t, acc] : report.per_technique_accuracy) out << "accuracy_" << to_string(t) << ',' << acc << '\n';
    if (report.confusion) {
        out << "\ntrue\\attributed,DF,F2F,FSW,count\n";
        for (std::size_t r = 0; r < 3; ++r) {
            out << to_string(kManipulations[r]);
            for (std::size_t c = 0; c < 3; ++c) {
                out << ',';
                opt(report.confusion->percent(r, c));
            }
            out << ',' << report.confusion->row_total(r) << '\n';
        }
    }
}

void write_bar_chart_svg(const std::filesystem::path& path, const std::string& title, std::span<const BarSeries> bars,
                         bool signed_values) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write " + path.string());
    const int bar_w = 48, gap = 16, left = 50, top = 40, plot_h = 240;
    const int width = left + static_cast<int>(bars.size()) * (bar_w + gap) + gap;
    double lo = 0.0, hi = 1.0;
    if (signed_values) {
        double m = 1e-9;
        for (const auto& b : bars) m = std::max(m, std::abs(b.value));
        lo = -m;
        hi = m;
    }
    auto ypos = [&](double v) { return top + plot_h * (hi - v) / (hi - lo); };
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << top + plot_h + 50
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<text x=\"" << left << "\" y=\"20\" font-size=\"14\">" << title << "</text>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << ypos(0.0) << "\" x2=\"" << width << "\" y2=\"" << ypos(0.0)
        << "\" stroke=\"black\"/>\n";
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const double x = left + gap + static_cast<double>(i) * (bar_w + gap);
        const double y0 = ypos(0.0), y1 = ypos(bars[i].value);
        out << "<rect x=\"" << x << "\" y=\"" << std::min(y0, y1) << "\" width=\"" << bar_w << "\" height=\""
            << std::abs(y1 - y0) << "\" fill=\"#4a7ab5\"/>\n";
        out << "<text x=\"" << x << "\" y=\"" << top + plot_h + 18 << "\">" << bars[i].label << "</text>\n";
        out << "<text x=\"" << x << "\" y=\"" << std::min(y0, y1) - 4 << "\">" << std::round(bars[i].value * 1000) / 10
            << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace ldptop
