#include "ldptop/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <mutex>
#include <thread>

#include "ldptop/errors.hpp"
#include "ldptop/eval.hpp"
#include "ldptop/feature_io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace ldptop {

PreparedVideo prepare_video(const VideoRecord& record, const DatasetManifest& manifest, const RunConfig& cfg) {
    auto frames = load_frames(manifest.resolve(record.frames_path));
    frames.source_id = record.id;
    const auto landmarks = load_landmarks(manifest.resolve(record.landmarks_path));
    if (landmarks.size() != frames.size())
        throw DimensionMismatchError("video " + record.id + ": " + std::to_string(frames.size()) + " frames but " +
                                     std::to_string(landmarks.size()) + " landmark entries");
    PreparedVideo out;
    out.raw_motion = compute_motion(landmarks, cfg.landmarks);
    out.smoothed_motion = smooth_motion(out.raw_motion, cfg.smoother);
    const auto dims = frames.dims();
    const Box initial = record.initial_box ? *record.initial_box
                                           : derive_initial_box(landmarks.frames.front(), cfg.margin_factor, dims);
    const auto roi = build_roi_track(initial, out.smoothed_motion, dims);
    out.clamped_frames = roi.clamped_frames;
    out.volume = extract_patch_volume(frames, roi);
    out.volume.provenance.video_id = record.id;
    return out;
}

std::vector<FeatureVector> window_features(const VideoVolume& volume, const RunConfig& cfg, std::optional<int> label) {
    std::vector<FeatureVector> out;
    for (const auto& window : partition(volume, cfg.windowing)) {
        auto fv = extract_descriptor(select_area(window, cfg.area), cfg.descriptor, cfg.mode);
        fv.label = label;
        out.push_back(std::move(fv));
    }
    return out;
}

int worker_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("LDPTOP_WORKERS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    const auto threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
        });
}

fs::path feature_file_path(const fs::path& dir, const std::string& video_id) { return dir / (video_id + ".feat"); }

ExtractSummary run_extract(const DatasetManifest& manifest, const RunConfig& cfg, const fs::path& out_dir,
                           const ExtractOptions& opts) {
    fs::create_directories(out_dir);
    if (opts.motion_dump_dir) fs::create_directories(*opts.motion_dump_dir);
    const auto echo = to_json(cfg);
    const auto n = manifest.records.size();
    std::vector<std::optional<std::string>> errors(n), warnings(n);
    parallel_for(n, worker_count(opts.workers), [&](std::size_t i) {
        const auto& rec = manifest.records[i];
        try {
            const auto prepared = prepare_video(rec, manifest, cfg);
            if (prepared.clamped_frames > 0)
                warnings[i] = rec.id + ": ROI clamped to frame bounds on " + std::to_string(prepared.clamped_frames) +
                              " frame(s)";
            if (opts.motion_dump_dir)
                write_motion_csv(prepared.raw_motion, prepared.smoothed_motion,
                                 *opts.motion_dump_dir / (rec.id + ".motion.csv"));
            const auto features = window_features(prepared.volume, cfg, rec.label);
            write_feature_file(feature_file_path(out_dir, rec.id), features, echo);
            if (opts.csv) write_feature_csv(out_dir / (rec.id + ".csv"), features);
        } catch (const std::exception& e) {
            errors[i] = rec.id + ": " + e.what();
        }
    });
    ExtractSummary summary;
    for (std::size_t i = 0; i < n; ++i) {
        if (errors[i]) summary.failures.push_back(*errors[i]);
        else ++summary.written;
        if (warnings[i]) summary.warnings.push_back(*warnings[i]);
    }
    return summary;
}

FeatureTable load_feature_table(const DatasetManifest& manifest, const fs::path& dir) {
    FeatureTable table;
    for (const auto& rec : manifest.records) {
        const auto path = feature_file_path(dir, rec.id);
        if (!fs::exists(path)) continue;
        auto file = read_feature_file(path);
        table.emplace(rec.id, std::move(file.records));
    }
    return table;
}

namespace {

const std::vector<FeatureVector>& features_of(const FeatureTable& table, const std::string& id) {
    const auto it = table.find(id);
    if (it == table.end()) throw LoadError("no features for video '" + id + "'");
    if (it->second.empty()) throw LoadError("feature file of video '" + id + "' is empty");
    return it->second;
}

bool in_split(const VideoRecord& r, SplitFilter split) {
    return split == SplitFilter::All || (split == SplitFilter::Train) == r.train;
}

}  // namespace

LabeledSet training_set(const DatasetManifest& manifest, const FeatureTable& features, Technique technique) {
    LabeledSet set;
    for (const auto& rec : manifest.records) {
        if (!rec.train || (rec.technique != Technique::Original && rec.technique != technique)) continue;
        for (const auto& fv : features_of(features, rec.id)) set.add(fv.values, rec.label);
    }
    return set;
}

ModelMetadata model_metadata(const RunConfig& cfg, Technique technique) {
    return {technique, cfg.area, cfg.mode, cfg.descriptor, cfg.windowing, to_json(cfg)};
}

LinearSvmModel run_train(const DatasetManifest& manifest, const FeatureTable& features, Technique technique,
                         const RunConfig& cfg) {
    if (technique == Technique::Original) throw ParameterError("train needs a manipulation technique (DF, F2F, FSW)");
    const auto set = training_set(manifest, features, technique);
    if (set.count(0) == 0 || set.count(1) == 0)
        throw ParameterError("training set for " + std::string(to_string(technique)) + " has " +
                             std::to_string(set.count(0)) + " real and " + std::to_string(set.count(1)) +
                             " manipulated windows; both classes are required");
    const auto expected = descriptor_length(cfg.descriptor, cfg.mode);
    if (set.dim() != expected)
        throw DimensionMismatchError("features have " + std::to_string(set.dim()) + " dims but the config expects " +
                                     std::to_string(expected));
    return train_svm(set, cfg.svm, model_metadata(cfg, technique));
}

std::vector<VideoVerdict> run_classify(const DatasetManifest& manifest, const FeatureTable& features,
                                       const std::vector<LinearSvmModel>& models,
                                       const std::vector<std::string>& model_refs, SplitFilter split) {
    if (models.size() != 1 && models.size() != 3) throw ParameterError("classify takes one model or three (DF, F2F, FSW)");
    for (const auto& m : models) {
        const auto& ref = models.front().metadata;
        if (m.metadata.area != ref.area || m.metadata.mode != ref.mode || m.metadata.descriptor != ref.descriptor)
            throw ParameterError("models disagree on area/mode/descriptor");
    }
    std::map<Technique, const LinearSvmModel*> by_technique;
    for (const auto& m : models) by_technique[m.metadata.technique] = &m;
    if (models.size() == 3 && by_technique.size() != 3)
        throw ParameterError("fusion needs exactly one model per technique (DF, F2F, FSW)");

    std::vector<VideoVerdict> verdicts;
    for (const auto& rec : manifest.records) {
        if (!in_split(rec, split)) continue;
        if (models.size() == 1 && rec.technique != Technique::Original && rec.technique != models[0].metadata.technique)
            continue;
        const auto& fvs = features_of(features, rec.id);
        for (const auto& fv : fvs) {
            const auto& md = models.front().metadata;
            if (fv.kind != md.descriptor || fv.mode != md.mode || fv.area != md.area)
                throw ParameterError("features of '" + rec.id + "' (" + std::string(to_string(fv.kind)) + ", " +
                                     std::string(to_string(fv.area)) + ", " + std::string(to_string(fv.mode)) +
                                     ") do not match the model metadata");
            if (fv.values.size() != models.front().dim())
                throw DimensionMismatchError("features of '" + rec.id + "' have " + std::to_string(fv.values.size()) +
                                             " dims, model expects " + std::to_string(models.front().dim()));
        }
        if (models.size() == 1) {
            auto v = classify_video(models[0], fvs);
            v.video_id = rec.id;
            v.model_refs = {model_refs.empty() ? std::string() : model_refs[0]};
            verdicts.push_back(std::move(v));
        } else {
            std::map<Technique, VideoVerdict> per;
            for (std::size_t m = 0; m < models.size(); ++m) {
                auto v = classify_video(models[m], fvs);
                v.video_id = rec.id;
                if (m < model_refs.size()) v.model_refs = {model_refs[m]};
                per.emplace(models[m].metadata.technique, std::move(v));
            }
            verdicts.push_back(fuse_and_attribute(per));
        }
    }
    return verdicts;
}

TechniqueResult run_single_technique(const DatasetManifest& manifest, const FeatureTable& features, Technique technique,
                                     const RunConfig& cfg) {
    const auto model = run_train(manifest, features, technique, cfg);
    const auto verdicts = run_classify(manifest, features, {model}, {}, SplitFilter::Test);
    if (verdicts.empty()) throw ParameterError("no test videos for " + std::string(to_string(technique)));
    TechniqueResult r;
    r.technique = technique;
    std::vector<int> predicted, truth;
    std::vector<double> scores;
    for (const auto& v : verdicts) {
        predicted.push_back(v.label);
        truth.push_back(manifest.find(v.video_id)->label);
        scores.push_back(v.score);
        r.test_windows += v.window_count();
    }
    r.accuracy = accuracy(predicted, truth);
    const auto pos = std::count(truth.begin(), truth.end(), 1);
    if (pos > 0 && static_cast<std::size_t>(pos) < truth.size()) r.auc = auc(scores, truth);
    r.train_windows = training_set(manifest, features, technique).size();
    return r;
}

std::vector<Technique> techniques_present(const DatasetManifest& manifest) {
    std::vector<Technique> out;
    for (auto t : kManipulations) {
        bool train = false, test = false;
        for (const auto& r : manifest.records)
            if (r.technique == t) (r.train ? train : test) = true;
        if (train && test) out.push_back(t);
    }
    return out;
}

std::vector<FeatureTable> extract_tables(const DatasetManifest& manifest, const std::vector<RunConfig>& cfgs,
                                         int workers, std::vector<std::string>* failures) {
    if (cfgs.empty()) return {};
    const auto& ref = cfgs.front();
    for (const auto& c : cfgs)
        if (c.smoother.window != ref.smoother.window || c.smoother.order != ref.smoother.order ||
            c.landmarks.right_eye != ref.landmarks.right_eye || c.landmarks.left_eye != ref.landmarks.left_eye ||
            c.landmarks.nose_top != ref.landmarks.nose_top || c.margin_factor != ref.margin_factor)
            throw ParameterError("extract_tables configs must share tracking parameters");

    const auto n = manifest.records.size();
    std::vector<std::vector<std::vector<FeatureVector>>> per_video(n);
    std::vector<std::optional<std::string>> errors(n);
    parallel_for(n, worker_count(workers), [&](std::size_t i) {
        const auto& rec = manifest.records[i];
        try {
            const auto prepared = prepare_video(rec, manifest, ref);
            for (const auto& c : cfgs) per_video[i].push_back(window_features(prepared.volume, c, rec.label));
        } catch (const std::exception& e) {
            errors[i] = rec.id + ": " + e.what();
        }
    });
    std::vector<FeatureTable> tables(cfgs.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (errors[i]) {
            if (!failures) throw LoadError(*errors[i]);
            failures->push_back(*errors[i]);
            continue;
        }
        for (std::size_t c = 0; c < cfgs.size(); ++c) tables[c].emplace(manifest.records[i].id, std::move(per_video[i][c]));
    }
    return tables;
}

namespace {

RunConfig variant_config(const RunConfig& base, Area area, TemporalMode mode, std::optional<bool> sliding = {}) {
    RunConfig c = base;
    c.area = area;
    c.mode = mode;
    if (sliding) c.windowing.sliding = *sliding;
    return c;
}

/// Drops videos whose extraction failed so the experiment runs on the rest.
DatasetManifest without_missing(const DatasetManifest& manifest, const FeatureTable& table) {
    DatasetManifest m;
    m.base_dir = manifest.base_dir;
    for (const auto& r : manifest.records)
        if (table.contains(r.id)) m.records.push_back(r);
    return m;
}

}  // namespace

std::vector<AblationRow> sliding_ablation(const DatasetManifest& manifest, const RunConfig& base,
                                          const std::vector<std::pair<Area, TemporalMode>>& variants, int workers) {
    std::vector<RunConfig> cfgs;
    for (const auto& [area, mode] : variants) {
        cfgs.push_back(variant_config(base, area, mode, true));
        cfgs.push_back(variant_config(base, area, mode, false));
    }
    std::vector<std::string> failures;
    const auto tables = extract_tables(manifest, cfgs, workers, &failures);
    const auto techniques = techniques_present(manifest);
    std::vector<AblationRow> rows;
    for (std::size_t v = 0; v < variants.size(); ++v) {
        AblationRow row{variants[v].first, variants[v].second, {}};
        const auto& on = tables[2 * v];
        const auto& off = tables[2 * v + 1];
        const auto subset = without_missing(manifest, on);
        for (auto t : techniques) {
            AblationCell cell;
            cell.technique = t;
            cell.sliding = run_single_technique(subset, on, t, cfgs[2 * v]).accuracy;
            cell.non_sliding = run_single_technique(subset, off, t, cfgs[2 * v + 1]).accuracy;
            row.cells.push_back(cell);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<GridRow> technique_grid(const DatasetManifest& manifest, const RunConfig& base,
                                    const std::vector<std::pair<Area, TemporalMode>>& variants, int workers) {
    std::vector<RunConfig> cfgs;
    for (const auto& [area, mode] : variants) cfgs.push_back(variant_config(base, area, mode));
    std::vector<std::string> failures;
    const auto tables = extract_tables(manifest, cfgs, workers, &failures);
    std::vector<GridRow> rows;
    for (std::size_t v = 0; v < variants.size(); ++v) {
        GridRow row{variants[v].first, variants[v].second, {}};
        const auto subset = without_missing(manifest, tables[v]);
        for (auto t : techniques_present(subset)) row.results.push_back(run_single_technique(subset, tables[v], t, cfgs[v]));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<std::pair<Area, TemporalMode>> all_variants() {
    std::vector<std::pair<Area, TemporalMode>> out;
    for (auto a : {Area::Full, Area::Top, Area::Bottom})
        for (auto m : {TemporalMode::Direct, TemporalMode::Inverse, TemporalMode::Bidirectional}) out.emplace_back(a, m);
    return out;
}

json ablation_to_json(const std::vector<AblationRow>& rows, const RunConfig& cfg) {
    json jr = json::array();
    for (const auto& row : rows) {
        json cells = json::array();
        double sum = 0.0;
        for (const auto& c : row.cells) {
            cells.push_back({{"technique", to_string(c.technique)},
                             {"sliding", c.sliding},
                             {"non_sliding", c.non_sliding},
                             {"loss", c.loss()}});
            sum += c.loss();
        }
        jr.push_back({{"area", to_string(row.area)},
                      {"mode", to_string(row.mode)},
                      {"techniques", cells},
                      {"average_loss", row.cells.empty() ? json(nullptr) : json(sum / static_cast<double>(row.cells.size()))}});
    }
    return {{"rows", jr}, {"config", to_json(cfg)}};
}

json grid_to_json(const std::vector<GridRow>& rows, const RunConfig& cfg) {
    json jr = json::array();
    for (const auto& row : rows) {
        json cells = json::array();
        double acc = 0.0, auc_sum = 0.0;
        std::size_t auc_n = 0;
        for (const auto& r : row.results) {
            cells.push_back({{"technique", to_string(r.technique)},
                             {"accuracy", r.accuracy},
                             {"auc", r.auc ? json(*r.auc) : json(nullptr)},
                             {"train_windows", r.train_windows},
                             {"test_windows", r.test_windows}});
            acc += r.accuracy;
            if (r.auc) {
                auc_sum += *r.auc;
                ++auc_n;
            }
        }
        const double k = static_cast<double>(row.results.size());
        jr.push_back({{"area", to_string(row.area)},
                      {"mode", to_string(row.mode)},
                      {"techniques", cells},
                      {"average_accuracy", row.results.empty() ? json(nullptr) : json(acc / k)},
                      {"average_auc", auc_n == 0 ? json(nullptr) : json(auc_sum / static_cast<double>(auc_n))}});
    }
    return {{"rows", jr}, {"config", to_json(cfg)}};
}

}  // namespace ldptop
