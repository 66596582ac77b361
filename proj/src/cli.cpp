#include "ldptop/cli.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "ldptop/config.hpp"
#include "ldptop/errors.hpp"
#include "ldptop/eval.hpp"
#include "ldptop/feature_io.hpp"
#include "ldptop/pipeline.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace ldptop {

namespace {

struct ConfigFlags {
    std::string config_path;
    std::vector<std::string> overrides;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON run config")->check(CLI::ExistingFile);
        cmd->add_option("--set", overrides, "override a config key, e.g. --set area=B (repeatable)");
    }

    RunConfig resolve(const RunConfig& base = {}) const {
        RunConfig cfg = config_path.empty() ? base : merge_config(base, [&] {
            std::ifstream in(config_path);
            json j;
            try {
                j = json::parse(in);
            } catch (const json::exception& e) {
                throw ParameterError("cannot parse config " + config_path + ": " + e.what());
            }
            return j;
        }());
        for (const auto& o : overrides) cfg = apply_override(cfg, o);
        return cfg;
    }
};

SplitFilter parse_split(const std::string& s) {
    if (s == "train") return SplitFilter::Train;
    if (s == "test") return SplitFilter::Test;
    if (s == "all") return SplitFilter::All;
    throw ParameterError("split must be train, test or all, got '" + s + "'");
}

/// Config echo of the first feature file found for the manifest, or null.
json feature_echo(const DatasetManifest& manifest, const fs::path& dir) {
    for (const auto& r : manifest.records) {
        const auto p = feature_file_path(dir, r.id);
        if (fs::exists(p)) return read_feature_file(p).config;
    }
    return nullptr;
}

json first_line_config(const fs::path& verdicts) {
    std::ifstream in(verdicts);
    std::string line;
    if (std::getline(in, line) && !line.empty()) {
        const auto j = json::parse(line, nullptr, false);
        if (j.is_object() && j.contains("config")) return j["config"];
    }
    return nullptr;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

std::vector<std::pair<Area, TemporalMode>> parse_variants(const std::vector<std::string>& specs) {
    if (specs.empty()) return all_variants();
    std::vector<std::pair<Area, TemporalMode>> out;
    for (const auto& s : specs) {
        const auto colon = s.find(':');
        if (colon == std::string::npos) throw ParameterError("variant must look like AREA:MODE, got '" + s + "'");
        out.emplace_back(parse_area(s.substr(0, colon)), parse_mode(s.substr(colon + 1)));
    }
    return out;
}

std::string variant_label(Area a, TemporalMode m) { return std::string(to_string(a)) + " " + std::string(to_string(m)); }

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"LDP-TOP face-manipulation detector"};
    app.require_subcommand(1);

    // extract
    auto* extract = app.add_subcommand("extract", "compute window descriptors for every manifest video");
    ConfigFlags extract_cfg;
    extract_cfg.attach(extract);
    std::string manifest_path, out_path, features_dir, motion_dir;
    int workers = 0;
    bool csv = false;
    extract->add_option("--manifest", manifest_path)->required()->check(CLI::ExistingFile);
    extract->add_option("--out", out_path, "feature directory")->required();
    extract->add_option("--workers", workers, "worker threads (default $LDPTOP_WORKERS or all cores)");
    extract->add_option("--motion-dir", motion_dir, "also dump raw and smoothed motion CSVs here");
    extract->add_flag("--csv", csv, "also write a debug CSV per video");

    // train
    auto* train = app.add_subcommand("train", "train one technique-specific SVM");
    ConfigFlags train_cfg;
    train_cfg.attach(train);
    std::string technique_code;
    train->add_option("--manifest", manifest_path)->required()->check(CLI::ExistingFile);
    train->add_option("--features", features_dir)->required()->check(CLI::ExistingDirectory);
    train->add_option("--technique", technique_code, "DF, F2F or FSW")->required();
    train->add_option("--out", out_path, "model JSON")->required();

    // classify
    auto* classify = app.add_subcommand("classify", "per-video verdicts from one model, or fused from three");
    std::vector<std::string> model_paths;
    std::string split = "test";
    classify->add_option("--manifest", manifest_path)->required()->check(CLI::ExistingFile);
    classify->add_option("--features", features_dir)->required()->check(CLI::ExistingDirectory);
    classify->add_option("--model", model_paths, "model file (one, or three for fusion)")
        ->required()
        ->check(CLI::ExistingFile);
    classify->add_option("--split", split, "train, test or all")->capture_default_str();
    classify->add_option("--out", out_path, "verdict JSONL")->required();

    // evaluate
    auto* evaluate_cmd = app.add_subcommand("evaluate", "metrics and confusion matrix for a verdict file");
    std::string verdicts_path;
    bool unconditioned = false, window_auc = false;
    evaluate_cmd->add_option("--verdicts", verdicts_path)->required()->check(CLI::ExistingFile);
    evaluate_cmd->add_option("--manifest", manifest_path)->required()->check(CLI::ExistingFile);
    evaluate_cmd->add_option("--out", out_path, "report directory")->required();
    evaluate_cmd->add_flag("--unconditioned", unconditioned, "attribute videos judged real too");
    evaluate_cmd->add_flag("--window-auc", window_auc, "also report AUC over window scores");

    // ablate / grid
    auto* ablate = app.add_subcommand("ablate", "accuracy with and without temporal partitioning");
    ConfigFlags ablate_cfg;
    ablate_cfg.attach(ablate);
    std::vector<std::string> variants;
    ablate->add_option("--manifest", manifest_path)->required()->check(CLI::ExistingFile);
    ablate->add_option("--out", out_path, "report directory")->required();
    ablate->add_option("--variant", variants, "AREA:MODE, e.g. B:bidirectional (default: all nine)");
    ablate->add_option("--workers", workers);

    auto* grid = app.add_subcommand("grid", "single-technique accuracy and AUC for every area and mode");
    ConfigFlags grid_cfg;
    grid_cfg.attach(grid);
    grid->add_option("--manifest", manifest_path)->required()->check(CLI::ExistingFile);
    grid->add_option("--out", out_path, "report directory")->required();
    grid->add_option("--variant", variants, "AREA:MODE (default: all nine)");
    grid->add_option("--workers", workers);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*extract) {
            const auto cfg = extract_cfg.resolve();
            const auto manifest = load_manifest(manifest_path);
            ExtractOptions opts;
            opts.workers = workers;
            opts.csv = csv;
            if (!motion_dir.empty()) opts.motion_dump_dir = motion_dir;
            const auto summary = run_extract(manifest, cfg, out_path, opts);
            for (const auto& w : summary.warnings) err << "warning: " << w << '\n';
            for (const auto& f : summary.failures) err << "error: " << f << '\n';
            out << "extracted " << summary.written << "/" << manifest.records.size() << " videos into " << out_path
                << '\n';
            return summary.failures.empty() ? kExitOk : kExitPartial;
        }
        if (*train) {
            const auto manifest = load_manifest(manifest_path);
            const auto echo = feature_echo(manifest, features_dir);
            const auto cfg = train_cfg.resolve(echo.is_object() ? merge_config({}, echo) : RunConfig{});
            const auto features = load_feature_table(manifest, features_dir);
            for (const auto& [id, fvs] : features)
                for (const auto& fv : fvs)
                    if (fv.kind != cfg.descriptor || fv.mode != cfg.mode || fv.area != cfg.area)
                        throw ParameterError("features of '" + id + "' were extracted with a different area, mode or descriptor than the config");
            const auto model = run_train(manifest, features, parse_technique(technique_code), cfg);
            save_model(model, out_path);
            out << "trained " << to_string(model.metadata.technique) << " model on " << model.dim() << " dims ("
                << (model.converged ? "converged" : "iteration cap reached") << ") -> " << out_path << '\n';
            if (!model.converged) err << "warning: solver stopped at the iteration cap\n";
            return kExitOk;
        }
        if (*classify) {
            const auto manifest = load_manifest(manifest_path);
            std::vector<LinearSvmModel> models;
            for (const auto& p : model_paths) models.push_back(load_model(p));
            const auto features = load_feature_table(manifest, features_dir);
            const auto verdicts = run_classify(manifest, features, models, model_paths, parse_split(split));
            write_verdicts(out_path, verdicts, models.front().metadata.config);
            out << "wrote " << verdicts.size() << " verdicts -> " << out_path << '\n';
            return kExitOk;
        }
        if (*evaluate_cmd) {
            const auto manifest = load_manifest(manifest_path);
            const auto verdicts = read_verdicts(verdicts_path);
            auto report = evaluate(verdicts, manifest, {!unconditioned, window_auc});
            report.config = first_line_config(verdicts_path);
            fs::create_directories(out_path);
            write_report_json(report, fs::path(out_path) / "report.json");
            write_report_csv(report, fs::path(out_path) / "report.csv");
            out << "accuracy " << report.accuracy;
            if (report.auc) out << ", AUC " << *report.auc;
            out << " over " << report.videos << " videos -> " << out_path << '\n';
            return kExitOk;
        }
        if (*ablate) {
            const auto cfg = ablate_cfg.resolve();
            const auto manifest = load_manifest(manifest_path);
            const auto rows = sliding_ablation(manifest, cfg, parse_variants(variants), workers);
            fs::create_directories(out_path);
            write_json(fs::path(out_path) / "ablation.json", ablation_to_json(rows, cfg));
            std::vector<BarSeries> bars;
            for (const auto& row : rows) {
                double sum = 0.0;
                for (const auto& c : row.cells) sum += c.loss();
                bars.push_back({variant_label(row.area, row.mode),
                                row.cells.empty() ? 0.0 : sum / static_cast<double>(row.cells.size())});
                out << variant_label(row.area, row.mode);
                for (const auto& c : row.cells)
                    out << "  " << to_string(c.technique) << " " << c.sliding << " vs " << c.non_sliding;
                out << '\n';
            }
            write_bar_chart_svg(fs::path(out_path) / "ablation.svg", "Average sliding-window loss", bars, true);
            return kExitOk;
        }
        if (*grid) {
            const auto cfg = grid_cfg.resolve();
            const auto manifest = load_manifest(manifest_path);
            const auto rows = technique_grid(manifest, cfg, parse_variants(variants), workers);
            fs::create_directories(out_path);
            write_json(fs::path(out_path) / "grid.json", grid_to_json(rows, cfg));
            for (const auto& row : rows) {
                out << variant_label(row.area, row.mode);
                for (const auto& r : row.results) {
                    out << "  " << to_string(r.technique) << " acc " << r.accuracy;
                    if (r.auc) out << " auc " << *r.auc;
                }
                out << '\n';
            }
            return kExitOk;
        }
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DimensionMismatchError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitPartial;
    }
    return kExitUsage;
}

}  // namespace ldptop
