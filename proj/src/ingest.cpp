#include "ldptop/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "ldptop/errors.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace ldptop {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double read_fps_metadata(const fs::path& dir) {
    const auto meta = dir / "meta.json";
    if (!fs::exists(meta)) throw FormatError("missing fps metadata: " + meta.string() + " not found");
    json j;
    try {
        j = json::parse(read_file(meta));
    } catch (const json::exception& e) {
        throw FormatError("cannot parse " + meta.string() + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("fps") || !j["fps"].is_number())
        throw FormatError("missing fps metadata: " + meta.string() + " has no numeric \"fps\"");
    const double fps = j["fps"].get<double>();
    if (!(fps > 0.0)) throw FormatError("fps must be positive in " + meta.string());
    return fps;
}

Grayscale2D to_gray(const cv::Mat& img, std::size_t index, const fs::path& path) {
    if (img.depth() != CV_8U)
        throw LoadError("frame " + std::to_string(index) + " (" + path.filename().string() + ") is not 8-bit");
    Grayscale2D out(img.rows, img.cols);
    const int ch = img.channels();
    for (int r = 0; r < img.rows; ++r) {
        const auto* row = img.ptr<std::uint8_t>(r);
        for (int c = 0; c < img.cols; ++c) {
            const auto* px = row + static_cast<std::ptrdiff_t>(c) * ch;
            // OpenCV stores colour as BGR(A).
            out(r, c) = ch >= 3 ? luma_bt601(px[2], px[1], px[0]) : px[0];
        }
    }
    return out;
}

struct Y4mHeader {
    int width = 0;
    int height = 0;
    double fps = 0.0;
    std::size_t chroma_bytes = 0;
};

Y4mHeader parse_y4m_header(const std::string& line) {
    std::istringstream ss(line);
    std::string tok;
    ss >> tok;
    if (tok != "YUV4MPEG2") throw FormatError("not a Y4M stream (bad signature)");
    Y4mHeader h;
    std::string colorspace = "420jpeg";
    while (ss >> tok) {
        const char key = tok[0];
        const std::string val = tok.substr(1);
        try {
            if (key == 'W') h.width = std::stoi(val);
            else if (key == 'H') h.height = std::stoi(val);
            else if (key == 'F') {
                const auto colon = val.find(':');
                if (colon == std::string::npos) throw FormatError("bad Y4M frame rate '" + val + "'");
                const double num = std::stod(val.substr(0, colon));
                const double den = std::stod(val.substr(colon + 1));
                if (den > 0) h.fps = num / den;
            } else if (key == 'C') colorspace = val;
        } catch (const std::logic_error&) {
            throw FormatError("bad Y4M header token '" + tok + "'");
        }
    }
    if (h.width <= 0 || h.height <= 0) throw FormatError("Y4M header lacks W/H");
    if (!(h.fps > 0.0)) throw FormatError("missing fps metadata: Y4M header lacks a positive F tag");
    const std::size_t cw = (h.width + 1) / 2;
    const std::size_t chh = (h.height + 1) / 2;
    const std::size_t luma = static_cast<std::size_t>(h.width) * h.height;
    if (colorspace.find("p1") != std::string::npos || colorspace == "mono16")
        throw FormatError("unsupported Y4M bit depth C" + colorspace + " (8-bit only)");
    if (colorspace.rfind("420", 0) == 0) h.chroma_bytes = 2 * cw * chh;
    else if (colorspace == "422") h.chroma_bytes = 2 * cw * h.height;
    else if (colorspace == "444") h.chroma_bytes = 2 * luma;
    else if (colorspace == "444alpha") h.chroma_bytes = 3 * luma;
    else if (colorspace == "mono") h.chroma_bytes = 0;
    else throw FormatError("unsupported Y4M colorspace C" + colorspace);
    return h;
}

// Minimal RFC 4180 field splitter.
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw FormatError("unterminated quote in CSV line");
    fields.push_back(std::move(cur));
    return fields;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

constexpr const char* kManifestHeader = "id,frames_path,landmarks_path,initial_box,label,technique,split";

bool safe_id(const std::string& id) {
    if (id.empty() || id == "." || id == "..") return false;
    return std::all_of(id.begin(), id.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-' || c == '.';
    });
}

void validate_records(const DatasetManifest& m, bool check_paths) {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < m.records.size(); ++i) {
        const auto& r = m.records[i];
        const std::string where = "manifest record " + std::to_string(i) + " ('" + r.id + "')";
        if (!safe_id(r.id)) throw ValidationError(where + ": id must be non-empty [A-Za-z0-9._-]");
        if (!seen.insert(r.id).second) throw ValidationError("duplicate id '" + r.id + "' in manifest");
        if (r.label != 0 && r.label != 1) throw ValidationError(where + ": label must be 0 or 1");
        if ((r.label == 1) != (r.technique != Technique::Original))
            throw ValidationError(where + ": label " + std::to_string(r.label) + " inconsistent with technique " +
                                  std::string(to_string(r.technique)));
        if (check_paths) {
            if (!fs::exists(m.resolve(r.frames_path)))
                throw ValidationError(where + ": frames path not found: " + m.resolve(r.frames_path).string());
            if (!fs::exists(m.resolve(r.landmarks_path)))
                throw ValidationError(where + ": landmarks path not found: " + m.resolve(r.landmarks_path).string());
        }
    }
}

int parse_label(const std::string& s) {
    if (s == "0") return 0;
    if (s == "1") return 1;
    throw ValidationError("label must be 0 or 1, got '" + s + "'");
}

bool parse_split(const std::string& s) {
    if (s == "train") return true;
    if (s == "test") return false;
    throw ValidationError("split must be train or test, got '" + s + "'");
}

}  // namespace

void validate(const FrameSequence& seq) {
    if (seq.frames.empty()) throw FormatError("frame sequence is empty");
    if (!(seq.fps > 0.0)) throw FormatError("fps must be positive");
    const auto d = seq.dims();
    for (std::size_t k = 0; k < seq.frames.size(); ++k)
        if (seq.frames[k].height() != d.height || seq.frames[k].width() != d.width)
            throw DimensionMismatchError("frame " + std::to_string(k) + " is " + std::to_string(seq.frames[k].height()) +
                                         "x" + std::to_string(seq.frames[k].width()) + ", expected " +
                                         std::to_string(d.height) + "x" + std::to_string(d.width));
}

std::uint8_t luma_bt601(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    // Exact integer form of round(0.299 R + 0.587 G + 0.114 B); weights sum to 1000.
    return static_cast<std::uint8_t>((299u * r + 587u * g + 114u * b + 500u) / 1000u);
}

FrameSequence load_frames(const fs::path& path) {
    if (fs::is_directory(path)) return load_frame_directory(path);
    if (fs::is_regular_file(path) && lower(path.extension().string()) == ".y4m") return load_y4m(path);
    if (!fs::exists(path)) throw LoadError("frames path not found: " + path.string());
    throw FormatError("frames path must be a directory or a .y4m file: " + path.string());
}

FrameSequence load_frame_directory(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto ext = lower(entry.path().extension().string());
        if (ext == ".png" || ext == ".pgm") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
    if (files.empty()) throw LoadError("no PNG/PGM frames in " + dir.string());

    FrameSequence seq;
    seq.fps = read_fps_metadata(dir);
    seq.source_id = dir.filename().string();
    seq.frames.reserve(files.size());
    for (std::size_t k = 0; k < files.size(); ++k) {
        const cv::Mat img = cv::imread(files[k].string(), cv::IMREAD_UNCHANGED);
        if (img.empty())
            throw LoadError("frame " + std::to_string(k) + " (" + files[k].filename().string() + ") cannot be decoded");
        seq.frames.push_back(to_gray(img, k, files[k]));
        if (k > 0 && (seq.frames[k].height() != seq.frames[0].height() || seq.frames[k].width() != seq.frames[0].width()))
            throw DimensionMismatchError("frame " + std::to_string(k) + " (" + files[k].filename().string() +
                                         ") differs in size from frame 0");
    }
    return seq;
}

FrameSequence load_y4m(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open " + path.string());
    std::string header;
    if (!std::getline(in, header)) throw FormatError("empty Y4M stream " + path.string());
    const auto h = parse_y4m_header(header);

    FrameSequence seq;
    seq.fps = h.fps;
    seq.source_id = path.stem().string();
    const std::size_t luma = static_cast<std::size_t>(h.width) * h.height;
    std::string frame_line;
    for (std::size_t k = 0; std::getline(in, frame_line); ++k) {
        if (frame_line.rfind("FRAME", 0) != 0)
            throw LoadError("frame " + std::to_string(k) + ": missing FRAME marker in " + path.string());
        std::vector<std::uint8_t> samples(luma);
        in.read(reinterpret_cast<char*>(samples.data()), static_cast<std::streamsize>(luma));
        if (static_cast<std::size_t>(in.gcount()) != luma)
            throw LoadError("frame " + std::to_string(k) + ": truncated luma plane in " + path.string());
        in.ignore(static_cast<std::streamsize>(h.chroma_bytes));
        if (static_cast<std::size_t>(in.gcount()) != h.chroma_bytes)
            throw LoadError("frame " + std::to_string(k) + ": truncated chroma planes in " + path.string());
        seq.frames.emplace_back(h.height, h.width, std::move(samples));
    }
    if (seq.frames.empty()) throw LoadError("frame 0: Y4M stream has no frames: " + path.string());
    return seq;
}

void save_frame_directory(const FrameSequence& seq, const fs::path& dir) {
    fs::create_directories(dir);
    for (std::size_t k = 0; k < seq.frames.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%06zu.pgm", k);
        std::ofstream out(dir / name, std::ios::binary);
        const auto& f = seq.frames[k];
        out << "P5\n" << f.width() << ' ' << f.height() << "\n255\n";
        out.write(reinterpret_cast<const char*>(f.samples().data()), static_cast<std::streamsize>(f.samples().size()));
        if (!out) throw LoadError("cannot write " + (dir / name).string());
    }
    std::ofstream meta(dir / "meta.json");
    meta << json{{"fps", seq.fps}}.dump() << '\n';
}

LandmarkTrack load_landmarks(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open landmarks " + path.string());
    LandmarkTrack track;
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw FormatError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (!j.is_object() || !j.contains("frame") || !j["frame"].is_number_integer() || !j.contains("points"))
            throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected {\"frame\": k, \"points\": [...]}");
        const auto frame = j["frame"].get<long long>();
        const auto expected = static_cast<long long>(track.frames.size());
        if (frame != expected)
            throw GapError("landmarks " + path.string() + ": missing frame " + std::to_string(expected) +
                           " (found frame " + std::to_string(frame) + ")");
        const auto& pts = j["points"];
        if (!pts.is_array() || pts.size() != kLandmarkCount)
            throw FormatError("landmarks " + path.string() + ": frame " + std::to_string(frame) + " has " +
                              std::to_string(pts.is_array() ? pts.size() : 0) + " points, expected 68");
        LandmarkFrame lf;
        for (int i = 0; i < kLandmarkCount; ++i) {
            const auto& p = pts[i];
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                throw FormatError("landmarks " + path.string() + ": frame " + std::to_string(frame) + " point " +
                                  std::to_string(i) + " is not [x, y]");
            lf[i] = {p[0].get<double>(), p[1].get<double>()};
        }
        track.frames.push_back(lf);
    }
    if (track.frames.empty()) throw FormatError("landmarks " + path.string() + " contain no frames");
    return track;
}

void save_landmarks(const LandmarkTrack& track, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write " + path.string());
    for (std::size_t k = 0; k < track.frames.size(); ++k) {
        json pts = json::array();
        for (const auto& p : track.frames[k]) pts.push_back({p.x, p.y});
        out << json{{"frame", k}, {"points", std::move(pts)}}.dump() << '\n';
    }
}

fs::path DatasetManifest::resolve(const std::string& path) const {
    const fs::path p(path);
    return p.is_absolute() ? p : base_dir / p;
}

const VideoRecord* DatasetManifest::find(const std::string& id) const {
    for (const auto& r : records)
        if (r.id == id) return &r;
    return nullptr;
}

DatasetManifest parse_manifest_csv(const std::string& text, const fs::path& base_dir, bool check_paths) {
    DatasetManifest m;
    m.base_dir = base_dir;
    std::istringstream in(text);
    std::string line;
    bool have_header = false;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!have_header) {
            if (line != kManifestHeader)
                throw FormatError("manifest header must be '" + std::string(kManifestHeader) + "'");
            have_header = true;
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 7)
            throw FormatError("manifest line " + std::to_string(lineno) + ": expected 7 fields, got " +
                              std::to_string(f.size()));
        VideoRecord r;
        r.id = f[0];
        r.frames_path = f[1];
        r.landmarks_path = f[2];
        if (!f[3].empty()) r.initial_box = parse_box(f[3]);
        r.label = parse_label(f[4]);
        r.technique = parse_technique(f[5]);
        r.train = parse_split(f[6]);
        m.records.push_back(std::move(r));
    }
    if (!have_header) throw FormatError("manifest is empty");
    validate_records(m, check_paths);
    return m;
}

namespace {

DatasetManifest parse_manifest_json(const std::string& text, const fs::path& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("cannot parse manifest JSON: ") + e.what());
    }
    const json& recs = j.is_object() && j.contains("records") ? j["records"] : j;
    if (!recs.is_array()) throw FormatError("manifest JSON must be an array or {\"records\": [...]}");
    DatasetManifest m;
    m.base_dir = base_dir;
    try {
        for (const auto& rj : recs) {
            VideoRecord r;
            r.id = rj.at("id").get<std::string>();
            r.frames_path = rj.at("frames_path").get<std::string>();
            r.landmarks_path = rj.at("landmarks_path").get<std::string>();
            if (rj.contains("initial_box") && rj["initial_box"].is_string() && !rj["initial_box"].get<std::string>().empty())
                r.initial_box = parse_box(rj["initial_box"].get<std::string>());
            const auto& lab = rj.at("label");
            r.label = lab.is_string() ? parse_label(lab.get<std::string>()) : lab.get<int>();
            r.technique = parse_technique(rj.at("technique").get<std::string>());
            r.train = parse_split(rj.at("split").get<std::string>());
            m.records.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("manifest JSON record: ") + e.what());
    }
    validate_records(m, true);
    return m;
}

}  // namespace

DatasetManifest load_manifest(const fs::path& path) {
    const std::string text = read_file(path);
    const auto base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    if (lower(path.extension().string()) == ".json") return parse_manifest_json(text, base);
    return parse_manifest_csv(text, base);
}

std::string format_manifest_csv(const DatasetManifest& m) {
    std::string out = std::string(kManifestHeader) + "\n";
    for (const auto& r : m.records) {
        out += csv_field(r.id) + "," + csv_field(r.frames_path) + "," + csv_field(r.landmarks_path) + "," +
               (r.initial_box ? format_box(*r.initial_box) : std::string()) + "," + std::to_string(r.label) + "," +
               std::string(to_string(r.technique)) + "," + (r.train ? "train" : "test") + "\n";
    }
    return out;
}

void save_manifest(const DatasetManifest& m, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LoadError("cannot write " + path.string());
    out << format_manifest_csv(m);
}

}  // namespace ldptop
