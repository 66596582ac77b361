#include "ldptop/feature_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "ldptop/errors.hpp"

using json = nlohmann::json;

namespace ldptop {

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
    out.write(b, 4);
}

void put_f64(std::ostream& out, double d) {
    const auto bits = std::bit_cast<std::uint64_t>(d);
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xFFu);
    out.write(b, 8);
}

bool get_bytes(std::istream& in, unsigned char* dst, std::size_t n) {
    in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
    return static_cast<std::size_t>(in.gcount()) == n;
}

}  // namespace

void write_feature_record(std::ostream& out, const FeatureVector& fv, const json& config) {
    json header = {{"kind", to_string(fv.kind)},
                   {"mode", to_string(fv.mode)},
                   {"area", to_string(fv.area)},
                   {"video_id", fv.video_id},
                   {"window_index", fv.window_index},
                   {"start_frame", fv.start_frame},
                   {"label", fv.label ? json(*fv.label) : json(nullptr)},
                   {"dim", fv.values.size()},
                   {"config", config}};
    out << header.dump() << '\n';
    put_u32(out, static_cast<std::uint32_t>(fv.values.size()));
    for (double v : fv.values) put_f64(out, v);
}

void write_feature_file(const std::filesystem::path& path, const std::vector<FeatureVector>& records,
                        const json& config) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LoadError("cannot write feature file " + path.string());
    for (const auto& fv : records) write_feature_record(out, fv, config);
    if (!out) throw LoadError("write failed for " + path.string());
}

FeatureFile read_feature_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open feature file " + path.string());
    FeatureFile file;
    std::string line;
    for (std::size_t rec = 0; std::getline(in, line); ++rec) {
        const std::string where = path.string() + " record " + std::to_string(rec);
        json h;
        try {
            h = json::parse(line);
            FeatureVector fv;
            fv.kind = parse_descriptor(h.at("kind").get<std::string>());
            fv.mode = parse_mode(h.at("mode").get<std::string>());
            fv.area = parse_area(h.at("area").get<std::string>());
            fv.video_id = h.at("video_id").get<std::string>();
            fv.window_index = h.at("window_index").get<int>();
            fv.start_frame = h.at("start_frame").get<int>();
            if (!h.at("label").is_null()) fv.label = h["label"].get<int>();
            if (rec == 0) file.config = h.value("config", json());

            unsigned char b[8];
            if (!get_bytes(in, b, 4)) throw FormatError(where + ": truncated dimension");
            std::uint32_t dim = 0;
            for (int i = 0; i < 4; ++i) dim |= static_cast<std::uint32_t>(b[i]) << (8 * i);
            if (h.contains("dim") && h["dim"].get<std::uint64_t>() != dim)
                throw FormatError(where + ": header dim disagrees with payload");
            fv.values.resize(dim);
            for (auto& v : fv.values) {
                if (!get_bytes(in, b, 8)) throw FormatError(where + ": truncated payload");
                std::uint64_t bits = 0;
                for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
                v = std::bit_cast<double>(bits);
            }
            file.records.push_back(std::move(fv));
        } catch (const json::exception& e) {
            throw FormatError(where + ": bad header: " + e.what());
        }
    }
    return file;
}

void write_feature_csv(const std::filesystem::path& path, const std::vector<FeatureVector>& records) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write " + path.string());
    out.precision(17);
    const std::size_t dim = records.empty() ? 0 : records.front().values.size();
    out << "video_id,window_index,start_frame,label";
    for (std::size_t j = 0; j < dim; ++j) out << ",f" << j;
    out << '\n';
    for (const auto& fv : records) {
        out << fv.video_id << ',' << fv.window_index << ',' << fv.start_frame << ',';
        if (fv.label) out << *fv.label;
        for (double v : fv.values) out << ',' << v;
        out << '\n';
    }
}

}  // namespace ldptop
