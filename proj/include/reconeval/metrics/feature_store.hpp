#pragma once
/// @file feature_store.hpp
/// @brief Per-image global feature vectors and their on-disk format.
///
/// Feature file: "DFV1" magic, u32 LE dim, dim x f32 LE.
/// Index JSON (one per image directory):
///   {"extractor": {"identifier": "dinov2_vitb14", "version": "1"},
///    "dim": 768,
///    "features": {"frame_0001.png": "features/frame_0001.dfv", ...}}
/// Relative feature paths resolve against the index's directory.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "reconeval/core/error.hpp"
#include "reconeval/io/byte_stream.hpp"

namespace reconeval {

struct FeatureVector {
    std::string image_name;
    std::vector<double> values;

    [[nodiscard]] std::size_t dim() const noexcept { return values.size(); }
};

[[nodiscard]] inline FeatureVector parse_feature_bytes(std::string_view bytes, const std::string& file,
                                                       std::string image_name) {
    ByteReader in(bytes, file);
    const char magic[4] = {in.read<char>(), in.read<char>(), in.read<char>(), in.read<char>()};
    if (std::string_view(magic, 4) != "DFV1") throw FormatError(file + ": bad feature magic");
    const auto dim = in.read<std::uint32_t>();
    if (dim == 0) throw FormatError(file + ": feature dim must be >= 1");
    if (in.remaining() != std::size_t{dim} * 4) {
        throw ParseError(file, in.offset(),
                         "expected " + std::to_string(dim) + " floats, found " + std::to_string(in.remaining()) +
                             " bytes");
    }
    FeatureVector f;
    f.image_name = std::move(image_name);
    f.values.resize(dim);
    for (auto& v : f.values) {
        v = in.read<float>();
        if (!std::isfinite(v)) throw FormatError(file + ": non-finite feature value");
    }
    return f;
}

[[nodiscard]] inline FeatureVector read_feature_file(const std::filesystem::path& path, std::string image_name) {
    return parse_feature_bytes(read_file_bytes(path), path.string(), std::move(image_name));
}

/// Values are narrowed to f32.
inline void write_feature_file(const std::filesystem::path& path, const FeatureVector& f) {
    ByteWriter out;
    for (const char c : std::string_view("DFV1")) out.write(c);
    out.write<std::uint32_t>(static_cast<std::uint32_t>(f.values.size()));
    for (const double v : f.values) out.write(static_cast<float>(v));
    write_file_bytes(path, out.bytes());
}

struct ExtractorInfo {
    std::string identifier;
    std::string version;

    bool operator==(const ExtractorInfo&) const = default;
};

/// Image name -> feature vector for one image set, all from one extractor.
class FeatureStore {
public:
    FeatureStore() = default;
    FeatureStore(ExtractorInfo extractor, std::map<std::string, FeatureVector> features)
        : extractor_(std::move(extractor)), features_(std::move(features)) {}

    /// Loads an index and every feature file it lists.
    [[nodiscard]] static FeatureStore load(const std::filesystem::path& index_path) {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(read_file_bytes(index_path));
        } catch (const nlohmann::json::parse_error& e) {
            throw FormatError(index_path.string() + ": " + e.what());
        }
        FeatureStore store;
        std::optional<std::size_t> dim;
        std::map<std::string, std::string> entries;
        try {
            store.extractor_.identifier = doc.at("extractor").at("identifier").get<std::string>();
            store.extractor_.version = doc.at("extractor").at("version").get<std::string>();
            if (doc.contains("dim")) dim = doc.at("dim").get<std::size_t>();
            entries = doc.at("features").get<std::map<std::string, std::string>>();
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(index_path.string() + ": malformed feature index: " + e.what());
        }
        const auto base = index_path.parent_path();
        for (const auto& [name, rel] : entries) {
            const std::filesystem::path p = std::filesystem::path(rel).is_absolute() ? std::filesystem::path(rel) : base / rel;
            FeatureVector f = read_feature_file(p, name);
            if (dim && f.dim() != *dim) {
                throw DimensionMismatchError(p.string() + ": dim " + std::to_string(f.dim()) +
                                             " differs from index dim " + std::to_string(*dim));
            }
            store.features_.emplace(name, std::move(f));
        }
        return store;
    }

    [[nodiscard]] const FeatureVector* find(const std::string& image_name) const {
        const auto it = features_.find(image_name);
        return it == features_.end() ? nullptr : &it->second;
    }

    [[nodiscard]] const ExtractorInfo& extractor() const noexcept { return extractor_; }
    [[nodiscard]] std::size_t size() const noexcept { return features_.size(); }

private:
    ExtractorInfo extractor_;
    std::map<std::string, FeatureVector> features_;
};

/// Writes one feature file per vector under `dir` and the matching index.
inline void write_feature_index(const std::filesystem::path& dir, const ExtractorInfo& extractor,
                                const std::vector<FeatureVector>& features) {
    std::filesystem::create_directories(dir / "features");
    nlohmann::json index;
    index["extractor"] = {{"identifier", extractor.identifier}, {"version", extractor.version}};
    if (!features.empty()) index["dim"] = features.front().dim();
    index["features"] = nlohmann::json::object();
    for (const auto& f : features) {
        const std::string rel = "features/" + std::filesystem::path(f.image_name).stem().string() + ".dfv";
        write_feature_file(dir / rel, f);
        index["features"][f.image_name] = rel;
    }
    write_file_bytes(dir / "index.json", index.dump(2) + "\n");
}

}  // namespace reconeval
