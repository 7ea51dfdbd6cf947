#pragma once
/// @file manifest.hpp
/// @brief Frame manifest of one video: which extracted frames exist and which
/// are fed to reconstruction.
///
/// JSON layout:
///   {"video_id": "ship_03", "sampling_stride": 10,
///    "frames": [{"index": 0, "name": "frame_000000.png", "included": false}, ...]}

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "reconeval/core/error.hpp"
#include "reconeval/io/byte_stream.hpp"

namespace reconeval {

struct ManifestEntry {
    std::uint64_t index = 0;  // source frame number in the video
    std::string name;
    bool included = true;

    bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
    std::string video_id;
    std::vector<ManifestEntry> frames;
    std::uint64_t sampling_stride = 1;

    bool operator==(const DatasetManifest&) const = default;

    [[nodiscard]] std::size_t included_count() const {
        std::size_t n = 0;
        for (const auto& f : frames) n += f.included ? 1 : 0;
        return n;
    }
};

inline void validate_manifest(const DatasetManifest& m) {
    if (m.sampling_stride < 1) throw ManifestError("sampling_stride must be >= 1");
    for (std::size_t i = 1; i < m.frames.size(); ++i) {
        if (m.frames[i].index == m.frames[i - 1].index) {
            throw ManifestError("duplicate frame index " + std::to_string(m.frames[i].index));
        }
        if (m.frames[i].index < m.frames[i - 1].index) {
            throw ManifestError("frame indices must be strictly increasing (at " +
                                std::to_string(m.frames[i].index) + ")");
        }
    }
}

[[nodiscard]] inline nlohmann::json manifest_to_json(const DatasetManifest& m) {
    nlohmann::json frames = nlohmann::json::array();
    for (const auto& f : m.frames) {
        frames.push_back({{"index", f.index}, {"name", f.name}, {"included", f.included}});
    }
    return {{"video_id", m.video_id}, {"sampling_stride", m.sampling_stride}, {"frames", std::move(frames)}};
}

[[nodiscard]] inline DatasetManifest manifest_from_json(const nlohmann::json& doc) {
    DatasetManifest m;
    try {
        m.video_id = doc.at("video_id").get<std::string>();
        m.sampling_stride = doc.at("sampling_stride").get<std::uint64_t>();
        for (const auto& f : doc.at("frames")) {
            m.frames.push_back({f.at("index").get<std::uint64_t>(), f.at("name").get<std::string>(),
                                f.at("included").get<bool>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ManifestError(std::string("malformed manifest: ") + e.what());
    }
    validate_manifest(m);
    return m;
}

inline void save_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
    validate_manifest(m);
    write_file_bytes(path, manifest_to_json(m).dump(2) + "\n");
}

[[nodiscard]] inline DatasetManifest load_manifest(const std::filesystem::path& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file_bytes(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ManifestError(path.string() + ": " + e.what());
    }
    return manifest_from_json(doc);
}

}  // namespace reconeval
