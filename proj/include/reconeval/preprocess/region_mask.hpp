#pragma once
/// @file region_mask.hpp
/// @brief Sky/water region masks and the mask manifest emitted by the segmentation adapter.
///
/// Mask manifest JSON:
///   [{"frame": "f0001.png", "region": "sky", "mask_path": "masks/f0001_sky.png", "score": 0.83}, ...]
/// A record with a null or missing "mask_path" states that the region was not
/// found in that frame. Relative mask paths resolve against the manifest's directory.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "reconeval/core/error.hpp"
#include "reconeval/core/image.hpp"
#include "reconeval/io/byte_stream.hpp"
#include "reconeval/io/png.hpp"

namespace reconeval {

enum class Region { Sky, Water };

[[nodiscard]] constexpr std::string_view region_name(Region r) noexcept { return r == Region::Sky ? "sky" : "water"; }

[[nodiscard]] inline Region region_from_name(std::string_view name) {
    if (name == "sky") return Region::Sky;
    if (name == "water") return Region::Water;
    throw InvalidInputError("unknown region '" + std::string(name) + "' (expected sky or water)");
}

struct RegionMask {
    std::string frame_name;
    Region region = Region::Sky;
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<std::uint8_t> mask;  // 1 = region pixel, row-major
    std::optional<double> detection_score;

    [[nodiscard]] std::size_t count() const noexcept {
        std::size_t n = 0;
        for (const auto m : mask) n += m;
        return n;
    }

    /// Builds a mask from a grayscale raster (>= 128 is region). Empty masks are rejected.
    [[nodiscard]] static RegionMask from_gray(std::string frame_name, Region region, const Image& gray,
                                              std::optional<double> score = std::nullopt) {
        if (gray.channels != 1) throw InvalidInputError("mask raster must be single-channel");
        RegionMask m;
        m.frame_name = std::move(frame_name);
        m.region = region;
        m.width = gray.width;
        m.height = gray.height;
        m.detection_score = score;
        m.mask.resize(gray.data.size());
        for (std::size_t i = 0; i < gray.data.size(); ++i) m.mask[i] = gray.data[i] >= 128 ? 1 : 0;
        if (m.count() == 0) {
            throw InvalidInputError("empty " + std::string(region_name(region)) + " mask for " + m.frame_name);
        }
        if (score && !(*score >= 0.0 && *score <= 1.0)) {
            throw InvalidInputError("mask detection score outside [0,1] for " + m.frame_name);
        }
        return m;
    }
};

struct MaskRecord {
    std::string frame;
    Region region = Region::Sky;
    std::optional<std::filesystem::path> mask_path;  // resolved; empty = region absent
    std::optional<double> score;
};

[[nodiscard]] inline std::vector<MaskRecord> load_mask_manifest(const std::filesystem::path& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file_bytes(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    if (!doc.is_array()) throw FormatError(path.string() + ": mask manifest must be a JSON array");
    std::vector<MaskRecord> out;
    const auto base = path.parent_path();
    for (const auto& rec : doc) {
        MaskRecord m;
        try {
            m.frame = rec.at("frame").get<std::string>();
            m.region = region_from_name(rec.at("region").get<std::string>());
            if (const auto it = rec.find("mask_path"); it != rec.end() && !it->is_null()) {
                std::filesystem::path p = it->get<std::string>();
                m.mask_path = p.is_absolute() ? p : base / p;
            }
            if (const auto it = rec.find("score"); it != rec.end() && !it->is_null()) m.score = it->get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(path.string() + ": malformed mask record: " + e.what());
        }
        out.push_back(std::move(m));
    }
    return out;
}

[[nodiscard]] inline RegionMask load_region_mask(const MaskRecord& rec) {
    if (!rec.mask_path) throw InvalidInputError("mask record for " + rec.frame + " has no mask file");
    return RegionMask::from_gray(rec.frame, rec.region, read_png(*rec.mask_path, 1), rec.score);
}

}  // namespace reconeval
