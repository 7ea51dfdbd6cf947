#pragma once
/// @file render.hpp
/// @brief Reprojection renderer: every point becomes a filled disk in the frame's
/// estimated camera, nearest point wins per pixel.
///
/// Pixel (i, j) is column i, row j and its centre sits at continuous coordinate
/// (i, j), the same frame project() returns. A point is splatted when it lies in
/// front of the camera and its projected centre rounds to a pixel inside the
/// image; pixel (i, j) is painted iff (i - u)^2 + (j - v)^2 <= radius^2 with the
/// centre (u, v) left unrounded. Per pixel the smallest camera-space depth wins,
/// ties go to the smaller point id.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "reconeval/core/camera.hpp"
#include "reconeval/core/error.hpp"
#include "reconeval/core/image.hpp"
#include "reconeval/core/parallel.hpp"
#include "reconeval/core/scene.hpp"

namespace reconeval {

struct RenderOptions {
    double splat_radius = 3.0;
    Rgb background{0, 0, 0};
};

struct RenderStats {
    std::size_t points_rendered = 0;
    std::size_t points_behind_camera = 0;
    std::size_t points_outside_image = 0;
    std::size_t covered_pixels = 0;

    bool operator==(const RenderStats&) const = default;
};

struct RenderedImage {
    FrameId frame_id = 0;
    RenderOptions options;
    Image color;                        // RGB
    std::vector<std::uint8_t> covered;  // 1 where some splat won the pixel
    std::vector<double> depth;          // +inf where uncovered
    std::vector<PointId> owner;         // winning point id where covered
    RenderStats stats;

    [[nodiscard]] std::uint32_t width() const noexcept { return color.width; }
    [[nodiscard]] std::uint32_t height() const noexcept { return color.height; }
    [[nodiscard]] double coverage_fraction() const noexcept {
        const auto n = color.pixel_count();
        return n == 0 ? 0.0 : static_cast<double>(stats.covered_pixels) / static_cast<double>(n);
    }
};

[[nodiscard]] inline RenderedImage render_reprojection(const ReconstructionScene& scene, FrameId frame_id,
                                                       const RenderOptions& options = {}) {
    if (!(options.splat_radius >= 0.0) || !std::isfinite(options.splat_radius)) {
        throw InvalidInputError("splat radius must be finite and >= 0");
    }
    const FrameRecord& frame = scene.frame(frame_id);
    const CameraIntrinsics& cam = scene.camera_of(frame);
    if (cam.width > std::numeric_limits<std::uint32_t>::max() || cam.height > std::numeric_limits<std::uint32_t>::max()) {
        throw InvalidInputError("camera too large to render");
    }
    const auto w = static_cast<std::uint32_t>(cam.width);
    const auto h = static_cast<std::uint32_t>(cam.height);

    RenderedImage out;
    out.frame_id = frame_id;
    out.options = options;
    out.color = Image(w, h, 3);
    for (std::size_t i = 0; i < out.color.pixel_count(); ++i) {
        out.color.data[3 * i] = options.background.r;
        out.color.data[3 * i + 1] = options.background.g;
        out.color.data[3 * i + 2] = options.background.b;
    }
    out.covered.assign(out.color.pixel_count(), 0);
    out.depth.assign(out.color.pixel_count(), std::numeric_limits<double>::infinity());
    out.owner.assign(out.color.pixel_count(), 0);

    const double r = options.splat_radius;
    const double r2 = r * r;
    for (const auto& [pid, point] : scene.points) {
        const Eigen::Vector3d xc = world_to_camera(frame.pose, point.position);
        const auto uv = project(cam, xc);
        if (!uv) {
            ++out.stats.points_behind_camera;
            continue;
        }
        const double u = uv->x();
        const double v = uv->y();
        if (!(u >= -0.5 && u < w - 0.5 && v >= -0.5 && v < h - 0.5)) {
            ++out.stats.points_outside_image;
            continue;
        }
        ++out.stats.points_rendered;
        const double z = xc.z();
        const auto i0 = static_cast<std::int64_t>(std::max(0.0, std::ceil(u - r)));
        const auto i1 = static_cast<std::int64_t>(std::min<double>(w - 1, std::floor(u + r)));
        const auto j0 = static_cast<std::int64_t>(std::max(0.0, std::ceil(v - r)));
        const auto j1 = static_cast<std::int64_t>(std::min<double>(h - 1, std::floor(v + r)));
        for (std::int64_t j = j0; j <= j1; ++j) {
            const double dv = static_cast<double>(j) - v;
            for (std::int64_t i = i0; i <= i1; ++i) {
                const double du = static_cast<double>(i) - u;
                if (du * du + dv * dv > r2) continue;
                const auto idx = static_cast<std::size_t>(j) * w + static_cast<std::size_t>(i);
                const bool wins = !out.covered[idx] || z < out.depth[idx] ||
                                  (z == out.depth[idx] && pid < out.owner[idx]);
                if (!wins) continue;
                out.covered[idx] = 1;
                out.depth[idx] = z;
                out.owner[idx] = pid;
                out.color.data[3 * idx] = point.color.r;
                out.color.data[3 * idx + 1] = point.color.g;
                out.color.data[3 * idx + 2] = point.color.b;
            }
        }
    }
    for (const auto c : out.covered) out.stats.covered_pixels += c;
    return out;
}

/// Renders every registered frame. Output is identical for any worker count.
[[nodiscard]] inline std::map<FrameId, RenderedImage> render_all(const ReconstructionScene& scene,
                                                                 const RenderOptions& options = {},
                                                                 unsigned workers = 1) {
    std::vector<FrameId> ids;
    ids.reserve(scene.frames.size());
    for (const auto& [id, frame] : scene.frames) ids.push_back(id);
    std::vector<RenderedImage> renders(ids.size());
    parallel_for(ids.size(), workers, [&](std::size_t k) {
        try {
            renders[k] = render_reprojection(scene, ids[k], options);
        } catch (const std::exception& e) {
            throw Error("render of frame " + std::to_string(ids[k]) + " failed: " + e.what());
        }
    });
    std::map<FrameId, RenderedImage> out;
    for (std::size_t k = 0; k < ids.size(); ++k) out.emplace(ids[k], std::move(renders[k]));
    return out;
}

/// Sidecar metadata written next to each rendered PNG.
[[nodiscard]] inline nlohmann::json render_metadata_json(const RenderedImage& img) {
    return {{"frame_id", img.frame_id},
            {"splat_radius", img.options.splat_radius},
            {"background", {img.options.background.r, img.options.background.g, img.options.background.b}},
            {"points_rendered", img.stats.points_rendered},
            {"points_behind_camera", img.stats.points_behind_camera},
            {"points_outside_image", img.stats.points_outside_image},
            {"coverage_fraction", img.coverage_fraction()}};
}

}  // namespace reconeval
