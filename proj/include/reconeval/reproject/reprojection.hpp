#pragma once
/// @file reprojection.hpp
/// @brief Per-observation and per-frame reprojection error.

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "reconeval/core/camera.hpp"
#include "reconeval/core/scene.hpp"

namespace reconeval {

/// Euclidean pixel distance between an observed keypoint and the projection of
/// its 3D point. The distance is not squared.
[[nodiscard]] inline double reprojection_error(const Eigen::Vector2d& observed, const Eigen::Vector2d& projected) {
    return std::hypot(observed.x() - projected.x(), observed.y() - projected.y());
}

struct ReprojectionRecord {
    PointId point_id = 0;
    FrameId frame_id = 0;
    Eigen::Vector2d observed = Eigen::Vector2d::Zero();
    std::optional<Eigen::Vector2d> projected;  // empty: behind camera
    std::optional<double> error_px;            // defined iff projected is
};

/// One record per observation of `frame_id`, in ascending point id order.
[[nodiscard]] inline std::vector<ReprojectionRecord> frame_reprojection_records(const ReconstructionScene& scene,
                                                                               FrameId frame_id) {
    const FrameRecord& frame = scene.frame(frame_id);
    const CameraIntrinsics& cam = scene.camera_of(frame);
    std::vector<ReprojectionRecord> out;
    for (const auto& [pid, point] : scene.points) {
        for (const auto& obs : point.track) {
            if (obs.frame_id != frame_id) continue;
            ReprojectionRecord rec;
            rec.point_id = pid;
            rec.frame_id = frame_id;
            rec.observed = obs.pixel;
            rec.projected = project(cam, world_to_camera(frame.pose, point.position));
            if (rec.projected) rec.error_px = reprojection_error(obs.pixel, *rec.projected);
            out.push_back(rec);
        }
    }
    return out;
}

/// Mean reprojection error over the frame's in-front observations; empty when
/// there are none (e.g. dense bundles without tracks).
[[nodiscard]] inline std::optional<double> frame_reprojection_error(const ReconstructionScene& scene,
                                                                    FrameId frame_id) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& rec : frame_reprojection_records(scene, frame_id)) {
        if (!rec.error_px) continue;
        sum += *rec.error_px;
        ++n;
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

}  // namespace reconeval
