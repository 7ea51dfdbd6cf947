#pragma once
/// @file scene.hpp
/// @brief Reconstruction data model: cameras, registered frames, points and tracks.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "reconeval/core/camera.hpp"
#include "reconeval/core/error.hpp"

namespace reconeval {

using CameraId = std::uint32_t;
using FrameId = std::uint32_t;
using PointId = std::uint64_t;

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    bool operator==(const Rgb&) const = default;
};

/// One 2D measurement of a 3D point. `keypoint_index` links back to the
/// frame's keypoint list for sparse models and is empty otherwise.
struct Observation {
    FrameId frame_id = 0;
    Eigen::Vector2d pixel = Eigen::Vector2d::Zero();
    std::optional<std::uint32_t> keypoint_index;

    bool operator==(const Observation& o) const {
        return frame_id == o.frame_id && pixel == o.pixel && keypoint_index == o.keypoint_index;
    }
};

struct ScenePoint {
    PointId id = 0;
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    Rgb color;
    double error = 0.0;  // producer-reported mean reprojection error, px
    std::vector<Observation> track;

    bool operator==(const ScenePoint& o) const {
        return id == o.id && position == o.position && color == o.color && error == o.error &&
               track == o.track;
    }
};

/// Detected 2D feature of a frame; untracked keypoints carry no point id.
struct Keypoint {
    Eigen::Vector2d pixel = Eigen::Vector2d::Zero();
    std::optional<PointId> point_id;

    bool operator==(const Keypoint& o) const { return pixel == o.pixel && point_id == o.point_id; }
};

struct FrameRecord {
    FrameId frame_id = 0;
    std::string name;
    CameraId camera_id = 0;
    CameraPose pose;
    std::vector<Keypoint> keypoints;

    bool operator==(const FrameRecord&) const = default;
};

struct ReconstructionScene {
    std::map<CameraId, CameraIntrinsics> cameras;
    std::map<FrameId, FrameRecord> frames;
    std::map<PointId, ScenePoint> points;
    std::uint64_t input_frame_total = 0;

    bool operator==(const ReconstructionScene&) const = default;

    [[nodiscard]] const FrameRecord& frame(FrameId id) const {
        const auto it = frames.find(id);
        if (it == frames.end()) throw UnknownFrameError(id);
        return it->second;
    }

    [[nodiscard]] const CameraIntrinsics& camera_of(const FrameRecord& frame) const {
        const auto it = cameras.find(frame.camera_id);
        if (it == cameras.end()) {
            throw IntegrityError("frame " + std::to_string(frame.frame_id) +
                                 " references missing camera " + std::to_string(frame.camera_id));
        }
        return it->second;
    }
};

/// Checks every referential-integrity rule of the data model; throws
/// IntegrityError (or InvalidInputError for bad intrinsics) on the first violation.
inline void validate_scene(const ReconstructionScene& scene) {
    for (const auto& [id, cam] : scene.cameras) cam.validate();

    for (const auto& [id, frame] : scene.frames) {
        if (frame.frame_id != id) {
            throw IntegrityError("frame key " + std::to_string(id) + " != frame_id " +
                                 std::to_string(frame.frame_id));
        }
        if (!scene.cameras.contains(frame.camera_id)) {
            throw IntegrityError("frame " + std::to_string(id) + " references missing camera " +
                                 std::to_string(frame.camera_id));
        }
        if (std::abs(frame.pose.rotation.norm() - 1.0) > 1e-9) {
            throw IntegrityError("frame " + std::to_string(id) + " has a non-unit quaternion");
        }
        for (const auto& kp : frame.keypoints) {
            if (kp.point_id && !scene.points.contains(*kp.point_id)) {
                throw IntegrityError("frame " + std::to_string(id) +
                                     " keypoint references missing point " +
                                     std::to_string(*kp.point_id));
            }
        }
    }

    for (const auto& [id, point] : scene.points) {
        if (point.id != id) throw IntegrityError("point key mismatch for point " + std::to_string(id));
        std::set<FrameId> seen;
        for (const auto& obs : point.track) {
            const auto fit = scene.frames.find(obs.frame_id);
            if (fit == scene.frames.end()) {
                throw IntegrityError("point " + std::to_string(id) + " track references missing frame " +
                                     std::to_string(obs.frame_id));
            }
            if (!seen.insert(obs.frame_id).second) {
                throw IntegrityError("point " + std::to_string(id) + " observed twice in frame " +
                                     std::to_string(obs.frame_id));
            }
            if (!obs.pixel.allFinite()) {
                throw IntegrityError("point " + std::to_string(id) + " has a non-finite observation");
            }
            if (obs.keypoint_index) {
                const auto& kps = fit->second.keypoints;
                if (*obs.keypoint_index >= kps.size()) {
                    throw IntegrityError("point " + std::to_string(id) +
                                         " track references keypoint " +
                                         std::to_string(*obs.keypoint_index) + " past the end of frame " +
                                         std::to_string(obs.frame_id));
                }
                const auto& kp = kps[*obs.keypoint_index];
                if (kp.point_id != id || kp.pixel != obs.pixel) {
                    throw IntegrityError("point " + std::to_string(id) +
                                         " disagrees with keypoint " +
                                         std::to_string(*obs.keypoint_index) + " of frame " +
                                         std::to_string(obs.frame_id));
                }
            }
        }
    }

    if (scene.input_frame_total < scene.frames.size()) {
        throw IntegrityError("input_frame_total (" + std::to_string(scene.input_frame_total) +
                             ") is smaller than the number of registered frames (" +
                             std::to_string(scene.frames.size()) + ")");
    }
}

}  // namespace reconeval
