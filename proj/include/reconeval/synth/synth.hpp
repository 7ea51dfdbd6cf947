#pragma once
/// @file synth.hpp
/// @brief Seeded synthetic reconstructions with exact observations, plus
/// controlled observation perturbations. Used as ground truth for the geometry,
/// renderer and parser tests.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <random>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "reconeval/core/camera.hpp"
#include "reconeval/core/error.hpp"
#include "reconeval/core/scene.hpp"
#include "reconeval/reproject/reprojection.hpp"

namespace reconeval {

/// Platform-independent random source: mt19937_64 output is fixed by the
/// standard, the distributions below are ours (std:: distributions are not).
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::uint64_t next_u64() { return engine_(); }

    /// Standard normal via Box-Muller.
    double normal() {
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform(0.0, 1.0);
        const double u2 = uniform(0.0, 1.0);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 engine_;
};

enum class NoiseKind { None, Offset, Gaussian };

struct ObservationNoise {
    NoiseKind kind = NoiseKind::None;
    Eigen::Vector2d offset = Eigen::Vector2d::Zero();  // px, NoiseKind::Offset
    double sigma = 0.0;                                // px per axis, NoiseKind::Gaussian
};

struct SynthSpec {
    std::size_t num_points = 100;
    std::size_t num_cameras = 3;
    CameraModelKind model = CameraModelKind::Pinhole;
    std::uint32_t width = 640;
    std::uint32_t height = 480;
    double focal_min = 400.0;
    double focal_max = 600.0;
    double distortion_max = 0.05;  // |k| bound for radial models
    Eigen::Vector3d box_min{-1.0, -1.0, -1.0};
    Eigen::Vector3d box_max{1.0, 1.0, 1.0};
    double camera_distance = 6.0;  // from the box centre
    std::size_t untracked_keypoints = 0;  // extra keypoints per frame with no 3D point
    ObservationNoise noise;
    std::uint64_t seed = 0;
};

namespace detail {

/// Pose of a camera at `center` looking at `target`, image y pointing "down"
/// relative to world +z.
[[nodiscard]] inline CameraPose look_at(const Eigen::Vector3d& center, const Eigen::Vector3d& target) {
    const Eigen::Vector3d z = (target - center).normalized();
    Eigen::Vector3d up(0.0, 0.0, 1.0);
    if (std::abs(z.dot(up)) > 0.999) up = Eigen::Vector3d(0.0, 1.0, 0.0);
    const Eigen::Vector3d x = z.cross(up).normalized();
    const Eigen::Vector3d y = z.cross(x);
    Eigen::Matrix3d r;
    r.row(0) = x.transpose();
    r.row(1) = y.transpose();
    r.row(2) = z.transpose();
    const Quaternion q = matrix_to_quat(r);
    return {q, -(quat_to_matrix(q) * center)};
}

inline void refresh_point_errors(ReconstructionScene& scene) {
    for (auto& [pid, point] : scene.points) {
        if (point.track.empty()) continue;
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& obs : point.track) {
            const auto& frame = scene.frames.at(obs.frame_id);
            const auto uv = project(scene.camera_of(frame), world_to_camera(frame.pose, point.position));
            if (!uv) continue;
            sum += reprojection_error(obs.pixel, *uv);
            ++n;
        }
        point.error = n == 0 ? 0.0 : sum / static_cast<double>(n);
    }
}

template <typename Shift>
void shift_observations(ReconstructionScene& scene, Shift&& shift) {
    for (auto& [pid, point] : scene.points) {
        for (auto& obs : point.track) {
            obs.pixel += shift();
            if (obs.keypoint_index) scene.frames.at(obs.frame_id).keypoints[*obs.keypoint_index].pixel = obs.pixel;
        }
    }
    refresh_point_errors(scene);
}

}  // namespace detail

/// Shifts every observation by a fixed pixel offset.
[[nodiscard]] inline ReconstructionScene perturb_observations(ReconstructionScene scene, const Eigen::Vector2d& offset) {
    if (!offset.allFinite()) throw InvalidInputError("offset must be finite");
    detail::shift_observations(scene, [&] { return offset; });
    return scene;
}

/// Adds independent N(0, sigma^2) noise to both coordinates of every observation,
/// in ascending point id / track order.
[[nodiscard]] inline ReconstructionScene perturb_observations_gaussian(ReconstructionScene scene, double sigma,
                                                                      std::uint64_t seed) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidInputError("sigma must be finite and >= 0");
    SeededRng rng(seed);
    detail::shift_observations(scene, [&] {
        const double dx = sigma * rng.normal();
        const double dy = sigma * rng.normal();
        return Eigen::Vector2d(dx, dy);
    });
    return scene;
}

[[nodiscard]] inline ReconstructionScene generate_scene(const SynthSpec& spec) {
    if (spec.num_cameras == 0 && spec.num_points > 0) {
        throw InvalidInputError("infeasible synth spec: points need at least one camera to be observed");
    }
    if (spec.width == 0 || spec.height == 0) throw InvalidInputError("synth image size must be positive");
    if (!(spec.focal_min > 0.0) || spec.focal_max < spec.focal_min) throw InvalidInputError("bad focal range");
    if (!(spec.distortion_max >= 0.0)) throw InvalidInputError("distortion bound must be >= 0");
    if ((spec.box_max - spec.box_min).minCoeff() < 0.0) throw InvalidInputError("point box is inverted");
    const Eigen::Vector3d target = 0.5 * (spec.box_min + spec.box_max);
    const double half_diagonal = 0.5 * (spec.box_max - spec.box_min).norm();
    if (!(spec.camera_distance > half_diagonal)) {
        throw InvalidInputError("infeasible synth spec: cameras must sit outside the point box");
    }
    if (spec.noise.kind == NoiseKind::Gaussian && !(spec.noise.sigma >= 0.0)) {
        throw InvalidInputError("sigma must be >= 0");
    }

    SeededRng rng(spec.seed);
    ReconstructionScene scene;
    for (std::size_t k = 0; k < spec.num_cameras; ++k) {
        const auto id = static_cast<CameraId>(k + 1);
        const double f = rng.uniform(spec.focal_min, spec.focal_max);
        const double cx = 0.5 * spec.width + rng.uniform(-2.0, 2.0);
        const double cy = 0.5 * spec.height + rng.uniform(-2.0, 2.0);
        std::vector<double> params;
        switch (spec.model) {
            case CameraModelKind::SimplePinhole: params = {f, cx, cy}; break;
            case CameraModelKind::Pinhole: params = {f, rng.uniform(spec.focal_min, spec.focal_max), cx, cy}; break;
            case CameraModelKind::SimpleRadial:
                params = {f, cx, cy, rng.uniform(-spec.distortion_max, spec.distortion_max)};
                break;
            case CameraModelKind::Radial:
                params = {f, cx, cy, rng.uniform(-spec.distortion_max, spec.distortion_max),
                          rng.uniform(-spec.distortion_max, spec.distortion_max)};
                break;
        }
        scene.cameras.emplace(id, CameraIntrinsics::from_params(spec.model, spec.width, spec.height, params));

        // Fly-over viewpoints: elevation 30-80 degrees above the target.
        const double azimuth = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double elevation = rng.uniform(std::numbers::pi / 6.0, 4.0 * std::numbers::pi / 9.0);
        const Eigen::Vector3d dir(std::cos(elevation) * std::cos(azimuth), std::cos(elevation) * std::sin(azimuth),
                                  std::sin(elevation));
        FrameRecord frame;
        frame.frame_id = id;
        char name[32];
        std::snprintf(name, sizeof(name), "synth_%04zu.png", k + 1);
        frame.name = name;
        frame.camera_id = id;
        frame.pose = detail::look_at(target + spec.camera_distance * dir, target);
        scene.frames.emplace(id, std::move(frame));
    }

    for (std::size_t i = 0; i < spec.num_points; ++i) {
        ScenePoint p;
        p.id = static_cast<PointId>(i + 1);
        for (int a = 0; a < 3; ++a) p.position[a] = rng.uniform(spec.box_min[a], spec.box_max[a]);
        p.color = {static_cast<std::uint8_t>(rng.next_u64() & 0xFF), static_cast<std::uint8_t>(rng.next_u64() & 0xFF),
                   static_cast<std::uint8_t>(rng.next_u64() & 0xFF)};
        for (auto& [fid, frame] : scene.frames) {
            const auto uv = project(scene.camera_of(frame), world_to_camera(frame.pose, p.position));
            if (!uv) throw Error("synthetic point landed behind a camera");  // excluded by the distance check
            const auto idx = static_cast<std::uint32_t>(frame.keypoints.size());
            frame.keypoints.push_back({*uv, p.id});
            p.track.push_back({fid, *uv, idx});
        }
        scene.points.emplace(p.id, std::move(p));
    }

    for (auto& [fid, frame] : scene.frames) {
        for (std::size_t k = 0; k < spec.untracked_keypoints; ++k) {
            frame.keypoints.push_back(
                {Eigen::Vector2d(rng.uniform(0.0, spec.width), rng.uniform(0.0, spec.height)), std::nullopt});
        }
    }
    scene.input_frame_total = scene.frames.size();

    switch (spec.noise.kind) {
        case NoiseKind::None: break;
        case NoiseKind::Offset: scene = perturb_observations(std::move(scene), spec.noise.offset); break;
        case NoiseKind::Gaussian:
            scene = perturb_observations_gaussian(std::move(scene), spec.noise.sigma, spec.seed ^ 0x9E3779B97F4A7C15ULL);
            break;
    }
    validate_scene(scene);
    return scene;
}

}  // namespace reconeval
