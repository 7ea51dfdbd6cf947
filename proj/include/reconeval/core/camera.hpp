#pragma once
/// @file camera.hpp
/// @brief Camera intrinsics, rigid poses and the projection math shared by every module.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "reconeval/core/error.hpp"

namespace reconeval {

// Ids match the sparse binary model format.
enum class CameraModelKind : std::int32_t {
    SimplePinhole = 0,  // f, cx, cy
    Pinhole = 1,        // fx, fy, cx, cy
    SimpleRadial = 2,   // f, cx, cy, k
    Radial = 3,         // f, cx, cy, k1, k2
};

[[nodiscard]] constexpr std::size_t camera_model_num_params(CameraModelKind kind) noexcept {
    switch (kind) {
        case CameraModelKind::SimplePinhole: return 3;
        case CameraModelKind::Pinhole: return 4;
        case CameraModelKind::SimpleRadial: return 4;
        case CameraModelKind::Radial: return 5;
    }
    return 0;
}

[[nodiscard]] constexpr std::size_t camera_model_num_distortion(CameraModelKind kind) noexcept {
    switch (kind) {
        case CameraModelKind::SimpleRadial: return 1;
        case CameraModelKind::Radial: return 2;
        default: return 0;
    }
}

[[nodiscard]] constexpr std::string_view camera_model_name(CameraModelKind kind) noexcept {
    switch (kind) {
        case CameraModelKind::SimplePinhole: return "SIMPLE_PINHOLE";
        case CameraModelKind::Pinhole: return "PINHOLE";
        case CameraModelKind::SimpleRadial: return "SIMPLE_RADIAL";
        case CameraModelKind::Radial: return "RADIAL";
    }
    return "UNKNOWN";
}

[[nodiscard]] inline CameraModelKind camera_model_from_id(std::int64_t id) {
    if (id < 0 || id > 3) {
        throw UnsupportedModelError("model id " + std::to_string(id));
    }
    return static_cast<CameraModelKind>(id);
}

[[nodiscard]] inline CameraModelKind camera_model_from_name(std::string_view name) {
    for (std::int32_t id = 0; id <= 3; ++id) {
        const auto kind = static_cast<CameraModelKind>(id);
        if (camera_model_name(kind) == name) return kind;
    }
    throw UnsupportedModelError(std::string(name));
}

/// Pinhole projection with optional polynomial radial distortion.
struct CameraIntrinsics {
    CameraModelKind model_kind = CameraModelKind::Pinhole;
    std::uint64_t width = 0;
    std::uint64_t height = 0;
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    std::vector<double> distortion;

    bool operator==(const CameraIntrinsics&) const = default;

    /// Builds intrinsics from the flat parameter list of the sparse model format.
    [[nodiscard]] static CameraIntrinsics from_params(CameraModelKind kind, std::uint64_t width,
                                                      std::uint64_t height,
                                                      std::span<const double> params) {
        if (params.size() != camera_model_num_params(kind)) {
            throw InvalidInputError(std::string(camera_model_name(kind)) + " expects " +
                                    std::to_string(camera_model_num_params(kind)) +
                                    " params, got " + std::to_string(params.size()));
        }
        CameraIntrinsics intr;
        intr.model_kind = kind;
        intr.width = width;
        intr.height = height;
        if (kind == CameraModelKind::Pinhole) {
            intr.fx = params[0];
            intr.fy = params[1];
            intr.cx = params[2];
            intr.cy = params[3];
        } else {
            intr.fx = intr.fy = params[0];
            intr.cx = params[1];
            intr.cy = params[2];
            intr.distortion.assign(params.begin() + 3, params.end());
        }
        intr.validate();
        return intr;
    }

    [[nodiscard]] std::vector<double> params() const {
        std::vector<double> out;
        if (model_kind == CameraModelKind::Pinhole) {
            out = {fx, fy, cx, cy};
        } else {
            out = {fx, cx, cy};
            out.insert(out.end(), distortion.begin(), distortion.end());
        }
        return out;
    }

    void validate() const {
        if (width == 0 || height == 0) throw InvalidInputError("camera width/height must be > 0");
        if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy)) {
            throw InvalidInputError("camera focal lengths must be finite and > 0");
        }
        if (!std::isfinite(cx) || !std::isfinite(cy)) {
            throw InvalidInputError("camera principal point must be finite");
        }
        if (distortion.size() != camera_model_num_distortion(model_kind)) {
            throw InvalidInputError("distortion length does not match " +
                                    std::string(camera_model_name(model_kind)));
        }
        for (const double k : distortion) {
            if (!std::isfinite(k)) throw InvalidInputError("distortion must be finite");
        }
        const bool single_focal = model_kind == CameraModelKind::SimplePinhole ||
                                  model_kind == CameraModelKind::SimpleRadial ||
                                  model_kind == CameraModelKind::Radial;
        if (single_focal && fx != fy) {
            throw InvalidInputError(std::string(camera_model_name(model_kind)) +
                                    " requires fx == fy");
        }
    }
};

/// Unit quaternion, scalar first.
struct Quaternion {
    double w = 1.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool operator==(const Quaternion&) const = default;

    [[nodiscard]] double norm() const noexcept { return std::sqrt(w * w + x * x + y * y + z * z); }
    [[nodiscard]] bool is_finite() const noexcept {
        return std::isfinite(w) && std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
    [[nodiscard]] Quaternion conjugate() const noexcept { return {w, -x, -y, -z}; }

    /// Rescales to unit norm. Already-normalized input is returned bit-for-bit
    /// so that load/save cycles are stable.
    [[nodiscard]] Quaternion normalized() const {
        const double n = norm();
        if (!is_finite() || !(n > 0.0)) throw InvalidInputError("quaternion is zero or non-finite");
        if (std::abs(n - 1.0) <= 1e-12) return *this;
        return {w / n, x / n, y / n, z / n};
    }
};

[[nodiscard]] inline Quaternion operator*(const Quaternion& a, const Quaternion& b) noexcept {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

[[nodiscard]] inline Eigen::Matrix3d quat_to_matrix(const Quaternion& q) {
    if (!q.is_finite()) throw InvalidInputError("quaternion is non-finite");
    const double n = q.norm();
    if (!(n > 0.0)) throw InvalidInputError("quaternion is zero");
    if (std::abs(n - 1.0) > 1e-6) {
        throw InvalidInputError("quaternion is not unit length (|q| = " + std::to_string(n) + ")");
    }
    const double w = q.w / n, x = q.x / n, y = q.y / n, z = q.z / n;
    Eigen::Matrix3d r;
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
         2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
         2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return r;
}

/// Rotation matrix to unit quaternion (Shepperd's method), w >= 0.
[[nodiscard]] inline Quaternion matrix_to_quat(const Eigen::Matrix3d& r) {
    const double trace = r.trace();
    Quaternion q;
    if (trace > 0.0) {
        const double s = 2.0 * std::sqrt(1.0 + trace);
        q = {0.25 * s, (r(2, 1) - r(1, 2)) / s, (r(0, 2) - r(2, 0)) / s, (r(1, 0) - r(0, 1)) / s};
    } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
        const double s = 2.0 * std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2));
        q = {(r(2, 1) - r(1, 2)) / s, 0.25 * s, (r(0, 1) + r(1, 0)) / s, (r(0, 2) + r(2, 0)) / s};
    } else if (r(1, 1) > r(2, 2)) {
        const double s = 2.0 * std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2));
        q = {(r(0, 2) - r(2, 0)) / s, (r(0, 1) + r(1, 0)) / s, 0.25 * s, (r(1, 2) + r(2, 1)) / s};
    } else {
        const double s = 2.0 * std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1));
        q = {(r(1, 0) - r(0, 1)) / s, (r(0, 2) + r(2, 0)) / s, (r(1, 2) + r(2, 1)) / s, 0.25 * s};
    }
    if (q.w < 0.0) q = {-q.w, -q.x, -q.y, -q.z};
    return q.normalized();
}

/// World-to-camera rigid transform: X_cam = R(rotation) * X_world + translation.
struct CameraPose {
    Quaternion rotation;
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    bool operator==(const CameraPose& other) const {
        return rotation == other.rotation && translation == other.translation;
    }

    [[nodiscard]] static CameraPose identity() { return {}; }

    [[nodiscard]] CameraPose inverse() const {
        const Quaternion inv = rotation.conjugate();
        return {inv, -(quat_to_matrix(inv) * translation)};
    }

    /// Camera center in world coordinates.
    [[nodiscard]] Eigen::Vector3d center() const {
        return -(quat_to_matrix(rotation).transpose() * translation);
    }
};

[[nodiscard]] inline Eigen::Vector3d world_to_camera(const CameraPose& pose,
                                                     const Eigen::Vector3d& world) {
    if (!world.allFinite()) throw InvalidInputError("world point is non-finite");
    return quat_to_matrix(pose.rotation) * world + pose.translation;
}

namespace detail {

[[nodiscard]] inline double radial_factor(const CameraIntrinsics& intr, double r2) noexcept {
    switch (intr.model_kind) {
        case CameraModelKind::SimpleRadial: return 1.0 + intr.distortion[0] * r2;
        case CameraModelKind::Radial:
            return 1.0 + intr.distortion[0] * r2 + intr.distortion[1] * r2 * r2;
        default: return 1.0;
    }
}

}  // namespace detail

/// Projects a camera-frame point to pixels. Returns nullopt when the point is
/// on or behind the image plane (z <= 0).
[[nodiscard]] inline std::optional<Eigen::Vector2d> project(const CameraIntrinsics& intr,
                                                            const Eigen::Vector3d& cam) {
    if (!cam.allFinite()) throw InvalidInputError("camera-frame point is non-finite");
    if (cam.z() <= 0.0) return std::nullopt;
    const double x = cam.x() / cam.z();
    const double y = cam.y() / cam.z();
    const double f = detail::radial_factor(intr, x * x + y * y);
    return Eigen::Vector2d(intr.fx * x * f + intr.cx, intr.fy * y * f + intr.cy);
}

/// Inverse of project() at a given depth. Radial models are undistorted by
/// fixed-point iteration, which converges for the mild distortion SfM tools report.
[[nodiscard]] inline Eigen::Vector3d back_project(const CameraIntrinsics& intr,
                                                  const Eigen::Vector2d& pixel, double depth) {
    const double xd = (pixel.x() - intr.cx) / intr.fx;
    const double yd = (pixel.y() - intr.cy) / intr.fy;
    double x = xd;
    double y = yd;
    if (camera_model_num_distortion(intr.model_kind) > 0) {
        for (int iter = 0; iter < 100; ++iter) {
            const double f = detail::radial_factor(intr, x * x + y * y);
            const double nx = xd / f;
            const double ny = yd / f;
            const bool done = std::abs(nx - x) < 1e-15 && std::abs(ny - y) < 1e-15;
            x = nx;
            y = ny;
            if (done) break;
        }
    }
    return {x * depth, y * depth, depth};
}

}  // namespace reconeval
