#pragma once

#include <map>
#include <optional>
#include <string>

#include "reconeval/core/scene.hpp"

namespace reconeval {

enum class SourceKind { SparseSfM, GenericDense };

[[nodiscard]] constexpr const char* source_kind_name(SourceKind kind) noexcept {
    return kind == SourceKind::SparseSfM ? "sparse_sfm" : "generic_dense";
}

/// A parsed reconstruction plus what its producer reported about it.
struct ModelBundle {
    SourceKind source_kind = SourceKind::SparseSfM;
    ReconstructionScene scene;
    // Producer-reported mean reprojection error per frame, px.
    std::optional<std::map<FrameId, double>> native_reprojection_errors;

    bool operator==(const ModelBundle&) const = default;
};

inline void validate_bundle(const ModelBundle& bundle) {
    validate_scene(bundle.scene);
    if (!bundle.native_reprojection_errors) return;
    for (const auto& [frame_id, err] : *bundle.native_reprojection_errors) {
        if (!bundle.scene.frames.contains(frame_id)) {
            throw IntegrityError("native error reported for unregistered frame " + std::to_string(frame_id));
        }
        if (!(err >= 0.0)) {
            throw IntegrityError("native error for frame " + std::to_string(frame_id) + " is negative or NaN");
        }
    }
}

/// Per-frame producer error of a sparse model: the mean of the stored per-point
/// errors over points whose track includes the frame.
[[nodiscard]] inline std::map<FrameId, double> sparse_native_errors(const ReconstructionScene& scene) {
    std::map<FrameId, std::pair<double, std::size_t>> acc;
    for (const auto& [id, point] : scene.points) {
        for (const auto& obs : point.track) {
            auto& [sum, n] = acc[obs.frame_id];
            sum += point.error;
            ++n;
        }
    }
    std::map<FrameId, double> out;
    for (const auto& [frame_id, sn] : acc) out[frame_id] = sn.first / static_cast<double>(sn.second);
    return out;
}

[[nodiscard]] inline ModelBundle make_sparse_bundle(ReconstructionScene scene) {
    ModelBundle bundle;
    bundle.source_kind = SourceKind::SparseSfM;
    bundle.native_reprojection_errors = sparse_native_errors(scene);
    bundle.scene = std::move(scene);
    return bundle;
}

}  // namespace reconeval
