#pragma once

#include <cstdint>

#include "reconeval/core/error.hpp"
#include "reconeval/core/scene.hpp"

namespace reconeval {

/// Percentage of offered frames that the reconstruction used.
[[nodiscard]] inline double image_throughput(std::uint64_t included, std::uint64_t offered) {
    if (offered == 0) throw InvalidInputError("image throughput needs at least one offered frame");
    if (included > offered) throw InvalidInputError("more frames included than offered");
    return 100.0 * static_cast<double>(included) / static_cast<double>(offered);
}

[[nodiscard]] inline double point_count_per_image(const ReconstructionScene& scene) {
    if (scene.frames.empty()) throw InvalidInputError("point count per image needs a registered frame");
    return static_cast<double>(scene.points.size()) / static_cast<double>(scene.frames.size());
}

}  // namespace reconeval
