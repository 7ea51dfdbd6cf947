#pragma once
/// @file normalize.hpp
/// @brief Photometric pre-processing of extracted frames: fixed contrast gain and
/// background-region white balance.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "reconeval/core/error.hpp"
#include "reconeval/core/image.hpp"
#include "reconeval/core/parallel.hpp"
#include "reconeval/preprocess/region_mask.hpp"

namespace reconeval {

inline constexpr double kDefaultContrastAlpha = 1.8;

namespace detail {

[[nodiscard]] inline std::uint8_t round_clamp_u8(double v) noexcept {
    const double r = std::floor(v + 0.5);
    return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

}  // namespace detail

/// Pure gain, out = clamp(round(alpha * in), 0, 255) per channel value.
[[nodiscard]] inline Image contrast_adjust(const Image& image, double alpha = kDefaultContrastAlpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidInputError("contrast alpha must be finite and > 0");
    Image out = image;
    std::array<std::uint8_t, 256> lut{};
    for (int p = 0; p < 256; ++p) lut[static_cast<std::size_t>(p)] = detail::round_clamp_u8(alpha * p);
    for (auto& v : out.data) v = lut[v];
    return out;
}

struct RegionStats {
    std::array<double, 3> mean{};  // R, G, B
    std::size_t pixel_count = 0;
};

[[nodiscard]] inline RegionStats region_stats(const Image& image, const RegionMask& mask) {
    if (image.channels != 3) throw InvalidInputError("region_stats expects an RGB image");
    if (image.width != mask.width || image.height != mask.height) {
        throw DimensionMismatchError("mask " + std::to_string(mask.width) + "x" + std::to_string(mask.height) +
                                     " does not match frame " + std::to_string(image.width) + "x" +
                                     std::to_string(image.height) + " (" + mask.frame_name + ")");
    }
    std::array<std::uint64_t, 3> sum{};
    RegionStats s;
    for (std::size_t i = 0; i < mask.mask.size(); ++i) {
        if (!mask.mask[i]) continue;
        for (std::size_t c = 0; c < 3; ++c) sum[c] += image.data[3 * i + c];
        ++s.pixel_count;
    }
    if (s.pixel_count == 0) throw InvalidInputError("empty mask for " + mask.frame_name);
    for (std::size_t c = 0; c < 3; ++c) s.mean[c] = static_cast<double>(sum[c]) / static_cast<double>(s.pixel_count);
    return s;
}

/// Per-channel gain `scale`, rounded half-up and clamped to [0, 255].
[[nodiscard]] inline Image apply_channel_gain(const Image& image, const std::array<double, 3>& scale) {
    Image out = image;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] = detail::round_clamp_u8(scale[i % 3] * out.data[i]);
    }
    return out;
}

struct WhiteBalanceInput {
    std::string name;
    Image image;
    std::vector<RegionMask> masks;  // any regions; the requested one is picked
};

struct NormalizedFrame {
    std::string name;
    Image image;
    RegionStats region;           // before normalization
    std::array<double, 3> scale{};  // target / region mean per channel
};

struct DiscardedFrame {
    std::string name;
    std::string reason;
};

struct WhiteBalanceResult {
    Region region = Region::Sky;
    std::array<double, 3> target_mean{};  // cross-frame region mean per channel
    std::vector<NormalizedFrame> frames;
    std::vector<DiscardedFrame> discarded;
};

/// Background-region white balance. Frames without a mask of `region` are
/// discarded; so are frames whose region mean is zero in some channel, since
/// no gain can lift them. The target mean is the unweighted mean of the
/// surviving frames' region means, and each survivor is scaled per channel by
/// target / own mean.
[[nodiscard]] inline WhiteBalanceResult white_balance(std::span<const WhiteBalanceInput> inputs, Region region,
                                                      unsigned workers = 1) {
    WhiteBalanceResult result;
    result.region = region;

    std::vector<const RegionMask*> picked(inputs.size(), nullptr);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        for (const auto& m : inputs[i].masks) {
            if (m.region == region) {
                picked[i] = &m;
                break;
            }
        }
    }

    std::vector<RegionStats> stats(inputs.size());
    parallel_for(inputs.size(), workers, [&](std::size_t i) {
        if (picked[i]) stats[i] = region_stats(inputs[i].image, *picked[i]);
    });

    std::vector<std::size_t> survivors;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (!picked[i]) {
            result.discarded.push_back({inputs[i].name, "no " + std::string(region_name(region)) + " region"});
        } else if (std::any_of(stats[i].mean.begin(), stats[i].mean.end(), [](double m) { return m <= 0.0; })) {
            result.discarded.push_back({inputs[i].name, "region mean is zero in some channel"});
        } else {
            survivors.push_back(i);
        }
    }
    if (survivors.empty()) {
        throw EmptyResultError("white balance (" + std::string(region_name(region)) +
                               "): every frame was discarded");
    }

    for (const auto i : survivors) {
        for (std::size_t c = 0; c < 3; ++c) result.target_mean[c] += stats[i].mean[c];
    }
    for (auto& m : result.target_mean) m /= static_cast<double>(survivors.size());

    result.frames.resize(survivors.size());
    parallel_for(survivors.size(), workers, [&](std::size_t k) {
        const auto i = survivors[k];
        NormalizedFrame& nf = result.frames[k];
        nf.name = inputs[i].name;
        nf.region = stats[i];
        for (std::size_t c = 0; c < 3; ++c) nf.scale[c] = result.target_mean[c] / stats[i].mean[c];
        nf.image = apply_channel_gain(inputs[i].image, nf.scale);
    });
    return result;
}

}  // namespace reconeval
