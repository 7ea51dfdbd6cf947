#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "reconeval/core/error.hpp"

namespace reconeval {

/// Interleaved 8-bit raster, row-major, 1 (gray) or 3 (RGB) channels.
struct Image {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::uint32_t channels = 3;
    std::vector<std::uint8_t> data;

    Image() = default;
    Image(std::uint32_t w, std::uint32_t h, std::uint32_t c, std::uint8_t fill = 0)
        : width(w), height(h), channels(c), data(std::size_t{w} * h * c, fill) {
        if (c != 1 && c != 3) throw InvalidInputError("image must have 1 or 3 channels");
    }

    bool operator==(const Image&) const = default;

    [[nodiscard]] std::size_t pixel_count() const noexcept { return std::size_t{width} * height; }

    [[nodiscard]] std::size_t index(std::uint32_t x, std::uint32_t y, std::uint32_t c = 0) const noexcept {
        return (std::size_t{y} * width + x) * channels + c;
    }
    [[nodiscard]] std::uint8_t at(std::uint32_t x, std::uint32_t y, std::uint32_t c = 0) const noexcept {
        return data[index(x, y, c)];
    }
    [[nodiscard]] std::uint8_t& at(std::uint32_t x, std::uint32_t y, std::uint32_t c = 0) noexcept {
        return data[index(x, y, c)];
    }
};

}  // namespace reconeval
