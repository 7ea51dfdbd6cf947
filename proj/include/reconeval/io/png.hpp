#pragma once
/// @file png.hpp
/// @brief 8-bit PNG read/write on top of the libpng simplified API.

#include <png.h>

#include <filesystem>
#include <string>

#include "reconeval/core/error.hpp"
#include "reconeval/core/image.hpp"

namespace reconeval {

/// Reads a PNG converting it to `channels` (1 = gray, 3 = RGB) on the fly.
[[nodiscard]] inline Image read_png(const std::filesystem::path& path, std::uint32_t channels = 3) {
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&png, path.string().c_str())) {
        const std::string msg = png.message;
        png_image_free(&png);
        throw IoError("cannot read PNG " + path.string() + ": " + msg);
    }
    png.format = channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    Image img(png.width, png.height, channels);
    if (!png_image_finish_read(&png, nullptr, img.data.data(), 0, nullptr)) {
        const std::string msg = png.message;
        png_image_free(&png);
        throw IoError("cannot decode PNG " + path.string() + ": " + msg);
    }
    return img;
}

inline void write_png(const std::filesystem::path& path, const Image& img) {
    if (img.width == 0 || img.height == 0) throw InvalidInputError("cannot write empty image");
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    png.width = img.width;
    png.height = img.height;
    png.format = img.channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&png, path.string().c_str(), 0, img.data.data(), 0, nullptr)) {
        const std::string msg = png.message;
        png_image_free(&png);
        throw IoError("cannot write PNG " + path.string() + ": " + msg);
    }
}

}  // namespace reconeval
