#pragma once
/// @file byte_stream.hpp
/// @brief Little-endian byte readers/writers and exact text number formatting.

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <vector>

#include "reconeval/core/error.hpp"

namespace reconeval {

[[nodiscard]] inline std::string read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file_bytes(const std::filesystem::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

/// Sequential little-endian reader that reports the byte offset of any truncation.
class ByteReader {
public:
    ByteReader(std::string_view data, std::string name) : data_(data), name_(std::move(name)) {}

    template <typename T>
        requires std::is_arithmetic_v<T>
    [[nodiscard]] T read() {
        using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
                  std::conditional_t<sizeof(T) == 2, std::uint16_t,
                  std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;
        require(sizeof(T));
        U bits = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            bits |= static_cast<U>(static_cast<std::uint8_t>(data_[pos_ + i])) << (8 * i);
        }
        pos_ += sizeof(T);
        return std::bit_cast<T>(bits);
    }

    /// Reads a NUL-terminated byte string (terminator consumed, not returned).
    [[nodiscard]] std::string read_cstring() {
        const auto end = data_.find('\0', pos_);
        if (end == std::string_view::npos) {
            throw ParseError(name_, data_.size(), "unterminated string starting at byte " + std::to_string(pos_));
        }
        std::string s(data_.substr(pos_, end - pos_));
        pos_ = end + 1;
        return s;
    }

    [[nodiscard]] std::size_t offset() const noexcept { return pos_; }
    [[nodiscard]] std::size_t remaining() const noexcept { return data_.size() - pos_; }
    [[nodiscard]] const std::string& name() const noexcept { return name_; }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(name_, pos_, what); }

private:
    void require(std::size_t n) const {
        if (data_.size() - pos_ < n) {
            throw ParseError(name_, pos_, "truncated: need " + std::to_string(n) + " bytes, " +
                                              std::to_string(data_.size() - pos_) + " left");
        }
    }

    std::string_view data_;
    std::string name_;
    std::size_t pos_ = 0;
};

class ByteWriter {
public:
    template <typename T>
        requires std::is_arithmetic_v<T>
    void write(T value) {
        using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
                  std::conditional_t<sizeof(T) == 2, std::uint16_t,
                  std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;
        const auto bits = std::bit_cast<U>(value);
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            out_.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
        }
    }

    void write_cstring(std::string_view s) {
        out_.append(s);
        out_.push_back('\0');
    }

    [[nodiscard]] const std::string& bytes() const noexcept { return out_; }

private:
    std::string out_;
};

/// Shortest decimal representation that parses back to the identical double.
[[nodiscard]] inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, res.ptr};
}

template <typename T>
[[nodiscard]] bool parse_number(std::string_view token, T& out) {
    const auto res = std::from_chars(token.data(), token.data() + token.size(), out);
    return res.ec == std::errc{} && res.ptr == token.data() + token.size();
}

namespace detail {

[[nodiscard]] inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        if (i >= line.size()) break;
        const std::size_t j = line.find_first_of(" \t", i);
        const std::size_t end = j == std::string_view::npos ? line.size() : j;
        out.push_back(line.substr(i, end - i));
        i = end;
    }
    return out;
}

}  // namespace detail

}  // namespace reconeval
