#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace reconeval {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (non-finite value, bad range).
class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// Malformed or truncated binary/text data. `offset` is the byte offset (binary)
/// or 1-based line number (text) at which parsing stopped.
class ParseError : public Error {
public:
    ParseError(std::string file, std::uint64_t offset, const std::string& what)
        : Error(file + " @" + std::to_string(offset) + ": " + what),
          file_(std::move(file)),
          offset_(offset) {}

    [[nodiscard]] const std::string& file() const noexcept { return file_; }
    [[nodiscard]] std::uint64_t offset() const noexcept { return offset_; }

private:
    std::string file_;
    std::uint64_t offset_;
};

class UnsupportedModelError : public Error {
public:
    explicit UnsupportedModelError(const std::string& model)
        : Error("unsupported camera model: " + model), model_(model) {}

    [[nodiscard]] const std::string& model() const noexcept { return model_; }

private:
    std::string model_;
};

/// Referential integrity violated (dangling track, unknown camera, ...).
class IntegrityError : public Error {
public:
    using Error::Error;
};

/// Structurally valid file that does not meet the expected schema.
class FormatError : public Error {
public:
    using Error::Error;
};

class ManifestError : public Error {
public:
    using Error::Error;
};

class DegenerateFeatureError : public Error {
public:
    using Error::Error;
};

class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

/// An operation filtered away every input (e.g. all frames discarded).
class EmptyResultError : public Error {
public:
    using Error::Error;
};

class UnknownFrameError : public Error {
public:
    explicit UnknownFrameError(std::uint32_t frame_id)
        : Error("unknown frame id " + std::to_string(frame_id)), frame_id_(frame_id) {}

    [[nodiscard]] std::uint32_t frame_id() const noexcept { return frame_id_; }

private:
    std::uint32_t frame_id_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace reconeval
