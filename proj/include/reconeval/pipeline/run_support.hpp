#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "reconeval/core/error.hpp"
#include "reconeval/io/byte_stream.hpp"

namespace reconeval {

/// A failure inside a pipeline stage (as opposed to unusable input). The CLI
/// maps it to exit code 3.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what) : Error(stage + ": " + what), stage_(std::move(stage)) {}

    [[nodiscard]] const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

struct StageFailure {
    std::optional<std::string> frame;
    std::string stage;
    std::string message;
};

[[nodiscard]] inline nlohmann::json failures_json(const std::vector<StageFailure>& failures) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& f : failures) {
        arr.push_back({{"frame", f.frame ? nlohmann::json(*f.frame) : nlohmann::json(nullptr)},
                       {"stage", f.stage},
                       {"message", f.message}});
    }
    return {{"failures", std::move(arr)}};
}

/// Exclusive ownership of an output directory for the lifetime of a run.
class OutputLock {
public:
    explicit OutputLock(const std::filesystem::path& dir) : path_(dir / ".reconeval.lock") {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
        std::FILE* f = std::fopen(path_.string().c_str(), "wx");
        if (f == nullptr) {
            throw IoError("output directory " + dir.string() + " is locked by another run (" + path_.string() + ")");
        }
        std::fclose(f);
    }
    OutputLock(const OutputLock&) = delete;
    OutputLock& operator=(const OutputLock&) = delete;
    ~OutputLock() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }

private:
    std::filesystem::path path_;
};

inline void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
    write_file_bytes(path, doc.dump(2) + "\n");
}

[[nodiscard]] inline bool is_image_file(const std::filesystem::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp" || ext == ".tif" || ext == ".tiff";
}

/// Image files directly inside `dir`, sorted by file name.
[[nodiscard]] inline std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::vector<std::filesystem::path> out;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.is_regular_file() && is_image_file(e.path())) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
    return out;
}

}  // namespace reconeval
