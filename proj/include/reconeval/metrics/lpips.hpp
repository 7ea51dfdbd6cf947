#pragma once
/// @file lpips.hpp
/// @brief Ingestion of externally computed LPIPS scores.
///
/// Scores file: {"pairs": [{"render": "r/f0001.png", "original": "f0001.png", "lpips": 0.41}, ...]}

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "reconeval/core/error.hpp"
#include "reconeval/io/byte_stream.hpp"

namespace reconeval {

struct LpipsPair {
    std::string render;
    std::string original;
    double score = 0.0;
};

struct LpipsScores {
    std::vector<LpipsPair> pairs;
    std::map<std::string, double> per_frame;  // keyed by original frame name
    double mean = 0.0;
};

[[nodiscard]] inline LpipsScores parse_lpips_json(const nlohmann::json& doc, const std::string& where) {
    LpipsScores out;
    try {
        for (const auto& p : doc.at("pairs")) {
            LpipsPair pair{p.at("render").get<std::string>(), p.at("original").get<std::string>(),
                           p.at("lpips").get<double>()};
            if (!(pair.score >= 0.0 && pair.score <= 1.0)) {
                throw InvalidInputError(where + ": LPIPS score " + std::to_string(pair.score) + " for '" +
                                        pair.original + "' is outside [0,1]");
            }
            if (!out.per_frame.emplace(pair.original, pair.score).second) {
                throw FormatError(where + ": duplicate LPIPS entry for '" + pair.original + "'");
            }
            out.pairs.push_back(std::move(pair));
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(where + ": malformed LPIPS scores: " + e.what());
    }
    if (out.pairs.empty()) throw FormatError(where + ": LPIPS scores file has no pairs");
    long double sum = 0.0L;
    for (const auto& p : out.pairs) sum += p.score;
    out.mean = static_cast<double>(sum / static_cast<long double>(out.pairs.size()));
    return out;
}

[[nodiscard]] inline LpipsScores ingest_lpips(const std::filesystem::path& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file_bytes(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    return parse_lpips_json(doc, path.string());
}

}  // namespace reconeval
