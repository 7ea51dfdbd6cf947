#pragma once
/// @file difps.hpp
/// @brief Feature-space perceptual similarity: cosine similarity of one global
/// embedding per image, with no calibration layer on top.

#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reconeval/core/error.hpp"
#include "reconeval/core/scene.hpp"
#include "reconeval/metrics/feature_store.hpp"

namespace reconeval {

[[nodiscard]] inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DimensionMismatchError("feature dims differ: " + std::to_string(a.size()) + " vs " +
                                     std::to_string(b.size()));
    }
    if (a.empty()) throw DegenerateFeatureError("empty feature vector");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!std::isfinite(a[i]) || !std::isfinite(b[i])) throw InvalidInputError("non-finite feature value");
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (!(na > 0.0) || !(nb > 0.0)) throw DegenerateFeatureError("zero-norm feature vector");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

[[nodiscard]] inline double difps(const FeatureVector& f1, const FeatureVector& f2) {
    try {
        return cosine_similarity(f1.values, f2.values);
    } catch (const DegenerateFeatureError&) {
        throw DegenerateFeatureError("zero-norm feature for '" + f1.image_name + "' or '" + f2.image_name + "'");
    }
}

struct RenderPair {
    FrameId frame_id = 0;
    std::string render_name;
    std::string original_name;
};

struct DifpsSummary {
    std::map<FrameId, double> per_frame;
    std::vector<FrameId> missing;  // no feature for the render or the original
    double mean = 0.0;
};

/// Scores each render against its original; frames lacking either feature are
/// listed in `missing` and left out of the mean.
[[nodiscard]] inline DifpsSummary difps_for_scene(std::span<const RenderPair> pairs, const FeatureStore& render_features,
                                                  const FeatureStore& original_features) {
    DifpsSummary out;
    long double sum = 0.0L;
    for (const auto& p : pairs) {
        const FeatureVector* r = render_features.find(p.render_name);
        const FeatureVector* o = original_features.find(p.original_name);
        if (r == nullptr || o == nullptr) {
            out.missing.push_back(p.frame_id);
            continue;
        }
        const double s = difps(*r, *o);
        out.per_frame[p.frame_id] = s;
        sum += s;
    }
    if (out.per_frame.empty()) {
        throw EmptyResultError("no render/original pair has features on both sides");
    }
    out.mean = static_cast<double>(sum / static_cast<long double>(out.per_frame.size()));
    return out;
}

}  // namespace reconeval
