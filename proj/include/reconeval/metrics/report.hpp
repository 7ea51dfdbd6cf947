#pragma once
/// @file report.hpp
/// @brief Per-video metric rows and their dataset-level aggregate.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "reconeval/core/error.hpp"

namespace reconeval {

struct VideoMetrics {
    std::string video_id;
    std::optional<double> image_throughput;  // percent
    std::optional<double> reprojection_error_recomputed;
    std::optional<double> reprojection_error_native;
    std::optional<double> point_count_per_image;
    std::optional<double> lpips;
    std::optional<double> difps;
    std::size_t frame_count = 0;  // registered frames, weight for per-frame aggregation

    bool operator==(const VideoMetrics&) const = default;
};

enum class AggregationMode { PerVideo, PerFrame };

[[nodiscard]] constexpr const char* aggregation_name(AggregationMode m) noexcept {
    return m == AggregationMode::PerVideo ? "per_video" : "per_frame";
}

struct MetricsReport {
    AggregationMode mode = AggregationMode::PerVideo;
    std::vector<VideoMetrics> rows;
    VideoMetrics aggregate;
    std::vector<std::string> partial_columns;  // present in some rows only
};

namespace detail {

struct MetricColumn {
    const char* key;
    std::optional<double> VideoMetrics::*field;
};

inline constexpr std::array<MetricColumn, 6> kMetricColumns{{
    {"image_throughput", &VideoMetrics::image_throughput},
    {"reprojection_error_recomputed", &VideoMetrics::reprojection_error_recomputed},
    {"reprojection_error_native", &VideoMetrics::reprojection_error_native},
    {"point_count_per_image", &VideoMetrics::point_count_per_image},
    {"lpips", &VideoMetrics::lpips},
    {"difps", &VideoMetrics::difps},
}};

}  // namespace detail

inline void validate_metrics_row(const VideoMetrics& row) {
    const auto bad = [&](const std::string& what) { throw InvalidInputError("video '" + row.video_id + "': " + what); };
    if (row.image_throughput && !(*row.image_throughput >= 0.0 && *row.image_throughput <= 100.0)) {
        bad("image throughput outside [0,100]");
    }
    if (row.difps && !(std::abs(*row.difps) <= 1.0 + 1e-9)) bad("DiFPS outside [-1,1]");
    if (row.lpips && !(*row.lpips >= 0.0 && *row.lpips <= 1.0)) bad("LPIPS outside [0,1]");
    if (row.point_count_per_image && !(*row.point_count_per_image >= 0.0)) bad("negative point count per image");
    for (const auto* err : {&row.reprojection_error_recomputed, &row.reprojection_error_native}) {
        if (*err && !(**err >= 0.0)) bad("negative reprojection error");
    }
}

/// Aggregates each column over the rows where it is present; absent stays
/// absent. PerVideo weighs rows equally, PerFrame by their frame_count.
[[nodiscard]] inline MetricsReport build_report(std::vector<VideoMetrics> rows,
                                                AggregationMode mode = AggregationMode::PerVideo) {
    if (rows.empty()) throw InvalidInputError("report needs at least one video row");
    for (const auto& r : rows) validate_metrics_row(r);
    MetricsReport report;
    report.mode = mode;
    report.aggregate.video_id = "dataset";
    for (const auto& col : detail::kMetricColumns) {
        long double sum = 0.0L;
        long double weight = 0.0L;
        std::size_t present = 0;
        for (const auto& r : rows) {
            const auto& v = r.*(col.field);
            if (!v) continue;
            const long double w = mode == AggregationMode::PerVideo ? 1.0L : static_cast<long double>(r.frame_count);
            sum += w * *v;
            weight += w;
            ++present;
        }
        if (present > 0 && weight > 0.0L) {
            report.aggregate.*(col.field) = static_cast<double>(sum / weight);
        }
        if (present > 0 && present < rows.size()) report.partial_columns.emplace_back(col.key);
    }
    for (const auto& r : rows) report.aggregate.frame_count += r.frame_count;
    report.rows = std::move(rows);
    return report;
}

[[nodiscard]] inline nlohmann::json metrics_row_json(const VideoMetrics& row) {
    nlohmann::json j;
    j["video_id"] = row.video_id;
    for (const auto& col : detail::kMetricColumns) {
        const auto& v = row.*(col.field);
        j[col.key] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    }
    j["frame_count"] = row.frame_count;
    return j;
}

[[nodiscard]] inline VideoMetrics metrics_row_from_json(const nlohmann::json& j) {
    VideoMetrics row;
    try {
        row.video_id = j.at("video_id").get<std::string>();
        for (const auto& col : detail::kMetricColumns) {
            if (const auto it = j.find(col.key); it != j.end() && !it->is_null()) row.*(col.field) = it->get<double>();
        }
        row.frame_count = j.value("frame_count", std::size_t{0});
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed metrics row: ") + e.what());
    }
    return row;
}

[[nodiscard]] inline nlohmann::json report_json(const MetricsReport& report) {
    nlohmann::json j;
    j["aggregation"] = aggregation_name(report.mode);
    j["rows"] = nlohmann::json::array();
    for (const auto& r : report.rows) j["rows"].push_back(metrics_row_json(r));
    j["aggregate"] = metrics_row_json(report.aggregate);
    j["partial_columns"] = report.partial_columns;
    return j;
}

namespace detail {

[[nodiscard]] inline std::string fmt_cell(const std::optional<double>& v, const char* pattern) {
    if (!v) return "n/a";
    char buf[64];
    std::snprintf(buf, sizeof(buf), pattern, *v);
    return buf;
}

}  // namespace detail

/// Human-readable table. The reprojection column prefers the recomputed value
/// and falls back to the producer-native one, marked "(native)". Aggregates
/// over a subset of rows are marked with '*'.
[[nodiscard]] inline std::string report_markdown(const MetricsReport& report) {
    using detail::fmt_cell;
    const std::array<std::string, 6> header = {"Video", "Image Throughput (%)", "Reprojection Error",
                                               "Point Count per Image", "LPIPS", "DiFPS"};
    const auto partial = [&](const char* key) {
        return std::find(report.partial_columns.begin(), report.partial_columns.end(), key) !=
               report.partial_columns.end();
    };
    const auto make_row = [&](const VideoMetrics& r, bool is_aggregate) {
        const auto mark = [&](std::string cell, const char* key) {
            if (is_aggregate && partial(key) && cell != "n/a") cell += "*";
            return cell;
        };
        std::string reproj;
        if (r.reprojection_error_recomputed) {
            reproj = mark(fmt_cell(r.reprojection_error_recomputed, "%.3f"), "reprojection_error_recomputed");
        } else if (r.reprojection_error_native) {
            reproj = mark(fmt_cell(r.reprojection_error_native, "%.3f"), "reprojection_error_native") + " (native)";
        } else {
            reproj = "n/a";
        }
        return std::array<std::string, 6>{
            is_aggregate ? "Dataset mean" : r.video_id,
            mark(fmt_cell(r.image_throughput, "%.1f%%"), "image_throughput"),
            reproj,
            mark(fmt_cell(r.point_count_per_image, "%.1f"), "point_count_per_image"),
            mark(fmt_cell(r.lpips, "%.3f"), "lpips"),
            mark(fmt_cell(r.difps, "%.3f"), "difps")};
    };
    std::vector<std::array<std::string, 6>> table;
    table.push_back(header);
    for (const auto& r : report.rows) table.push_back(make_row(r, false));
    table.push_back(make_row(report.aggregate, true));

    std::array<std::size_t, 6> width{};
    for (const auto& row : table) {
        for (std::size_t c = 0; c < 6; ++c) width[c] = std::max(width[c], row[c].size());
    }
    std::string out;
    const auto emit = [&](const std::array<std::string, 6>& row) {
        out += "|";
        for (std::size_t c = 0; c < 6; ++c) {
            out += " " + row[c] + std::string(width[c] - row[c].size(), ' ') + " |";
        }
        out += "\n";
    };
    emit(table[0]);
    out += "|";
    for (std::size_t c = 0; c < 6; ++c) out += std::string(width[c] + 2, '-') + "|";
    out += "\n";
    for (std::size_t i = 1; i < table.size(); ++i) emit(table[i]);
    if (!report.partial_columns.empty()) out += "\n\\* aggregated over the videos that report this column\n";
    return out;
}

}  // namespace reconeval
