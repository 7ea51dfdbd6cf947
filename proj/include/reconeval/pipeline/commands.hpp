#pragma once
/// @file commands.hpp
/// @brief The end-to-end pipeline steps behind each CLI subcommand.
///
/// Every command reads only its inputs and writes only under its output
/// directory, which it locks for the duration of the run. Identical inputs
/// produce byte-identical outputs regardless of the worker count.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "reconeval/core/parallel.hpp"
#include "reconeval/io/dense_model.hpp"
#include "reconeval/io/manifest.hpp"
#include "reconeval/io/png.hpp"
#include "reconeval/io/sparse_model.hpp"
#include "reconeval/metrics/difps.hpp"
#include "reconeval/metrics/lpips.hpp"
#include "reconeval/metrics/report.hpp"
#include "reconeval/metrics/scene_metrics.hpp"
#include "reconeval/pipeline/run_support.hpp"
#include "reconeval/preprocess/colmap_filter.hpp"
#include "reconeval/preprocess/normalize.hpp"
#include "reconeval/reproject/render.hpp"
#include "reconeval/reproject/reprojection.hpp"
#include "reconeval/synth/synth.hpp"

namespace reconeval {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// extract-frames

struct FrameRange {
    std::uint64_t begin = 0;  // inclusive
    std::uint64_t end = 0;    // exclusive
};

struct ExtractFramesConfig {
    fs::path input;  // directory of already-decoded frames
    std::uint64_t stride = 1;
    std::vector<FrameRange> exclusions;
    std::string video_id;
    fs::path out;
};

/// Keeps every `stride`-th frame (source indices 0, N, 2N, ...) of a frame
/// directory; frames inside an exclusion range stay in the manifest with
/// included=false and are not copied.
inline DatasetManifest cmd_extract_frames(const ExtractFramesConfig& cfg) {
    if (cfg.stride < 1) throw InvalidInputError("stride must be >= 1");
    for (const auto& r : cfg.exclusions) {
        if (r.end < r.begin) throw InvalidInputError("exclusion range end precedes begin");
    }
    if (fs::is_regular_file(cfg.input)) {
        throw InvalidInputError("video decoding is not built in; decode " + cfg.input.string() +
                                " into a frame directory first and pass that directory");
    }
    const auto frames = list_images(cfg.input);
    OutputLock lock(cfg.out);
    fs::create_directories(cfg.out / "frames");

    DatasetManifest manifest;
    manifest.video_id = cfg.video_id.empty() ? cfg.input.filename().string() : cfg.video_id;
    manifest.sampling_stride = cfg.stride;
    for (std::uint64_t i = 0; i < frames.size(); i += cfg.stride) {
        ManifestEntry e;
        e.index = i;
        e.name = frames[i].filename().string();
        e.included = std::none_of(cfg.exclusions.begin(), cfg.exclusions.end(),
                                  [&](const FrameRange& r) { return i >= r.begin && i < r.end; });
        if (e.included) {
            fs::copy_file(frames[i], cfg.out / "frames" / e.name, fs::copy_options::overwrite_existing);
        }
        manifest.frames.push_back(std::move(e));
    }
    save_manifest(manifest, cfg.out / "manifest.json");
    return manifest;
}

// ---------------------------------------------------------------------------
// preprocess

enum class PreprocessMethod { ColmapFilter, Contrast, WhiteBalanceSky, WhiteBalanceWater };

[[nodiscard]] inline const char* preprocess_method_name(PreprocessMethod m) noexcept {
    switch (m) {
        case PreprocessMethod::ColmapFilter: return "colmap-filter";
        case PreprocessMethod::Contrast: return "contrast";
        case PreprocessMethod::WhiteBalanceSky: return "wb-sky";
        case PreprocessMethod::WhiteBalanceWater: return "wb-water";
    }
    return "?";
}

[[nodiscard]] inline PreprocessMethod preprocess_method_from_name(const std::string& name) {
    for (auto m : {PreprocessMethod::ColmapFilter, PreprocessMethod::Contrast, PreprocessMethod::WhiteBalanceSky,
                   PreprocessMethod::WhiteBalanceWater}) {
        if (name == preprocess_method_name(m)) return m;
    }
    throw InvalidInputError("unknown preprocessing method '" + name + "'");
}

struct PreprocessConfig {
    PreprocessMethod method = PreprocessMethod::Contrast;
    fs::path frames_dir;
    std::optional<fs::path> manifest;   // restricts to included frames; updated copy is written
    std::optional<fs::path> model_dir;  // colmap-filter
    std::optional<fs::path> masks;      // wb-*: mask manifest
    double alpha = kDefaultContrastAlpha;
    unsigned workers = 1;
    fs::path out;
};

namespace detail {

struct FrameSet {
    std::optional<DatasetManifest> manifest;
    std::vector<std::string> names;  // frames to process, in order
};

[[nodiscard]] inline FrameSet resolve_frames(const fs::path& frames_dir, const std::optional<fs::path>& manifest) {
    FrameSet set;
    if (manifest) {
        set.manifest = load_manifest(*manifest);
        for (const auto& f : set.manifest->frames) {
            if (f.included) set.names.push_back(f.name);
        }
    } else {
        for (const auto& p : list_images(frames_dir)) set.names.push_back(p.filename().string());
    }
    return set;
}

}  // namespace detail

/// Runs one pre-processing method and returns the processing log it wrote.
inline nlohmann::json cmd_preprocess(const PreprocessConfig& cfg) {
    const std::string method = preprocess_method_name(cfg.method);
    auto set = detail::resolve_frames(cfg.frames_dir, cfg.manifest);
    OutputLock lock(cfg.out);
    fs::create_directories(cfg.out / "frames");
    nlohmann::json log;
    log["method"] = method;

    if (cfg.method == PreprocessMethod::ColmapFilter) {
        if (!set.manifest) throw InvalidInputError("colmap-filter needs --manifest");
        if (!cfg.model_dir) throw InvalidInputError("colmap-filter needs --model");
        const ModelBundle bundle = parse_sparse_model(*cfg.model_dir);
        FilterResult res = colmap_filter(*set.manifest, bundle);
        for (const auto& f : res.manifest.frames) {
            if (!f.included) continue;
            const auto src = cfg.frames_dir / f.name;
            if (!fs::is_regular_file(src)) throw IoError("registered frame missing on disk: " + src.string());
            fs::copy_file(src, cfg.out / "frames" / f.name, fs::copy_options::overwrite_existing);
        }
        save_manifest(res.manifest, cfg.out / "manifest.json");
        log["included"] = res.manifest.included_count();
        log["offered"] = set.names.size();
        log["warnings"] = res.warnings;
        write_json(cfg.out / "processing_log.json", log);
        return log;
    }

    std::vector<Image> images(set.names.size());
    parallel_for(set.names.size(), cfg.workers, [&](std::size_t i) { images[i] = read_png(cfg.frames_dir / set.names[i]); });

    if (cfg.method == PreprocessMethod::Contrast) {
        parallel_for(set.names.size(), cfg.workers, [&](std::size_t i) {
            write_png(cfg.out / "frames" / set.names[i], contrast_adjust(images[i], cfg.alpha));
        });
        log["alpha"] = cfg.alpha;
        log["frames"] = set.names;
        if (set.manifest) save_manifest(*set.manifest, cfg.out / "manifest.json");
        write_json(cfg.out / "processing_log.json", log);
        return log;
    }

    const Region region = cfg.method == PreprocessMethod::WhiteBalanceSky ? Region::Sky : Region::Water;
    if (!cfg.masks) throw InvalidInputError(method + " needs --masks");
    const auto records = load_mask_manifest(*cfg.masks);
    std::vector<WhiteBalanceInput> inputs(set.names.size());
    for (std::size_t i = 0; i < set.names.size(); ++i) {
        inputs[i].name = set.names[i];
        inputs[i].image = std::move(images[i]);
        for (const auto& rec : records) {
            if (rec.frame == set.names[i] && rec.region == region && rec.mask_path) {
                inputs[i].masks.push_back(load_region_mask(rec));
                break;
            }
        }
    }
    WhiteBalanceResult wb;
    try {
        wb = white_balance(inputs, region, cfg.workers);
    } catch (const EmptyResultError& e) {
        throw StageError("preprocess/" + method, e.what());
    }
    parallel_for(wb.frames.size(), cfg.workers,
                 [&](std::size_t k) { write_png(cfg.out / "frames" / wb.frames[k].name, wb.frames[k].image); });

    log["region"] = std::string(region_name(region));
    log["target_mean"] = wb.target_mean;
    log["frames"] = nlohmann::json::array();
    for (const auto& f : wb.frames) {
        log["frames"].push_back(
            {{"name", f.name}, {"region_mean", f.region.mean}, {"region_pixels", f.region.pixel_count}, {"scale", f.scale}});
    }
    log["discarded"] = nlohmann::json::array();
    for (const auto& d : wb.discarded) log["discarded"].push_back({{"name", d.name}, {"reason", d.reason}});
    if (set.manifest) {
        std::set<std::string> dropped;
        for (const auto& d : wb.discarded) dropped.insert(d.name);
        DatasetManifest m = *set.manifest;
        for (auto& f : m.frames) {
            if (dropped.contains(f.name)) f.included = false;
        }
        save_manifest(m, cfg.out / "manifest.json");
    }
    write_json(cfg.out / "processing_log.json", log);
    return log;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateConfig {
    std::optional<fs::path> model_dir;     // sparse model
    std::optional<fs::path> dense_points;  // PLY
    std::optional<fs::path> dense_poses;   // poses JSON
    std::optional<fs::path> manifest;      // frames offered to the reconstructor
    std::optional<std::uint64_t> offered;  // overrides manifest / bundle
    std::optional<fs::path> render_features;
    std::optional<fs::path> original_features;
    std::optional<fs::path> lpips;
    bool skip_difps = false;
    bool skip_lpips = false;
    RenderOptions render;
    AggregationMode aggregation = AggregationMode::PerVideo;
    std::string video_id;
    unsigned workers = 1;
    fs::path out;
};

struct EvaluateOutcome {
    MetricsReport report;
    std::vector<StageFailure> failures;

    [[nodiscard]] int exit_code() const noexcept { return failures.empty() ? 0 : 3; }
};

[[nodiscard]] inline std::string render_file_name(const FrameRecord& frame) {
    return fs::path(frame.name).stem().string() + ".png";
}

[[nodiscard]] inline ModelBundle load_bundle(const EvaluateConfig& cfg) {
    if (cfg.model_dir && (cfg.dense_points || cfg.dense_poses)) {
        throw InvalidInputError("pass either --model or --points/--poses, not both");
    }
    if (cfg.model_dir) return parse_sparse_model(*cfg.model_dir);
    if (cfg.dense_points && cfg.dense_poses) return parse_generic_dense(*cfg.dense_points, *cfg.dense_poses);
    throw InvalidInputError("no reconstruction given (--model, or --points with --poses)");
}

inline EvaluateOutcome cmd_evaluate(const EvaluateConfig& cfg) {
    ModelBundle bundle = load_bundle(cfg);
    auto& scene = bundle.scene;
    if (scene.frames.empty()) throw InvalidInputError("reconstruction has no registered frames");
    if (cfg.offered) {
        scene.input_frame_total = *cfg.offered;
    } else if (cfg.manifest) {
        scene.input_frame_total = load_manifest(*cfg.manifest).included_count();
    }
    validate_bundle(bundle);

    // Stage inputs are checked up front so a missing file fails before any work.
    std::optional<FeatureStore> render_features, original_features;
    if (!cfg.skip_difps) {
        if (!cfg.render_features || !cfg.original_features) {
            throw StageError("metrics/difps",
                             "feature indexes for renders and originals are required (or pass --skip-difps)");
        }
        try {
            render_features = FeatureStore::load(*cfg.render_features);
            original_features = FeatureStore::load(*cfg.original_features);
        } catch (const Error& e) {
            throw StageError("metrics/difps", e.what());
        }
        if (!(render_features->extractor() == original_features->extractor())) {
            throw StageError("metrics/difps", "render and original features come from different extractors");
        }
    }
    std::optional<LpipsScores> lpips;
    if (!cfg.skip_lpips) {
        if (!cfg.lpips) throw StageError("metrics/lpips", "LPIPS scores file is required (or pass --skip-lpips)");
        try {
            lpips = ingest_lpips(*cfg.lpips);
        } catch (const Error& e) {
            throw StageError("metrics/lpips", e.what());
        }
    }

    OutputLock lock(cfg.out);
    fs::create_directories(cfg.out / "renders");

    std::vector<FrameId> ids;
    for (const auto& [id, f] : scene.frames) ids.push_back(id);

    struct FrameResult {
        std::optional<RenderStats> render;
        double coverage = 0.0;
        std::optional<double> reproj;
        std::size_t observations = 0;
        std::optional<StageFailure> failure;
    };
    std::vector<FrameResult> results(ids.size());
    parallel_for(ids.size(), cfg.workers, [&](std::size_t k) {
        const FrameRecord& frame = scene.frames.at(ids[k]);
        FrameResult& res = results[k];
        try {
            const RenderedImage img = render_reprojection(scene, ids[k], cfg.render);
            const auto png = cfg.out / "renders" / render_file_name(frame);
            write_png(png, img.color);
            write_json(fs::path(png).replace_extension(".json"), render_metadata_json(img));
            res.render = img.stats;
            res.coverage = img.coverage_fraction();
        } catch (const std::exception& e) {
            res.failure = StageFailure{frame.name, "render", e.what()};
            return;
        }
        try {
            const auto recs = frame_reprojection_records(scene, ids[k]);
            res.observations = recs.size();
            res.reproj = frame_reprojection_error(scene, ids[k]);
        } catch (const std::exception& e) {
            res.failure = StageFailure{frame.name, "reprojection", e.what()};
        }
    });

    EvaluateOutcome outcome;
    for (const auto& r : results) {
        if (r.failure) outcome.failures.push_back(*r.failure);
    }

    std::optional<DifpsSummary> difps_summary;
    if (render_features) {
        std::vector<RenderPair> pairs;
        for (std::size_t k = 0; k < ids.size(); ++k) {
            if (results[k].failure) continue;
            const auto& frame = scene.frames.at(ids[k]);
            pairs.push_back({ids[k], render_file_name(frame), frame.name});
        }
        try {
            difps_summary = difps_for_scene(pairs, *render_features, *original_features);
            for (const auto id : difps_summary->missing) {
                outcome.failures.push_back({scene.frames.at(id).name, "difps", "no feature for render or original"});
            }
        } catch (const Error& e) {
            outcome.failures.push_back({std::nullopt, "difps", e.what()});
        }
    }

    // Per-frame table
    nlohmann::json frames_json = nlohmann::json::array();
    long double reproj_sum = 0.0L, native_sum = 0.0L, lpips_sum = 0.0L;
    std::size_t reproj_n = 0, native_n = 0, lpips_n = 0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
        const auto& frame = scene.frames.at(ids[k]);
        const auto& r = results[k];
        nlohmann::json fj;
        fj["frame_id"] = ids[k];
        fj["name"] = frame.name;
        fj["render"] = render_file_name(frame);
        fj["observations"] = r.observations;
        fj["reprojection_error"] = r.reproj ? nlohmann::json(*r.reproj) : nlohmann::json(nullptr);
        if (r.reproj) {
            reproj_sum += *r.reproj;
            ++reproj_n;
        }
        std::optional<double> native;
        if (bundle.native_reprojection_errors) {
            if (const auto it = bundle.native_reprojection_errors->find(ids[k]); it != bundle.native_reprojection_errors->end()) {
                native = it->second;
                native_sum += it->second;
                ++native_n;
            }
        }
        fj["native_reprojection_error"] = native ? nlohmann::json(*native) : nlohmann::json(nullptr);
        if (r.render) {
            fj["points_rendered"] = r.render->points_rendered;
            fj["points_behind_camera"] = r.render->points_behind_camera;
            fj["coverage_fraction"] = r.coverage;
        }
        std::optional<double> frame_difps;
        if (difps_summary) {
            if (const auto it = difps_summary->per_frame.find(ids[k]); it != difps_summary->per_frame.end()) {
                frame_difps = it->second;
            }
        }
        fj["difps"] = frame_difps ? nlohmann::json(*frame_difps) : nlohmann::json(nullptr);
        std::optional<double> frame_lpips;
        if (lpips) {
            if (const auto it = lpips->per_frame.find(frame.name); it != lpips->per_frame.end()) {
                frame_lpips = it->second;
                lpips_sum += it->second;
                ++lpips_n;
            } else {
                outcome.failures.push_back({frame.name, "lpips", "no LPIPS score for this frame"});
            }
        }
        fj["lpips"] = frame_lpips ? nlohmann::json(*frame_lpips) : nlohmann::json(nullptr);
        frames_json.push_back(std::move(fj));
    }

    VideoMetrics row;
    row.video_id = cfg.video_id.empty() ? "video" : cfg.video_id;
    row.frame_count = scene.frames.size();
    row.image_throughput = image_throughput(scene.frames.size(), scene.input_frame_total);
    row.point_count_per_image = point_count_per_image(scene);
    if (reproj_n > 0) row.reprojection_error_recomputed = static_cast<double>(reproj_sum / reproj_n);
    if (native_n > 0) row.reprojection_error_native = static_cast<double>(native_sum / native_n);
    if (lpips_n > 0) row.lpips = static_cast<double>(lpips_sum / lpips_n);
    if (difps_summary) row.difps = difps_summary->mean;

    outcome.report = build_report({row}, cfg.aggregation);

    nlohmann::json frame_doc;
    frame_doc["video_id"] = row.video_id;
    frame_doc["source_kind"] = source_kind_name(bundle.source_kind);
    frame_doc["render"] = {{"splat_radius", cfg.render.splat_radius},
                           {"background", {cfg.render.background.r, cfg.render.background.g, cfg.render.background.b}}};
    frame_doc["frames"] = std::move(frames_json);
    write_json(cfg.out / "frame_metrics.json", frame_doc);
    write_json(cfg.out / "video_metrics.json", metrics_row_json(row));
    write_json(cfg.out / "report.json", report_json(outcome.report));
    write_file_bytes(cfg.out / "report.md", report_markdown(outcome.report));
    write_json(cfg.out / "errors.json", failures_json(outcome.failures));
    return outcome;
}

// ---------------------------------------------------------------------------
// synth

struct SynthCommandConfig {
    SynthSpec spec;
    SparseFormat format = SparseFormat::Binary;
    fs::path out;
};

[[nodiscard]] inline nlohmann::json synth_spec_json(const SynthSpec& s) {
    const char* noise = s.noise.kind == NoiseKind::None ? "none" : s.noise.kind == NoiseKind::Offset ? "offset" : "gaussian";
    return {{"num_points", s.num_points},
            {"num_cameras", s.num_cameras},
            {"model", std::string(camera_model_name(s.model))},
            {"width", s.width},
            {"height", s.height},
            {"focal_range", {s.focal_min, s.focal_max}},
            {"distortion_max", s.distortion_max},
            {"box_min", {s.box_min.x(), s.box_min.y(), s.box_min.z()}},
            {"box_max", {s.box_max.x(), s.box_max.y(), s.box_max.z()}},
            {"camera_distance", s.camera_distance},
            {"untracked_keypoints", s.untracked_keypoints},
            {"noise", {{"kind", noise}, {"offset", {s.noise.offset.x(), s.noise.offset.y()}}, {"sigma", s.noise.sigma}}},
            {"seed", s.seed}};
}

/// Generates a scene and writes it as a sparse model plus its generation parameters (with seed).
inline ModelBundle cmd_synth(const SynthCommandConfig& cfg) {
    ModelBundle bundle = make_sparse_bundle(generate_scene(cfg.spec));
    OutputLock lock(cfg.out);
    serialize_sparse_model(bundle, cfg.out, cfg.format);
    write_json(cfg.out / "synth_spec.json", synth_spec_json(cfg.spec));
    return bundle;
}

// ---------------------------------------------------------------------------
// report

struct ReportConfig {
    std::vector<fs::path> inputs;  // video_metrics.json or report.json files
    AggregationMode aggregation = AggregationMode::PerVideo;
    fs::path out;
};

/// Re-aggregates per-video rows from earlier evaluate runs into one dataset report.
inline MetricsReport cmd_report(const ReportConfig& cfg) {
    if (cfg.inputs.empty()) throw InvalidInputError("report needs at least one input file");
    std::vector<VideoMetrics> rows;
    for (const auto& p : cfg.inputs) {
        const auto doc = parse_json_file(p);
        if (doc.contains("rows")) {
            for (const auto& r : doc.at("rows")) rows.push_back(metrics_row_from_json(r));
        } else {
            rows.push_back(metrics_row_from_json(doc));
        }
    }
    MetricsReport report = build_report(std::move(rows), cfg.aggregation);
    OutputLock lock(cfg.out);
    write_json(cfg.out / "report.json", report_json(report));
    write_file_bytes(cfg.out / "report.md", report_markdown(report));
    return report;
}

}  // namespace reconeval
