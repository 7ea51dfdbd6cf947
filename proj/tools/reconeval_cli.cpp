// reconeval: command-line front end for the reconstruction evaluation pipeline.
//
// Exit codes: 0 success, 2 input error, 3 stage failure.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "reconeval/reconeval.hpp"

namespace fs = std::filesystem;
using namespace reconeval;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitStage = 3;

std::optional<fs::path> opt_path(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return fs::path(s);
}

template <typename T>
T parse_field(const std::string& token, const char* what) {
    T v{};
    if (!parse_number(token, v)) throw InvalidInputError(std::string("bad ") + what + ": '" + token + "'");
    return v;
}

FrameRange parse_range(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw InvalidInputError("exclusion range '" + text + "' is not BEGIN:END");
    FrameRange r;
    r.begin = parse_field<std::uint64_t>(text.substr(0, colon), "exclusion range begin");
    r.end = parse_field<std::uint64_t>(text.substr(colon + 1), "exclusion range end");
    return r;
}

Rgb parse_rgb(const std::string& text) {
    std::vector<std::uint8_t> c;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        const auto v = parse_field<unsigned>(part, "background channel");
        if (v > 255) throw InvalidInputError("background channel out of range: " + part);
        c.push_back(static_cast<std::uint8_t>(v));
    }
    if (c.size() != 3) throw InvalidInputError("background must be R,G,B");
    return {c[0], c[1], c[2]};
}

AggregationMode parse_aggregation(const std::string& s) {
    if (s == "per-video") return AggregationMode::PerVideo;
    if (s == "per-frame") return AggregationMode::PerFrame;
    throw InvalidInputError("unknown aggregation mode '" + s + "'");
}

CameraModelKind parse_model(const std::string& s) { return camera_model_from_name(s); }

/// Writes the options a subcommand ran with, minus settings that must not
/// change outputs (worker count, config file path).
void echo_config(const CLI::App& sub, const fs::path& out) {
    std::string text = "[" + sub.get_name() + "]\n";
    for (const CLI::Option* opt : sub.get_options()) {
        const std::string name = opt->get_single_name();
        if (name.empty() || name == "help" || name == "workers" || name == "config") continue;
        if (opt->get_expected_max() == 0) {
            text += name + "=" + (opt->count() > 0 ? "true" : "false") + "\n";
            continue;
        }
        const auto& res = opt->results();
        std::string value;
        if (res.empty()) {
            value = opt->get_default_str();
        } else {
            for (std::size_t i = 0; i < res.size(); ++i) value += (i ? " " : "") + res[i];
        }
        if (value.empty()) continue;
        // the INI reader splits unquoted values on commas
        if (value.find(',') != std::string::npos) value = "\"" + value + "\"";
        text += name + "=" + value + "\n";
    }
    fs::create_directories(out);
    write_file_bytes(out / "effective_config.ini", text);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evaluate 3D reconstructions of video frames: reprojection error, point density, "
                 "image throughput, DiFPS and LPIPS."};
    app.set_config("--config", "", "INI file with one [subcommand] section of key=value options", false);
    app.require_subcommand(1);

    unsigned workers = 1;

    // extract-frames
    auto* ex = app.add_subcommand("extract-frames", "Sample every N-th frame from a frame directory and write a manifest");
    std::string ex_input, ex_out, ex_video;
    std::uint64_t ex_stride = 1;
    std::vector<std::string> ex_exclude;
    ex->add_option("--input", ex_input, "Directory of decoded video frames")->required();
    ex->add_option("--stride", ex_stride, "Keep every N-th frame")->capture_default_str();
    ex->add_option("--exclude", ex_exclude, "Excluded source index range BEGIN:END (end exclusive); repeatable");
    ex->add_option("--video-id", ex_video, "Video identifier (default: input directory name)");
    ex->add_option("--out", ex_out, "Output directory")->required();

    // preprocess
    auto* pp = app.add_subcommand("preprocess", "Apply one pre-processing method to a frame set");
    std::string pp_method, pp_frames, pp_manifest, pp_model, pp_masks, pp_out;
    double pp_alpha = kDefaultContrastAlpha;
    pp->add_option("--method", pp_method, "colmap-filter | contrast | wb-sky | wb-water")
        ->required()
        ->check(CLI::IsMember({"colmap-filter", "contrast", "wb-sky", "wb-water"}));
    pp->add_option("--frames", pp_frames, "Input frame directory")->required();
    pp->add_option("--manifest", pp_manifest, "Frame manifest; restricts to included frames");
    pp->add_option("--model", pp_model, "Sparse model directory (colmap-filter)");
    pp->add_option("--masks", pp_masks, "Region mask manifest (wb-sky, wb-water)");
    pp->add_option("--alpha", pp_alpha, "Contrast gain (contrast)")->capture_default_str();
    pp->add_option("--workers", workers, "Worker threads")->capture_default_str();
    pp->add_option("--out", pp_out, "Output directory")->required();

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "Render reprojections and compute the metric report for one video");
    std::string ev_model, ev_points, ev_poses, ev_manifest, ev_rfeat, ev_ofeat, ev_lpips, ev_out, ev_video;
    std::string ev_background = "0,0,0", ev_agg = "per-video";
    std::optional<std::uint64_t> ev_offered;
    bool ev_skip_difps = false, ev_skip_lpips = false;
    double ev_radius = 3.0;
    ev->add_option("--model", ev_model, "Sparse model directory (binary or text)");
    ev->add_option("--points", ev_points, "Dense point cloud (PLY)");
    ev->add_option("--poses", ev_poses, "Dense camera poses (JSON)");
    ev->add_option("--manifest", ev_manifest, "Manifest of frames offered to the reconstructor");
    ev->add_option("--offered", ev_offered, "Number of frames offered (overrides --manifest)");
    ev->add_option("--render-features", ev_rfeat, "Feature index for the rendered images");
    ev->add_option("--original-features", ev_ofeat, "Feature index for the original frames");
    ev->add_option("--lpips", ev_lpips, "LPIPS scores JSON");
    ev->add_flag("--skip-difps", ev_skip_difps, "Do not compute DiFPS");
    ev->add_flag("--skip-lpips", ev_skip_lpips, "Do not ingest LPIPS scores");
    ev->add_option("--splat-radius", ev_radius, "Splat radius in pixels")->capture_default_str();
    ev->add_option("--background", ev_background, "Background colour R,G,B")->capture_default_str();
    ev->add_option("--aggregation", ev_agg, "per-video | per-frame")
        ->capture_default_str()
        ->check(CLI::IsMember({"per-video", "per-frame"}));
    ev->add_option("--video-id", ev_video, "Video identifier used in the report");
    ev->add_option("--workers", workers, "Worker threads")->capture_default_str();
    ev->add_option("--out", ev_out, "Output directory")->required();

    // synth
    auto* sy = app.add_subcommand("synth", "Generate a seeded synthetic sparse model with exact observations");
    SynthSpec spec;
    std::string sy_model = "PINHOLE", sy_noise = "none", sy_out;
    std::vector<double> sy_offset{0.0, 0.0};
    bool sy_text = false;
    sy->add_option("--points", spec.num_points, "Number of 3D points")->capture_default_str();
    sy->add_option("--cameras", spec.num_cameras, "Number of cameras (one frame each)")->capture_default_str();
    sy->add_option("--camera-model", sy_model, "SIMPLE_PINHOLE | PINHOLE | SIMPLE_RADIAL | RADIAL")
        ->capture_default_str()
        ->check(CLI::IsMember({"SIMPLE_PINHOLE", "PINHOLE", "SIMPLE_RADIAL", "RADIAL"}));
    sy->add_option("--width", spec.width, "Image width")->capture_default_str();
    sy->add_option("--height", spec.height, "Image height")->capture_default_str();
    sy->add_option("--untracked", spec.untracked_keypoints, "Extra keypoints per frame without a 3D point")
        ->capture_default_str();
    sy->add_option("--noise", sy_noise, "none | offset | gaussian")
        ->capture_default_str()
        ->check(CLI::IsMember({"none", "offset", "gaussian"}));
    sy->add_option("--offset", sy_offset, "Pixel offset DX DY (offset noise)")->expected(2)->default_str("0 0");
    sy->add_option("--sigma", spec.noise.sigma, "Per-axis standard deviation in px (gaussian noise)")
        ->capture_default_str();
    sy->add_option("--seed", spec.seed, "Random seed")->capture_default_str();
    sy->add_flag("--text", sy_text, "Write the text format instead of binary");
    sy->add_option("--out", sy_out, "Output model directory")->required();

    // report
    auto* rp = app.add_subcommand("report", "Re-aggregate per-video metrics into one report");
    std::vector<std::string> rp_inputs;
    std::string rp_agg = "per-video", rp_out;
    rp->add_option("--input", rp_inputs, "video_metrics.json or report.json; repeatable")->required();
    rp->add_option("--aggregation", rp_agg, "per-video | per-frame")
        ->capture_default_str()
        ->check(CLI::IsMember({"per-video", "per-frame"}));
    rp->add_option("--out", rp_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitInput;
    }

    try {
        if (ex->parsed()) {
            ExtractFramesConfig cfg;
            cfg.input = ex_input;
            cfg.stride = ex_stride;
            for (const auto& r : ex_exclude) cfg.exclusions.push_back(parse_range(r));
            cfg.video_id = ex_video;
            cfg.out = ex_out;
            const auto manifest = cmd_extract_frames(cfg);
            echo_config(*ex, cfg.out);
            std::cout << manifest.included_count() << " of " << manifest.frames.size() << " sampled frames included\n";
        } else if (pp->parsed()) {
            PreprocessConfig cfg;
            cfg.method = preprocess_method_from_name(pp_method);
            cfg.frames_dir = pp_frames;
            cfg.manifest = opt_path(pp_manifest);
            cfg.model_dir = opt_path(pp_model);
            cfg.masks = opt_path(pp_masks);
            cfg.alpha = pp_alpha;
            cfg.workers = workers;
            cfg.out = pp_out;
            try {
                cmd_preprocess(cfg);
            } catch (const StageError&) {
                throw;
            } catch (const Error& e) {
                std::cerr << "input error: preprocess/" << pp_method << ": " << e.what() << "\n";
                return kExitInput;
            }
            echo_config(*pp, cfg.out);
        } else if (ev->parsed()) {
            EvaluateConfig cfg;
            cfg.model_dir = opt_path(ev_model);
            cfg.dense_points = opt_path(ev_points);
            cfg.dense_poses = opt_path(ev_poses);
            cfg.manifest = opt_path(ev_manifest);
            cfg.offered = ev_offered;
            cfg.render_features = opt_path(ev_rfeat);
            cfg.original_features = opt_path(ev_ofeat);
            cfg.lpips = opt_path(ev_lpips);
            cfg.skip_difps = ev_skip_difps;
            cfg.skip_lpips = ev_skip_lpips;
            cfg.render.splat_radius = ev_radius;
            cfg.render.background = parse_rgb(ev_background);
            cfg.aggregation = parse_aggregation(ev_agg);
            cfg.video_id = ev_video;
            cfg.workers = workers;
            cfg.out = ev_out;
            const auto outcome = cmd_evaluate(cfg);
            echo_config(*ev, cfg.out);
            std::cout << report_markdown(outcome.report);
            for (const auto& f : outcome.failures) {
                std::cerr << "failed: " << f.stage << " " << f.frame.value_or("-") << ": " << f.message << "\n";
            }
            return outcome.exit_code();
        } else if (sy->parsed()) {
            SynthCommandConfig cfg;
            cfg.spec = spec;
            cfg.spec.model = parse_model(sy_model);
            if (sy_noise == "offset") {
                cfg.spec.noise.kind = NoiseKind::Offset;
                cfg.spec.noise.offset = {sy_offset[0], sy_offset[1]};
            } else if (sy_noise == "gaussian") {
                cfg.spec.noise.kind = NoiseKind::Gaussian;
            }
            cfg.format = sy_text ? SparseFormat::Text : SparseFormat::Binary;
            cfg.out = sy_out;
            const auto bundle = cmd_synth(cfg);
            echo_config(*sy, cfg.out);
            std::cout << bundle.scene.points.size() << " points, " << bundle.scene.frames.size() << " frames\n";
        } else if (rp->parsed()) {
            ReportConfig cfg;
            for (const auto& p : rp_inputs) cfg.inputs.emplace_back(p);
            cfg.aggregation = parse_aggregation(rp_agg);
            cfg.out = rp_out;
            const auto report = cmd_report(cfg);
            echo_config(*rp, cfg.out);
            std::cout << report_markdown(report);
        }
    } catch (const StageError& e) {
        std::cerr << "stage failure: " << e.what() << "\n";
        return kExitStage;
    } catch (const Error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    }
    return 0;
}
