#pragma once
// Shared test fixtures: scratch directories, randomized scenes and a complete
// evaluate input set.

#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "reconeval/reconeval.hpp"

namespace reconeval::testing {

namespace fs = std::filesystem;

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        std::string tmpl = (fs::temp_directory_path() / "reconeval-XXXXXX").string();
        if (::mkdtemp(tmpl.data()) == nullptr) throw IoError("mkdtemp failed");
        path_ = tmpl;
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }

    [[nodiscard]] const fs::path& path() const noexcept { return path_; }
    [[nodiscard]] fs::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    fs::path path_;
};

/// Relative path -> contents for every regular file under `root`.
inline std::map<std::string, std::string> snapshot_tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = read_file_bytes(e.path());
    }
    return out;
}

/// Renumbers cameras, frames and points with scattered ids so that parsers and
/// writers see non-contiguous keys.
inline ReconstructionScene scatter_ids(const ReconstructionScene& in, std::uint64_t seed) {
    SeededRng rng(seed);
    std::map<CameraId, CameraId> cam_map;
    std::map<FrameId, FrameId> frame_map;
    std::map<PointId, PointId> point_map;
    CameraId next_cam = 1;
    for (const auto& [id, c] : in.cameras) {
        next_cam += 1 + static_cast<CameraId>(rng.next_u64() % 50);
        cam_map[id] = next_cam;
    }
    FrameId next_frame = 0;
    for (const auto& [id, f] : in.frames) {
        next_frame += 1 + static_cast<FrameId>(rng.next_u64() % 1000);
        frame_map[id] = next_frame;
    }
    PointId next_point = 0;
    for (const auto& [id, p] : in.points) {
        next_point += 1 + rng.next_u64() % 100000;
        point_map[id] = next_point;
    }
    ReconstructionScene out;
    out.input_frame_total = in.input_frame_total;
    for (const auto& [id, c] : in.cameras) out.cameras.emplace(cam_map.at(id), c);
    for (const auto& [id, f] : in.frames) {
        FrameRecord nf = f;
        nf.frame_id = frame_map.at(id);
        nf.camera_id = cam_map.at(f.camera_id);
        for (auto& kp : nf.keypoints) {
            if (kp.point_id) kp.point_id = point_map.at(*kp.point_id);
        }
        out.frames.emplace(nf.frame_id, std::move(nf));
    }
    for (const auto& [id, p] : in.points) {
        ScenePoint np = p;
        np.id = point_map.at(id);
        for (auto& obs : np.track) obs.frame_id = frame_map.at(obs.frame_id);
        out.points.emplace(np.id, std::move(np));
    }
    return out;
}

/// A varied sparse scene: camera model, size, noise and untracked keypoints all
/// depend on the seed, and ids are scattered.
inline ReconstructionScene random_sparse_scene(std::uint64_t seed, std::size_t max_points = 200) {
    SeededRng rng(seed * 7919 + 17);
    SynthSpec spec;
    spec.seed = seed;
    spec.num_points = rng.next_u64() % (max_points + 1);
    spec.num_cameras = 1 + rng.next_u64() % 5;
    spec.model = static_cast<CameraModelKind>(rng.next_u64() % 4);
    spec.width = 64 + static_cast<std::uint32_t>(rng.next_u64() % 640);
    spec.height = 48 + static_cast<std::uint32_t>(rng.next_u64() % 480);
    spec.untracked_keypoints = rng.next_u64() % 20;
    spec.noise.kind = NoiseKind::Gaussian;
    spec.noise.sigma = rng.uniform(0.0, 2.0);
    return scatter_ids(generate_scene(spec), seed);
}

inline std::vector<double> random_vector(SeededRng& rng, std::size_t dim) {
    std::vector<double> v(dim);
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    return v;
}

/// Writes a complete evaluate input set under `root`: sparse model, manifest,
/// feature indexes for renders and originals, and LPIPS scores.
inline EvaluateConfig write_evaluate_fixture(const fs::path& root, std::uint64_t seed = 11) {
    SynthSpec spec;
    spec.num_points = 300;
    spec.num_cameras = 6;
    spec.model = CameraModelKind::SimpleRadial;
    spec.width = 160;
    spec.height = 120;
    spec.focal_min = 100.0;
    spec.focal_max = 140.0;
    spec.untracked_keypoints = 5;
    spec.noise.kind = NoiseKind::Gaussian;
    spec.noise.sigma = 0.5;
    spec.seed = seed;
    const ModelBundle bundle = make_sparse_bundle(generate_scene(spec));
    serialize_sparse_model(bundle, root / "model");

    DatasetManifest manifest;
    manifest.video_id = "fixture";
    manifest.sampling_stride = 5;
    std::uint64_t index = 0;
    for (const auto& [id, f] : bundle.scene.frames) {
        manifest.frames.push_back({index, f.name, true});
        index += 5;
        // frames offered but never registered
        manifest.frames.push_back({index, "unregistered_" + std::to_string(index) + ".png", true});
        index += 5;
    }
    save_manifest(manifest, root / "manifest.json");

    SeededRng rng(seed + 1);
    std::vector<FeatureVector> renders, originals;
    nlohmann::json lpips = {{"pairs", nlohmann::json::array()}};
    for (const auto& [id, f] : bundle.scene.frames) {
        const auto base = random_vector(rng, 32);
        auto noisy = base;
        for (auto& x : noisy) x += rng.uniform(-0.3, 0.3);
        originals.push_back({f.name, base});
        renders.push_back({render_file_name(f), noisy});
        lpips["pairs"].push_back({{"render", render_file_name(f)}, {"original", f.name}, {"lpips", rng.uniform(0.2, 0.6)}});
    }
    write_feature_index(root / "render_features", {"fixture-extractor", "1"}, renders);
    write_feature_index(root / "original_features", {"fixture-extractor", "1"}, originals);
    write_file_bytes(root / "lpips.json", lpips.dump(2));

    EvaluateConfig cfg;
    cfg.model_dir = root / "model";
    cfg.manifest = root / "manifest.json";
    cfg.render_features = root / "render_features" / "index.json";
    cfg.original_features = root / "original_features" / "index.json";
    cfg.lpips = root / "lpips.json";
    cfg.video_id = "fixture";
    return cfg;
}

}  // namespace reconeval::testing
