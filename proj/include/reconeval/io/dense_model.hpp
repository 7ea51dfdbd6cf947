#pragma once
/// @file dense_model.hpp
/// @brief Dense reconstruction carrier: a PLY point cloud plus a JSON poses file.
///
/// Poses file schema:
/// {
///   "input_frame_total": 26,
///   "cameras": [{"camera_id": 1, "model": "PINHOLE", "width": 512, "height": 384,
///                "params": [fx, fy, cx, cy]}],
///   "frames":  [{"frame_id": 1, "name": "f0001.png", "camera_id": 1,
///                "qvec": [w, x, y, z], "tvec": [x, y, z],
///                "reprojection_error": 0.91}]          // optional, producer-native
/// }
/// "model" may also be the integer model id.

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "reconeval/core/scene.hpp"
#include "reconeval/io/byte_stream.hpp"
#include "reconeval/io/model_bundle.hpp"
#include "reconeval/io/ply.hpp"

namespace reconeval {

namespace detail {

template <typename T>
[[nodiscard]] T json_get(const nlohmann::json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw FormatError(where + ": missing key '" + key + "'");
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(where + ": bad value for '" + key + "': " + e.what());
    }
}

[[nodiscard]] inline CameraModelKind json_camera_model(const nlohmann::json& value) {
    if (value.is_number_integer()) return camera_model_from_id(value.get<std::int64_t>());
    if (value.is_string()) return camera_model_from_name(value.get<std::string>());
    throw FormatError("camera model must be a name or integer id");
}

}  // namespace detail

[[nodiscard]] inline nlohmann::json parse_json_file(const std::filesystem::path& path) {
    const std::string text = read_file_bytes(path);
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

/// Builds cameras and frames from a poses document (no points).
[[nodiscard]] inline ModelBundle parse_poses_json(const nlohmann::json& doc, const std::string& where) {
    using detail::json_get;
    if (!doc.is_object()) throw FormatError(where + ": poses document must be an object");
    ModelBundle bundle;
    bundle.source_kind = SourceKind::GenericDense;
    auto& scene = bundle.scene;

    for (const auto& cam : json_get<nlohmann::json>(doc, "cameras", where)) {
        const auto id = json_get<CameraId>(cam, "camera_id", where);
        const auto kind = detail::json_camera_model(json_get<nlohmann::json>(cam, "model", where));
        const auto params = json_get<std::vector<double>>(cam, "params", where);
        auto intr = CameraIntrinsics::from_params(kind, json_get<std::uint64_t>(cam, "width", where),
                                                  json_get<std::uint64_t>(cam, "height", where), params);
        if (!scene.cameras.emplace(id, std::move(intr)).second) {
            throw IntegrityError(where + ": duplicate camera id " + std::to_string(id));
        }
    }

    std::map<FrameId, double> native;
    for (const auto& fr : json_get<nlohmann::json>(doc, "frames", where)) {
        FrameRecord frame;
        frame.frame_id = json_get<FrameId>(fr, "frame_id", where);
        frame.name = json_get<std::string>(fr, "name", where);
        frame.camera_id = json_get<CameraId>(fr, "camera_id", where);
        const auto q = json_get<std::vector<double>>(fr, "qvec", where);
        const auto t = json_get<std::vector<double>>(fr, "tvec", where);
        if (q.size() != 4 || t.size() != 3) throw FormatError(where + ": qvec needs 4 and tvec 3 values");
        frame.pose = CameraPose{Quaternion{q[0], q[1], q[2], q[3]}.normalized(), Eigen::Vector3d(t[0], t[1], t[2])};
        if (!scene.cameras.contains(frame.camera_id)) {
            throw IntegrityError(where + ": frame " + std::to_string(frame.frame_id) + " references unknown camera " +
                                 std::to_string(frame.camera_id));
        }
        if (const auto it = fr.find("reprojection_error"); it != fr.end() && !it->is_null()) {
            native[frame.frame_id] = it->get<double>();
        }
        const FrameId id = frame.frame_id;
        if (!scene.frames.emplace(id, std::move(frame)).second) {
            throw IntegrityError(where + ": duplicate frame id " + std::to_string(id));
        }
    }
    scene.input_frame_total = json_get<std::uint64_t>(doc, "input_frame_total", where);
    if (!native.empty()) bundle.native_reprojection_errors = std::move(native);
    return bundle;
}

/// Loads a dense bundle. Points get ids 0..n-1 in file order and empty tracks.
[[nodiscard]] inline ModelBundle parse_generic_dense(const std::filesystem::path& ply_path,
                                                     const std::filesystem::path& poses_path) {
    ModelBundle bundle = parse_poses_json(parse_json_file(poses_path), poses_path.string());
    const PlyCloud cloud = read_ply(ply_path);
    PointId id = 0;
    for (const auto& p : cloud.points) {
        ScenePoint sp;
        sp.id = id;
        sp.position = p.position;
        sp.color = p.color;
        bundle.scene.points.emplace(id, std::move(sp));
        ++id;
    }
    validate_bundle(bundle);
    return bundle;
}

[[nodiscard]] inline nlohmann::json poses_to_json(const ModelBundle& bundle) {
    nlohmann::json doc;
    doc["input_frame_total"] = bundle.scene.input_frame_total;
    doc["cameras"] = nlohmann::json::array();
    for (const auto& [id, cam] : bundle.scene.cameras) {
        doc["cameras"].push_back({{"camera_id", id},
                                  {"model", std::string(camera_model_name(cam.model_kind))},
                                  {"width", cam.width},
                                  {"height", cam.height},
                                  {"params", cam.params()}});
    }
    doc["frames"] = nlohmann::json::array();
    for (const auto& [id, fr] : bundle.scene.frames) {
        nlohmann::json f = {{"frame_id", id},
                            {"name", fr.name},
                            {"camera_id", fr.camera_id},
                            {"qvec", {fr.pose.rotation.w, fr.pose.rotation.x, fr.pose.rotation.y, fr.pose.rotation.z}},
                            {"tvec", {fr.pose.translation.x(), fr.pose.translation.y(), fr.pose.translation.z()}}};
        if (bundle.native_reprojection_errors) {
            if (const auto it = bundle.native_reprojection_errors->find(id); it != bundle.native_reprojection_errors->end()) {
                f["reprojection_error"] = it->second;
            }
        }
        doc["frames"].push_back(std::move(f));
    }
    return doc;
}

}  // namespace reconeval
