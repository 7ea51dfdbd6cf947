#pragma once
/// @file sparse_model.hpp
/// @brief Reader/writer for the SfM sparse model (cameras / images / points3D),
/// binary little-endian and text variants.
///
/// Binary layout:
///   cameras.bin  : u64 n; { u32 id, i32 model, u64 width, u64 height, f64 params[] }
///   images.bin   : u64 n; { u32 id, f64 qw qx qy qz, f64 tx ty tz, u32 camera_id,
///                           char name[] '\0', u64 n2d, { f64 x, f64 y, u64 point3D_id } }
///   points3D.bin : u64 n; { u64 id, f64 x y z, u8 r g b, f64 error, u64 track_len,
///                           { u32 image_id, u32 point2D_idx } }
/// Untracked keypoints use point3D_id 0xFFFFFFFFFFFFFFFF (-1 in text).
/// Records are written in ascending id order, so output bytes do not depend
/// on the order in which the scene was assembled.

#include <cstdint>
#include <filesystem>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "reconeval/core/scene.hpp"
#include "reconeval/io/byte_stream.hpp"
#include "reconeval/io/model_bundle.hpp"

namespace reconeval {

enum class SparseFormat { Binary, Text };

inline constexpr std::uint64_t kInvalidPoint3DId = std::numeric_limits<std::uint64_t>::max();

namespace detail {

struct RawCamera {
    CameraId id = 0;
    std::int64_t model_id = 0;
    std::uint64_t width = 0;
    std::uint64_t height = 0;
    std::vector<double> params;
};

struct RawKeypoint {
    double x = 0;
    double y = 0;
    std::uint64_t point_id = kInvalidPoint3DId;
};

struct RawImage {
    FrameId id = 0;
    Quaternion q;
    Eigen::Vector3d t = Eigen::Vector3d::Zero();
    CameraId camera_id = 0;
    std::string name;
    std::vector<RawKeypoint> keypoints;
};

struct RawPoint {
    PointId id = 0;
    Eigen::Vector3d xyz = Eigen::Vector3d::Zero();
    Rgb rgb;
    double error = 0;
    std::vector<std::pair<FrameId, std::uint32_t>> track;
};

struct RawModel {
    std::vector<RawCamera> cameras;
    std::vector<RawImage> images;
    std::vector<RawPoint> points;
};

[[nodiscard]] inline ReconstructionScene assemble_scene(const RawModel& raw) {
    ReconstructionScene scene;
    for (const auto& c : raw.cameras) {
        const auto kind = camera_model_from_id(c.model_id);
        if (!scene.cameras.emplace(c.id, CameraIntrinsics::from_params(kind, c.width, c.height, c.params)).second) {
            throw IntegrityError("duplicate camera id " + std::to_string(c.id));
        }
    }
    for (const auto& img : raw.images) {
        FrameRecord frame;
        frame.frame_id = img.id;
        frame.name = img.name;
        frame.camera_id = img.camera_id;
        frame.pose = CameraPose{img.q.normalized(), img.t};
        frame.keypoints.reserve(img.keypoints.size());
        for (const auto& kp : img.keypoints) {
            Keypoint k;
            k.pixel = {kp.x, kp.y};
            if (kp.point_id != kInvalidPoint3DId) k.point_id = kp.point_id;
            frame.keypoints.push_back(k);
        }
        if (!scene.cameras.contains(frame.camera_id)) {
            throw IntegrityError("image " + std::to_string(img.id) + " references missing camera " +
                                 std::to_string(img.camera_id));
        }
        if (!scene.frames.emplace(img.id, std::move(frame)).second) {
            throw IntegrityError("duplicate image id " + std::to_string(img.id));
        }
    }
    for (const auto& p : raw.points) {
        if (p.id == kInvalidPoint3DId) throw IntegrityError("point uses the reserved invalid id");
        ScenePoint point;
        point.id = p.id;
        point.position = p.xyz;
        point.color = p.rgb;
        point.error = p.error;
        point.track.reserve(p.track.size());
        for (const auto& [image_id, idx] : p.track) {
            const auto fit = scene.frames.find(image_id);
            if (fit == scene.frames.end()) {
                throw IntegrityError("point " + std::to_string(p.id) + " track references missing image " +
                                     std::to_string(image_id));
            }
            if (idx >= fit->second.keypoints.size()) {
                throw IntegrityError("point " + std::to_string(p.id) + " track references point2D " +
                                     std::to_string(idx) + " past the end of image " + std::to_string(image_id));
            }
            point.track.push_back({image_id, fit->second.keypoints[idx].pixel, idx});
        }
        if (!scene.points.emplace(p.id, std::move(point)).second) {
            throw IntegrityError("duplicate point id " + std::to_string(p.id));
        }
    }
    scene.input_frame_total = scene.frames.size();
    validate_scene(scene);
    return scene;
}

[[nodiscard]] inline RawModel disassemble_scene(const ReconstructionScene& scene) {
    RawModel raw;
    for (const auto& [id, cam] : scene.cameras) {
        raw.cameras.push_back({id, static_cast<std::int64_t>(cam.model_kind), cam.width, cam.height, cam.params()});
    }
    for (const auto& [id, frame] : scene.frames) {
        RawImage img;
        img.id = id;
        img.q = frame.pose.rotation;
        img.t = frame.pose.translation;
        img.camera_id = frame.camera_id;
        img.name = frame.name;
        for (const auto& kp : frame.keypoints) {
            img.keypoints.push_back({kp.pixel.x(), kp.pixel.y(), kp.point_id.value_or(kInvalidPoint3DId)});
        }
        raw.images.push_back(std::move(img));
    }
    for (const auto& [id, point] : scene.points) {
        RawPoint p;
        p.id = id;
        p.xyz = point.position;
        p.rgb = point.color;
        p.error = point.error;
        for (const auto& obs : point.track) {
            if (!obs.keypoint_index) {
                throw InvalidInputError("point " + std::to_string(id) +
                                        " has an observation without a keypoint index; "
                                        "sparse models need keypoint-linked tracks");
            }
            p.track.emplace_back(obs.frame_id, *obs.keypoint_index);
        }
        raw.points.push_back(std::move(p));
    }
    return raw;
}

// ---------------------------------------------------------------------------
// Binary

[[nodiscard]] inline std::vector<RawCamera> read_cameras_binary(std::string_view data, const std::string& name) {
    ByteReader in(data, name);
    const auto n = in.read<std::uint64_t>();
    std::vector<RawCamera> cams;
    for (std::uint64_t i = 0; i < n; ++i) {
        RawCamera c;
        c.id = in.read<std::uint32_t>();
        c.model_id = in.read<std::int32_t>();
        const auto kind = camera_model_from_id(c.model_id);
        c.width = in.read<std::uint64_t>();
        c.height = in.read<std::uint64_t>();
        c.params.resize(camera_model_num_params(kind));
        for (auto& v : c.params) v = in.read<double>();
        cams.push_back(std::move(c));
    }
    if (in.remaining() != 0) in.fail("trailing bytes after " + std::to_string(n) + " cameras");
    return cams;
}

[[nodiscard]] inline std::vector<RawImage> read_images_binary(std::string_view data, const std::string& name) {
    ByteReader in(data, name);
    const auto n = in.read<std::uint64_t>();
    std::vector<RawImage> imgs;
    for (std::uint64_t i = 0; i < n; ++i) {
        RawImage img;
        img.id = in.read<std::uint32_t>();
        img.q.w = in.read<double>();
        img.q.x = in.read<double>();
        img.q.y = in.read<double>();
        img.q.z = in.read<double>();
        for (int k = 0; k < 3; ++k) img.t[k] = in.read<double>();
        img.camera_id = in.read<std::uint32_t>();
        img.name = in.read_cstring();
        const auto n2d = in.read<std::uint64_t>();
        // 24 bytes per keypoint; reject absurd counts before allocating.
        if (n2d > in.remaining() / 24) in.fail("truncated: " + std::to_string(n2d) + " keypoints declared");
        img.keypoints.resize(n2d);
        for (auto& kp : img.keypoints) {
            kp.x = in.read<double>();
            kp.y = in.read<double>();
            kp.point_id = in.read<std::uint64_t>();
        }
        imgs.push_back(std::move(img));
    }
    if (in.remaining() != 0) in.fail("trailing bytes after " + std::to_string(n) + " images");
    return imgs;
}

[[nodiscard]] inline std::vector<RawPoint> read_points_binary(std::string_view data, const std::string& name) {
    ByteReader in(data, name);
    const auto n = in.read<std::uint64_t>();
    std::vector<RawPoint> pts;
    for (std::uint64_t i = 0; i < n; ++i) {
        RawPoint p;
        p.id = in.read<std::uint64_t>();
        for (int k = 0; k < 3; ++k) p.xyz[k] = in.read<double>();
        p.rgb.r = in.read<std::uint8_t>();
        p.rgb.g = in.read<std::uint8_t>();
        p.rgb.b = in.read<std::uint8_t>();
        p.error = in.read<double>();
        const auto len = in.read<std::uint64_t>();
        if (len > in.remaining() / 8) in.fail("truncated: track of " + std::to_string(len) + " declared");
        p.track.resize(len);
        for (auto& [image_id, idx] : p.track) {
            image_id = in.read<std::uint32_t>();
            idx = in.read<std::uint32_t>();
        }
        pts.push_back(std::move(p));
    }
    if (in.remaining() != 0) in.fail("trailing bytes after " + std::to_string(n) + " points");
    return pts;
}

[[nodiscard]] inline std::string write_cameras_binary(const std::vector<RawCamera>& cams) {
    ByteWriter out;
    out.write<std::uint64_t>(cams.size());
    for (const auto& c : cams) {
        out.write<std::uint32_t>(c.id);
        out.write<std::int32_t>(static_cast<std::int32_t>(c.model_id));
        out.write<std::uint64_t>(c.width);
        out.write<std::uint64_t>(c.height);
        for (const double v : c.params) out.write(v);
    }
    return out.bytes();
}

[[nodiscard]] inline std::string write_images_binary(const std::vector<RawImage>& imgs) {
    ByteWriter out;
    out.write<std::uint64_t>(imgs.size());
    for (const auto& img : imgs) {
        out.write<std::uint32_t>(img.id);
        out.write(img.q.w);
        out.write(img.q.x);
        out.write(img.q.y);
        out.write(img.q.z);
        for (int k = 0; k < 3; ++k) out.write(img.t[k]);
        out.write<std::uint32_t>(img.camera_id);
        out.write_cstring(img.name);
        out.write<std::uint64_t>(img.keypoints.size());
        for (const auto& kp : img.keypoints) {
            out.write(kp.x);
            out.write(kp.y);
            out.write<std::uint64_t>(kp.point_id);
        }
    }
    return out.bytes();
}

[[nodiscard]] inline std::string write_points_binary(const std::vector<RawPoint>& pts) {
    ByteWriter out;
    out.write<std::uint64_t>(pts.size());
    for (const auto& p : pts) {
        out.write<std::uint64_t>(p.id);
        for (int k = 0; k < 3; ++k) out.write(p.xyz[k]);
        out.write<std::uint8_t>(p.rgb.r);
        out.write<std::uint8_t>(p.rgb.g);
        out.write<std::uint8_t>(p.rgb.b);
        out.write(p.error);
        out.write<std::uint64_t>(p.track.size());
        for (const auto& [image_id, idx] : p.track) {
            out.write<std::uint32_t>(image_id);
            out.write<std::uint32_t>(idx);
        }
    }
    return out.bytes();
}

// ---------------------------------------------------------------------------
// Text

/// Splits `data` into lines, remembering 1-based line numbers for errors.
class LineCursor {
public:
    LineCursor(std::string_view data, std::string name) : data_(data), name_(std::move(name)) {}

    /// Next line that is neither blank nor a '#' comment.
    [[nodiscard]] bool next_record(std::string_view& line) {
        while (next_raw(line)) {
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string_view::npos || line[first] == '#') continue;
            return true;
        }
        return false;
    }

    /// Next physical line, whatever it holds; false at end of data.
    [[nodiscard]] bool next_raw(std::string_view& line) {
        if (pos_ >= data_.size()) return false;
        auto end = data_.find('\n', pos_);
        if (end == std::string_view::npos) end = data_.size();
        line = data_.substr(pos_, end - pos_);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos_ = end + 1;
        ++line_no_;
        return true;
    }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(name_, line_no_, what); }

private:
    std::string_view data_;
    std::string name_;
    std::size_t pos_ = 0;
    std::size_t line_no_ = 0;
};

template <typename T>
[[nodiscard]] T field(const LineCursor& cur, std::string_view token, const char* what) {
    T v{};
    if (!parse_number(token, v)) cur.fail(std::string("bad ") + what + " '" + std::string(token) + "'");
    return v;
}

[[nodiscard]] inline std::vector<RawCamera> read_cameras_text(std::string_view data, const std::string& name) {
    LineCursor cur(data, name);
    std::vector<RawCamera> cams;
    std::string_view line;
    while (cur.next_record(line)) {
        const auto tok = split_ws(line);
        if (tok.size() < 4) cur.fail("camera record needs at least 4 fields");
        RawCamera c;
        c.id = field<std::uint32_t>(cur, tok[0], "camera id");
        std::int64_t model_id = 0;
        c.model_id = parse_number(tok[1], model_id)
                         ? static_cast<std::int64_t>(camera_model_from_id(model_id))
                         : static_cast<std::int64_t>(camera_model_from_name(tok[1]));
        c.width = field<std::uint64_t>(cur, tok[2], "width");
        c.height = field<std::uint64_t>(cur, tok[3], "height");
        const auto np = camera_model_num_params(static_cast<CameraModelKind>(c.model_id));
        if (tok.size() != 4 + np) cur.fail("camera record has wrong parameter count");
        for (std::size_t k = 0; k < np; ++k) c.params.push_back(field<double>(cur, tok[4 + k], "param"));
        cams.push_back(std::move(c));
    }
    return cams;
}

[[nodiscard]] inline std::vector<RawImage> read_images_text(std::string_view data, const std::string& name) {
    LineCursor cur(data, name);
    std::vector<RawImage> imgs;
    std::string_view line;
    while (cur.next_record(line)) {
        const auto tok = split_ws(line);
        if (tok.size() != 10) cur.fail("image record needs 10 fields");
        RawImage img;
        img.id = field<std::uint32_t>(cur, tok[0], "image id");
        img.q = {field<double>(cur, tok[1], "qw"), field<double>(cur, tok[2], "qx"),
                 field<double>(cur, tok[3], "qy"), field<double>(cur, tok[4], "qz")};
        for (int k = 0; k < 3; ++k) img.t[k] = field<double>(cur, tok[5 + k], "translation");
        img.camera_id = field<std::uint32_t>(cur, tok[8], "camera id");
        img.name = std::string(tok[9]);
        // The keypoint line always follows, even when empty.
        std::string_view kp_line;
        if (!cur.next_raw(kp_line)) cur.fail("missing keypoint line for image " + std::to_string(img.id));
        const auto kt = split_ws(kp_line);
        if (kt.size() % 3 != 0) cur.fail("keypoint line must hold (x, y, point3D_id) triples");
        for (std::size_t k = 0; k < kt.size(); k += 3) {
            RawKeypoint kp;
            kp.x = field<double>(cur, kt[k], "keypoint x");
            kp.y = field<double>(cur, kt[k + 1], "keypoint y");
            const auto pid = field<std::int64_t>(cur, kt[k + 2], "point3D id");
            kp.point_id = pid < 0 ? kInvalidPoint3DId : static_cast<std::uint64_t>(pid);
            img.keypoints.push_back(kp);
        }
        imgs.push_back(std::move(img));
    }
    return imgs;
}

[[nodiscard]] inline std::vector<RawPoint> read_points_text(std::string_view data, const std::string& name) {
    LineCursor cur(data, name);
    std::vector<RawPoint> pts;
    std::string_view line;
    while (cur.next_record(line)) {
        const auto tok = split_ws(line);
        if (tok.size() < 8 || (tok.size() - 8) % 2 != 0) cur.fail("malformed point record");
        RawPoint p;
        p.id = field<std::uint64_t>(cur, tok[0], "point id");
        for (int k = 0; k < 3; ++k) p.xyz[k] = field<double>(cur, tok[1 + k], "coordinate");
        p.rgb = {field<std::uint8_t>(cur, tok[4], "red"), field<std::uint8_t>(cur, tok[5], "green"),
                 field<std::uint8_t>(cur, tok[6], "blue")};
        p.error = field<double>(cur, tok[7], "error");
        for (std::size_t k = 8; k < tok.size(); k += 2) {
            p.track.emplace_back(field<std::uint32_t>(cur, tok[k], "track image id"),
                                 field<std::uint32_t>(cur, tok[k + 1], "track point2D index"));
        }
        pts.push_back(std::move(p));
    }
    return pts;
}

[[nodiscard]] inline std::string write_cameras_text(const std::vector<RawCamera>& cams) {
    std::ostringstream out;
    out << "# Camera list with one line of data per camera:\n"
        << "#   CAMERA_ID, MODEL, WIDTH, HEIGHT, PARAMS[]\n"
        << "# Number of cameras: " << cams.size() << "\n";
    for (const auto& c : cams) {
        out << c.id << ' ' << camera_model_name(static_cast<CameraModelKind>(c.model_id)) << ' ' << c.width << ' '
            << c.height;
        for (const double v : c.params) out << ' ' << format_double(v);
        out << '\n';
    }
    return out.str();
}

[[nodiscard]] inline std::string write_images_text(const std::vector<RawImage>& imgs) {
    std::ostringstream out;
    out << "# Image list with two lines of data per image:\n"
        << "#   IMAGE_ID, QW, QX, QY, QZ, TX, TY, TZ, CAMERA_ID, NAME\n"
        << "#   POINTS2D[] as (X, Y, POINT3D_ID)\n"
        << "# Number of images: " << imgs.size() << "\n";
    for (const auto& img : imgs) {
        if (img.name.find_first_of(" \t\n") != std::string::npos) {
            throw InvalidInputError("image name '" + img.name + "' cannot be stored in the text format");
        }
        out << img.id << ' ' << format_double(img.q.w) << ' ' << format_double(img.q.x) << ' '
            << format_double(img.q.y) << ' ' << format_double(img.q.z);
        for (int k = 0; k < 3; ++k) out << ' ' << format_double(img.t[k]);
        out << ' ' << img.camera_id << ' ' << img.name << '\n';
        bool first = true;
        for (const auto& kp : img.keypoints) {
            if (!first) out << ' ';
            first = false;
            out << format_double(kp.x) << ' ' << format_double(kp.y) << ' ';
            if (kp.point_id == kInvalidPoint3DId) {
                out << -1;
            } else {
                out << kp.point_id;
            }
        }
        out << '\n';
    }
    return out.str();
}

[[nodiscard]] inline std::string write_points_text(const std::vector<RawPoint>& pts) {
    std::ostringstream out;
    out << "# 3D point list with one line of data per point:\n"
        << "#   POINT3D_ID, X, Y, Z, R, G, B, ERROR, TRACK[] as (IMAGE_ID, POINT2D_IDX)\n"
        << "# Number of points: " << pts.size() << "\n";
    for (const auto& p : pts) {
        out << p.id;
        for (int k = 0; k < 3; ++k) out << ' ' << format_double(p.xyz[k]);
        out << ' ' << int{p.rgb.r} << ' ' << int{p.rgb.g} << ' ' << int{p.rgb.b} << ' ' << format_double(p.error);
        for (const auto& [image_id, idx] : p.track) out << ' ' << image_id << ' ' << idx;
        out << '\n';
    }
    return out.str();
}

inline const char* sparse_file_name(std::string_view stem, SparseFormat format) {
    const bool bin = format == SparseFormat::Binary;
    if (stem == "cameras") return bin ? "cameras.bin" : "cameras.txt";
    if (stem == "images") return bin ? "images.bin" : "images.txt";
    return bin ? "points3D.bin" : "points3D.txt";
}

}  // namespace detail

[[nodiscard]] inline bool has_sparse_model(const std::filesystem::path& dir, SparseFormat format) {
    namespace fs = std::filesystem;
    for (const char* stem : {"cameras", "images", "points3D"}) {
        if (!fs::is_regular_file(dir / detail::sparse_file_name(stem, format))) return false;
    }
    return true;
}

[[nodiscard]] inline ModelBundle parse_sparse_model(const std::filesystem::path& dir, SparseFormat format) {
    using namespace detail;
    const auto cam_path = dir / sparse_file_name("cameras", format);
    const auto img_path = dir / sparse_file_name("images", format);
    const auto pts_path = dir / sparse_file_name("points3D", format);
    const std::string cam_bytes = read_file_bytes(cam_path);
    const std::string img_bytes = read_file_bytes(img_path);
    const std::string pts_bytes = read_file_bytes(pts_path);
    RawModel raw;
    if (format == SparseFormat::Binary) {
        raw.cameras = read_cameras_binary(cam_bytes, cam_path.string());
        raw.images = read_images_binary(img_bytes, img_path.string());
        raw.points = read_points_binary(pts_bytes, pts_path.string());
    } else {
        raw.cameras = read_cameras_text(cam_bytes, cam_path.string());
        raw.images = read_images_text(img_bytes, img_path.string());
        raw.points = read_points_text(pts_bytes, pts_path.string());
    }
    return make_sparse_bundle(assemble_scene(raw));
}

/// Parses the model in `dir`, preferring the binary files when both exist.
[[nodiscard]] inline ModelBundle parse_sparse_model(const std::filesystem::path& dir) {
    if (has_sparse_model(dir, SparseFormat::Binary)) return parse_sparse_model(dir, SparseFormat::Binary);
    if (has_sparse_model(dir, SparseFormat::Text)) return parse_sparse_model(dir, SparseFormat::Text);
    throw IoError("no complete sparse model (cameras, images, points3D) in " + dir.string());
}

inline void serialize_sparse_model(const ModelBundle& bundle, const std::filesystem::path& dir,
                                   SparseFormat format = SparseFormat::Binary) {
    using namespace detail;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    const RawModel raw = disassemble_scene(bundle.scene);
    if (format == SparseFormat::Binary) {
        write_file_bytes(dir / "cameras.bin", write_cameras_binary(raw.cameras));
        write_file_bytes(dir / "images.bin", write_images_binary(raw.images));
        write_file_bytes(dir / "points3D.bin", write_points_binary(raw.points));
    } else {
        write_file_bytes(dir / "cameras.txt", write_cameras_text(raw.cameras));
        write_file_bytes(dir / "images.txt", write_images_text(raw.images));
        write_file_bytes(dir / "points3D.txt", write_points_text(raw.points));
    }
}

}  // namespace reconeval
