#include <bit>
#include <cstring>

#include <gtest/gtest.h>

#include "reconeval/io/sparse_model.hpp"
#include "support/fixtures.hpp"

using namespace reconeval;
using reconeval::testing::TempDir;

namespace {

// Little-endian byte appender written independently of ByteWriter.
struct Le {
    std::string bytes;

    template <typename T>
    Le& put(T v) {
        std::uint64_t raw = 0;
        if constexpr (std::is_floating_point_v<T>) {
            static_assert(sizeof(T) == 8);
            std::memcpy(&raw, &v, 8);
        } else {
            raw = static_cast<std::uint64_t>(v);
        }
        for (std::size_t i = 0; i < sizeof(T); ++i) bytes.push_back(static_cast<char>((raw >> (8 * i)) & 0xFF));
        return *this;
    }
    Le& str(const std::string& s) {
        bytes += s;
        bytes.push_back('\0');
        return *this;
    }
};

void write_model(const fs::path& dir, const std::string& cams, const std::string& imgs, const std::string& pts) {
    fs::create_directories(dir);
    write_file_bytes(dir / "cameras.bin", cams);
    write_file_bytes(dir / "images.bin", imgs);
    write_file_bytes(dir / "points3D.bin", pts);
}

struct HandFixture {
    std::string cams, imgs, pts;
};

// One PINHOLE camera, two images, one point seen by both.
HandFixture hand_fixture() {
    HandFixture f;
    Le c;
    c.put<std::uint64_t>(1).put<std::uint32_t>(7).put<std::int32_t>(1).put<std::uint64_t>(640).put<std::uint64_t>(480);
    c.put(500.0).put(510.0).put(320.0).put(240.0);
    f.cams = c.bytes;

    Le i;
    i.put<std::uint64_t>(2);
    // image 3: identity pose, keypoints: untracked, tracked
    i.put<std::uint32_t>(3).put(1.0).put(0.0).put(0.0).put(0.0).put(0.0).put(0.0).put(0.0).put<std::uint32_t>(7);
    i.str("a.png").put<std::uint64_t>(2);
    i.put(10.5).put(20.25).put<std::uint64_t>(0xFFFFFFFFFFFFFFFFull);
    i.put(320.0).put(240.0).put<std::uint64_t>(42);
    // image 9: shifted, one tracked keypoint
    i.put<std::uint32_t>(9).put(1.0).put(0.0).put(0.0).put(0.0).put(-1.0).put(0.0).put(0.0).put<std::uint32_t>(7);
    i.str("b.png").put<std::uint64_t>(1);
    i.put(220.0).put(240.0).put<std::uint64_t>(42);
    f.imgs = i.bytes;

    Le p;
    p.put<std::uint64_t>(1).put<std::uint64_t>(42).put(0.0).put(0.0).put(5.0);
    p.bytes += std::string{char(200), char(100), char(50)};
    p.put(0.25).put<std::uint64_t>(2);
    p.put<std::uint32_t>(3).put<std::uint32_t>(1).put<std::uint32_t>(9).put<std::uint32_t>(0);
    f.pts = p.bytes;
    return f;
}

}  // namespace

TEST(SparseModel, HandWrittenBinaryFixture) {
    TempDir tmp;
    const auto f = hand_fixture();
    write_model(tmp.path(), f.cams, f.imgs, f.pts);
    const ModelBundle b = parse_sparse_model(tmp.path(), SparseFormat::Binary);
    const auto& s = b.scene;
    ASSERT_EQ(s.cameras.size(), 1u);
    ASSERT_EQ(s.frames.size(), 2u);
    ASSERT_EQ(s.points.size(), 1u);
    const auto& cam = s.cameras.at(7);
    EXPECT_EQ(cam.model_kind, CameraModelKind::Pinhole);
    EXPECT_EQ(cam.fx, 500.0);
    EXPECT_EQ(cam.fy, 510.0);
    EXPECT_EQ(s.frames.at(3).name, "a.png");
    EXPECT_EQ(s.frames.at(9).pose.translation, Eigen::Vector3d(-1, 0, 0));
    EXPECT_FALSE(s.frames.at(3).keypoints[0].point_id.has_value());
    const auto& pt = s.points.at(42);
    EXPECT_EQ(pt.color, (Rgb{200, 100, 50}));
    ASSERT_EQ(pt.track.size(), 2u);
    EXPECT_EQ(pt.track[0].frame_id, 3u);
    EXPECT_EQ(pt.track[0].pixel, Eigen::Vector2d(320, 240));
    EXPECT_EQ(pt.track[1].frame_id, 9u);
    EXPECT_EQ(pt.track[1].pixel, Eigen::Vector2d(220, 240));
    EXPECT_EQ(b.source_kind, SourceKind::SparseSfM);
    EXPECT_EQ(b.native_reprojection_errors->at(3), 0.25);
    EXPECT_EQ(s.input_frame_total, 2u);

    // The writer reproduces the hand-made bytes exactly.
    TempDir out;
    serialize_sparse_model(b, out.path());
    EXPECT_EQ(read_file_bytes(out / "cameras.bin"), f.cams);
    EXPECT_EQ(read_file_bytes(out / "images.bin"), f.imgs);
    EXPECT_EQ(read_file_bytes(out / "points3D.bin"), f.pts);
}

TEST(SparseModel, EmptyModel) {
    TempDir tmp;
    const std::string zero = Le{}.put<std::uint64_t>(0).bytes;
    write_model(tmp.path(), zero, zero, zero);
    const auto b = parse_sparse_model(tmp.path());
    EXPECT_TRUE(b.scene.cameras.empty());
    EXPECT_TRUE(b.scene.frames.empty());
    EXPECT_TRUE(b.scene.points.empty());

    TempDir out;
    serialize_sparse_model(b, out.path());
    for (const char* f : {"cameras.bin", "images.bin", "points3D.bin"}) EXPECT_EQ(read_file_bytes(out / f), zero);
}

TEST(SparseModel, TruncatedFileReportsOffset) {
    TempDir tmp;
    auto f = hand_fixture();
    f.imgs.resize(f.imgs.size() - 5);
    write_model(tmp.path(), f.cams, f.imgs, f.pts);
    try {
        (void)parse_sparse_model(tmp.path());
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(e.file().find("images.bin"), std::string::npos);
        EXPECT_GT(e.offset(), 0u);
    }
}

TEST(SparseModel, TrailingBytesRejected) {
    TempDir tmp;
    auto f = hand_fixture();
    f.pts += "x";
    write_model(tmp.path(), f.cams, f.imgs, f.pts);
    EXPECT_THROW((void)parse_sparse_model(tmp.path()), ParseError);
}

TEST(SparseModel, UnsupportedCameraModelIsNamed) {
    TempDir tmp;
    auto f = hand_fixture();
    f.cams[8 + 4] = 4;  // OPENCV
    write_model(tmp.path(), f.cams, f.imgs, f.pts);
    try {
        (void)parse_sparse_model(tmp.path());
        FAIL() << "expected UnsupportedModelError";
    } catch (const UnsupportedModelError& e) {
        EXPECT_NE(std::string(e.what()).find('4'), std::string::npos);
    }
}

TEST(SparseModel, DanglingTrackRejected) {
    TempDir tmp;
    auto f = hand_fixture();
    // first track element image id 3 -> 4
    const std::size_t off = 8 + 8 + 24 + 3 + 8 + 8;
    ASSERT_EQ(f.pts[off], 3);
    f.pts[off] = 4;
    write_model(tmp.path(), f.cams, f.imgs, f.pts);
    EXPECT_THROW((void)parse_sparse_model(tmp.path()), IntegrityError);
}

TEST(SparseModel, MissingFilesRejected) {
    TempDir tmp;
    EXPECT_THROW((void)parse_sparse_model(tmp.path()), IoError);
}

TEST(SparseModel, RoundTripRandomScenes) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const ModelBundle b = make_sparse_bundle(reconeval::testing::random_sparse_scene(seed, 300));
        for (const auto fmt : {SparseFormat::Binary, SparseFormat::Text}) {
            TempDir a, c;
            serialize_sparse_model(b, a.path(), fmt);
            const ModelBundle parsed = parse_sparse_model(a.path(), fmt);
            if (fmt == SparseFormat::Binary) {
                EXPECT_EQ(parsed.scene, b.scene) << "seed " << seed;
                EXPECT_EQ(parsed.native_reprojection_errors, b.native_reprojection_errors);
            }
            serialize_sparse_model(parsed, c.path(), fmt);
            EXPECT_EQ(reconeval::testing::snapshot_tree(a.path()), reconeval::testing::snapshot_tree(c.path()))
                << "seed " << seed;
        }
    }
}

TEST(SparseModel, BinaryTextParity) {
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        const ModelBundle b = make_sparse_bundle(reconeval::testing::random_sparse_scene(seed));
        TempDir bin, txt;
        serialize_sparse_model(b, bin.path(), SparseFormat::Binary);
        serialize_sparse_model(b, txt.path(), SparseFormat::Text);
        const auto sb = parse_sparse_model(bin.path(), SparseFormat::Binary).scene;
        const auto st = parse_sparse_model(txt.path(), SparseFormat::Text).scene;
        ASSERT_EQ(sb.cameras.size(), st.cameras.size());
        for (const auto& [id, cam] : sb.cameras) {
            const auto& ct = st.cameras.at(id);
            EXPECT_EQ(cam.model_kind, ct.model_kind);
            const auto pa = cam.params(), pb = ct.params();
            for (std::size_t k = 0; k < pa.size(); ++k) EXPECT_NEAR(pa[k], pb[k], 1e-9);
        }
        ASSERT_EQ(sb.frames.size(), st.frames.size());
        for (const auto& [id, f] : sb.frames) {
            const auto& ft = st.frames.at(id);
            EXPECT_EQ(f.name, ft.name);
            EXPECT_NEAR(f.pose.rotation.w, ft.pose.rotation.w, 1e-9);
            EXPECT_NEAR(f.pose.rotation.z, ft.pose.rotation.z, 1e-9);
            EXPECT_LT((f.pose.translation - ft.pose.translation).norm(), 1e-9);
            ASSERT_EQ(f.keypoints.size(), ft.keypoints.size());
            for (std::size_t k = 0; k < f.keypoints.size(); ++k) {
                EXPECT_LT((f.keypoints[k].pixel - ft.keypoints[k].pixel).norm(), 1e-9);
                EXPECT_EQ(f.keypoints[k].point_id, ft.keypoints[k].point_id);
            }
        }
        ASSERT_EQ(sb.points.size(), st.points.size());
        for (const auto& [id, p] : sb.points) {
            const auto& pt = st.points.at(id);
            EXPECT_LT((p.position - pt.position).norm(), 1e-9);
            EXPECT_EQ(p.color, pt.color);
            EXPECT_NEAR(p.error, pt.error, 1e-9);
            ASSERT_EQ(p.track.size(), pt.track.size());
        }
    }
}

TEST(SparseModel, CanonicalOrderIndependentOfInsertionOrder) {
    const auto scene = reconeval::testing::random_sparse_scene(7);
    ReconstructionScene shuffled;
    shuffled.input_frame_total = scene.input_frame_total;
    // maps are ordered, so insert in reverse to exercise a different build order
    for (auto it = scene.cameras.rbegin(); it != scene.cameras.rend(); ++it) shuffled.cameras.insert(*it);
    for (auto it = scene.frames.rbegin(); it != scene.frames.rend(); ++it) shuffled.frames.insert(*it);
    for (auto it = scene.points.rbegin(); it != scene.points.rend(); ++it) shuffled.points.insert(*it);
    TempDir a, b;
    serialize_sparse_model(make_sparse_bundle(scene), a.path());
    serialize_sparse_model(make_sparse_bundle(shuffled), b.path());
    EXPECT_EQ(reconeval::testing::snapshot_tree(a.path()), reconeval::testing::snapshot_tree(b.path()));
}

TEST(SparseModel, TextFormatAcceptsCommentsAndBlankLines) {
    TempDir tmp;
    write_file_bytes(tmp / "cameras.txt", "# cams\n\n1 SIMPLE_PINHOLE 100 80 90 50 40\n");
    write_file_bytes(tmp / "images.txt",
                     "# images\n5 1 0 0 0 0 0 0 1 f.png\n50 40 11 1 2 -1\n");
    write_file_bytes(tmp / "points3D.txt", "# points\n11 0 0 1 1 2 3 0.5 5 0\n");
    const auto b = parse_sparse_model(tmp.path(), SparseFormat::Text);
    EXPECT_EQ(b.scene.cameras.at(1).model_kind, CameraModelKind::SimplePinhole);
    EXPECT_EQ(b.scene.frames.at(5).keypoints.size(), 2u);
    EXPECT_FALSE(b.scene.frames.at(5).keypoints[1].point_id);
    EXPECT_EQ(b.scene.points.at(11).track.at(0).pixel, Eigen::Vector2d(50, 40));
}

TEST(SparseModel, TextParseErrorCarriesLine) {
    TempDir tmp;
    write_file_bytes(tmp / "cameras.txt", "# c\n1 PINHOLE 100 80 90 abc 50 40\n");
    write_file_bytes(tmp / "images.txt", "");
    write_file_bytes(tmp / "points3D.txt", "");
    try {
        (void)parse_sparse_model(tmp.path(), SparseFormat::Text);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.offset(), 2u);
    }
}

TEST(SparseModel, SerializingTracksWithoutKeypointsFails) {
    ReconstructionScene s;
    const double p[] = {100, 50, 50};
    s.cameras.emplace(1, CameraIntrinsics::from_params(CameraModelKind::SimplePinhole, 100, 100, p));
    FrameRecord f;
    f.frame_id = 1;
    f.camera_id = 1;
    f.name = "x.png";
    s.frames.emplace(1, f);
    ScenePoint pt;
    pt.id = 1;
    pt.position = {0, 0, 1};
    pt.track.push_back({1, {50, 50}, std::nullopt});
    s.points.emplace(1, pt);
    s.input_frame_total = 1;
    TempDir tmp;
    EXPECT_THROW(serialize_sparse_model(make_sparse_bundle(s), tmp.path()), InvalidInputError);
}
