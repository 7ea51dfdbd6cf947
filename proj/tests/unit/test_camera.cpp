#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "reconeval/core/camera.hpp"
#include "reconeval/synth/synth.hpp"
#include "support/oracles.hpp"

using namespace reconeval;

namespace {

Quaternion random_unit_quat(SeededRng& rng) {
    Quaternion q{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
    return q.normalized();
}

CameraIntrinsics pinhole100() {
    const double p[] = {100.0, 100.0, 50.0, 50.0};
    return CameraIntrinsics::from_params(CameraModelKind::Pinhole, 100, 100, p);
}

}  // namespace

TEST(QuatToMatrix, IdentityQuaternion) {
    EXPECT_TRUE(quat_to_matrix({1, 0, 0, 0}).isApprox(Eigen::Matrix3d::Identity(), 0.0));
}

TEST(QuatToMatrix, HalfTurnAboutX) {
    const Eigen::Matrix3d expected = Eigen::Vector3d(1, -1, -1).asDiagonal();
    EXPECT_EQ(quat_to_matrix({0, 1, 0, 0}), expected);
}

TEST(QuatToMatrix, QuarterTurnAboutZ) {
    const double h = std::sqrt(0.5);
    const Eigen::Matrix3d r = quat_to_matrix({h, 0, 0, h});
    const Eigen::Vector3d y = r * Eigen::Vector3d(1, 0, 0);
    EXPECT_NEAR(y.x(), 0.0, 1e-15);
    EXPECT_NEAR(y.y(), 1.0, 1e-15);
    EXPECT_NEAR(y.z(), 0.0, 1e-15);
}

TEST(QuatToMatrix, RejectsBadQuaternions) {
    EXPECT_THROW((void)quat_to_matrix({0, 0, 0, 0}), InvalidInputError);
    EXPECT_THROW((void)quat_to_matrix({2, 0, 0, 0}), InvalidInputError);
    EXPECT_THROW((void)quat_to_matrix({NAN, 0, 0, 0}), InvalidInputError);
}

TEST(QuatToMatrix, MatchesEigenAndIsOrthonormal) {
    SeededRng rng(1);
    for (int k = 0; k < 1000; ++k) {
        const Quaternion q = random_unit_quat(rng);
        const Eigen::Matrix3d r = quat_to_matrix(q);
        EXPECT_TRUE(r.isApprox(oracle::rotation(q), 1e-12));
        EXPECT_TRUE((r * r.transpose()).isApprox(Eigen::Matrix3d::Identity(), 1e-12));
        EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
        const Eigen::Vector3d v(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10));
        EXPECT_NEAR((r * v).norm(), v.norm(), 1e-9);
    }
}

TEST(MatrixToQuat, RoundTripsThroughMatrix) {
    SeededRng rng(2);
    for (int k = 0; k < 1000; ++k) {
        Quaternion q = random_unit_quat(rng);
        if (q.w < 0) q = {-q.w, -q.x, -q.y, -q.z};
        const Quaternion back = matrix_to_quat(quat_to_matrix(q));
        EXPECT_NEAR(back.w, q.w, 1e-12);
        EXPECT_NEAR(back.x, q.x, 1e-12);
        EXPECT_NEAR(back.y, q.y, 1e-12);
        EXPECT_NEAR(back.z, q.z, 1e-12);
    }
}

TEST(Quaternion, NormalizedLeavesUnitInputUntouched) {
    const Quaternion q{0.5, 0.5, 0.5, 0.5};
    EXPECT_EQ(q.normalized(), q);
    const Quaternion n = Quaternion{2, 0, 0, 0}.normalized();
    EXPECT_EQ(n, (Quaternion{1, 0, 0, 0}));
}

TEST(WorldToCamera, Examples) {
    EXPECT_EQ(world_to_camera(CameraPose::identity(), {1, 2, 3}), Eigen::Vector3d(1, 2, 3));
    const CameraPose shifted{{1, 0, 0, 0}, {0, 0, 5}};
    EXPECT_EQ(world_to_camera(shifted, {0, 0, -5}), Eigen::Vector3d(0, 0, 0));
    const double h = std::sqrt(0.5);
    const Eigen::Vector3d y = world_to_camera({{h, 0, 0, h}, Eigen::Vector3d::Zero()}, {1, 0, 0});
    EXPECT_TRUE(y.isApprox(Eigen::Vector3d(0, 1, 0), 1e-15));
}

TEST(WorldToCamera, InversePoseRestoresPoint) {
    SeededRng rng(3);
    for (int k = 0; k < 1000; ++k) {
        const CameraPose pose{random_unit_quat(rng), {rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(-50, 50)}};
        const Eigen::Vector3d x(rng.uniform(-100, 100), rng.uniform(-100, 100), rng.uniform(-100, 100));
        const Eigen::Vector3d back = world_to_camera(pose.inverse(), world_to_camera(pose, x));
        EXPECT_LT((back - x).norm(), 1e-9);
        EXPECT_LT((pose.center() - pose.inverse().translation).norm(), 1e-9);
    }
}

TEST(Project, Examples) {
    const auto cam = pinhole100();
    EXPECT_EQ(*project(cam, {0, 0, 1}), Eigen::Vector2d(50, 50));
    EXPECT_EQ(*project(cam, {1, 0, 2}), Eigen::Vector2d(100, 50));
    EXPECT_FALSE(project(cam, {0, 0, -1}).has_value());
    EXPECT_FALSE(project(cam, {1, 1, 0}).has_value());
}

TEST(Project, RadialModelsMatchOracle) {
    SeededRng rng(4);
    for (auto kind : {CameraModelKind::SimplePinhole, CameraModelKind::Pinhole, CameraModelKind::SimpleRadial,
                      CameraModelKind::Radial}) {
        std::vector<double> params;
        const double f = rng.uniform(200, 800);
        switch (kind) {
            case CameraModelKind::SimplePinhole: params = {f, 320, 240}; break;
            case CameraModelKind::Pinhole: params = {f, f * 1.01, 320, 240}; break;
            case CameraModelKind::SimpleRadial: params = {f, 320, 240, -0.03}; break;
            case CameraModelKind::Radial: params = {f, 320, 240, 0.02, -0.01}; break;
        }
        const auto cam = CameraIntrinsics::from_params(kind, 640, 480, params);
        for (int k = 0; k < 200; ++k) {
            const CameraPose pose{random_unit_quat(rng), {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(3, 6)}};
            const Eigen::Vector3d xw = pose.inverse().translation +
                                       quat_to_matrix(pose.rotation).transpose() *
                                           Eigen::Vector3d(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(1, 5));
            const auto a = project(cam, world_to_camera(pose, xw));
            const auto b = oracle::project(cam, pose, xw);
            ASSERT_TRUE(a && b);
            EXPECT_LT((*a - *b).norm(), 1e-9);
        }
    }
}

TEST(BackProject, ReprojectsToSamePixel) {
    SeededRng rng(5);
    for (int k = 0; k < 1000; ++k) {
        const double p[] = {rng.uniform(50, 2000), rng.uniform(50, 2000), rng.uniform(0, 1000), rng.uniform(0, 1000)};
        const auto cam = CameraIntrinsics::from_params(CameraModelKind::Pinhole, 1000, 1000, p);
        const Eigen::Vector2d px(rng.uniform(-100, 1100), rng.uniform(-100, 1100));
        const double z = rng.uniform(0.01, 1000);
        const auto again = project(cam, back_project(cam, px, z));
        ASSERT_TRUE(again);
        EXPECT_LT((*again - px).norm(), 1e-9);
    }
}

TEST(BackProject, UndistortsRadialModels) {
    const double p[] = {500, 320, 240, 0.05, -0.02};
    const auto cam = CameraIntrinsics::from_params(CameraModelKind::Radial, 640, 480, p);
    const Eigen::Vector2d px(600, 50);
    EXPECT_LT((*project(cam, back_project(cam, px, 3.0)) - px).norm(), 1e-9);
}

TEST(CameraIntrinsics, ValidatesParameters) {
    const double two[] = {1, 2};
    EXPECT_THROW((void)CameraIntrinsics::from_params(CameraModelKind::Pinhole, 10, 10, two), InvalidInputError);
    const double neg[] = {-1, 5, 5};
    EXPECT_THROW((void)CameraIntrinsics::from_params(CameraModelKind::SimplePinhole, 10, 10, neg), InvalidInputError);
    const double ok[] = {1, 5, 5};
    EXPECT_THROW((void)CameraIntrinsics::from_params(CameraModelKind::SimplePinhole, 0, 10, ok), InvalidInputError);

    CameraIntrinsics c = CameraIntrinsics::from_params(CameraModelKind::SimplePinhole, 10, 10, ok);
    c.fy = 2;
    EXPECT_THROW(c.validate(), InvalidInputError);
    c = CameraIntrinsics::from_params(CameraModelKind::SimplePinhole, 10, 10, ok);
    c.distortion = {0.1};
    EXPECT_THROW(c.validate(), InvalidInputError);
}

TEST(CameraIntrinsics, ParamsRoundTrip) {
    const double p[] = {300, 320, 240, 0.01, 0.002};
    const auto c = CameraIntrinsics::from_params(CameraModelKind::Radial, 640, 480, p);
    EXPECT_EQ(c.params(), std::vector<double>(std::begin(p), std::end(p)));
}

TEST(CameraModel, NamesAndIds) {
    EXPECT_EQ(camera_model_from_name("SIMPLE_RADIAL"), CameraModelKind::SimpleRadial);
    EXPECT_EQ(camera_model_from_id(3), CameraModelKind::Radial);
    EXPECT_THROW((void)camera_model_from_id(4), UnsupportedModelError);
    EXPECT_THROW((void)camera_model_from_name("OPENCV"), UnsupportedModelError);
    EXPECT_EQ(camera_model_num_params(CameraModelKind::SimplePinhole), 3u);
    EXPECT_EQ(camera_model_num_params(CameraModelKind::Radial), 5u);
}
