// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "stickform/autodiff.h"
#include "stickform/cuboid.h"
#include "common/test_util.h"

namespace stickform {
namespace {

using testing::angle_axis_matrix;
using testing::matrix_apply;
using testing::random_stick;
using testing::random_vec;

void expect_vec_near(const Vec3& a, const Vec3& b, double tol)
{
    EXPECT_NEAR(a.x, b.x, tol);
    EXPECT_NEAR(a.y, b.y, tol);
    EXPECT_NEAR(a.z, b.z, tol);
}

TEST(Rotation, ParallelIsIdentity)
{
    const auto r = rotation_from_z({0.0, 0.0, 2.0});
    EXPECT_EQ(r.theta, 0.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_NEAR(r.matrix.m[i][j], i == j ? 1.0 : 0.0, 1e-15);
}

TEST(Rotation, QuarterTurnAboutY)
{
    const auto r = rotation_from_z({1.0, 0.0, 0.0});
    EXPECT_NEAR(r.theta, std::numbers::pi / 2, 1e-15);
    expect_vec_near(r.axis, {0.0, 1.0, 0.0}, 1e-15);
    expect_vec_near(r.matrix * Vec3{0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}, 1e-15);
    expect_vec_near(r.matrix * Vec3{1.0, 0.0, 0.0}, {0.0, 0.0, -1.0}, 1e-15);
}

TEST(Rotation, AntiparallelUsesXAxis)
{
    const auto r = rotation_from_z({0.0, 0.0, -1.0});
    EXPECT_NEAR(r.theta, std::numbers::pi, 1e-15);
    expect_vec_near(r.axis, {1.0, 0.0, 0.0}, 0.0);
    expect_vec_near(r.matrix * Vec3{0.0, 0.0, 1.0}, {0.0, 0.0, -1.0}, 1e-12);
    const Mat3 rrt = r.matrix * r.matrix.transposed();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_NEAR(rrt.m[i][j], i == j ? 1.0 : 0.0, 1e-12);
    const auto oracle = angle_axis_matrix(r.theta, r.axis);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_NEAR(r.matrix.m[i][j], oracle[i][j], 1e-12);
}

TEST(Rotation, ZeroDirectionThrows)
{
    EXPECT_THROW(rotation_from_z({0.0, 0.0, 0.0}), DegenerateStickError);
}

TEST(Rotation, MatchesAngleAxisFormula)
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 2000; ++trial) {
        const Vec3 d = random_vec(rng);
        if (norm(d) < 1e-3) continue;
        const auto r = rotation_from_z(d);
        const auto oracle = angle_axis_matrix(r.theta, r.axis);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) ASSERT_NEAR(r.matrix.m[i][j], oracle[i][j], 1e-9);
        expect_vec_near(r.matrix * Vec3{0.0, 0.0, 1.0}, d / norm(d), 1e-12);
    }
}

TEST(Rotation, ContinuousAwayFromAntiparallel)
{
    std::mt19937_64 rng(3);
    const double delta = 1e-6;
    for (int trial = 0; trial < 1000; ++trial) {
        const Vec3 d = random_vec(rng);
        if (norm(d) < 1e-2 || d.z / norm(d) < -0.9) continue;
        const Vec3 e = d + random_vec(rng) * delta;
        const auto a = rotation_from_z(d).matrix;
        const auto b = rotation_from_z(e).matrix;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) ASSERT_LE(std::abs(a.m[i][j] - b.m[i][j]), 1e3 * delta);
    }
    // Near parallel the form has no 0/0.
    const auto a = rotation_from_z({1e-9, 0.0, 1.0}).matrix;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_NEAR(a.m[i][j], i == j ? 1.0 : 0.0, 1e-8);
}

TEST(Frame, CanonicalStick)
{
    const Frame f = frame_from_stick(Stick{{0, 0, 0}, {0, 0, 1}, 1.0, 1.0});
    expect_vec_near(f.xb, {1, 0, 0}, 0.0);
    expect_vec_near(f.yb, {0, 1, 0}, 0.0);
    expect_vec_near(f.zb, {0, 0, 1}, 0.0);
    expect_vec_near(f.ob, {-0.5, -0.5, 0}, 0.0);
    EXPECT_DOUBLE_EQ(volume(f), 1.0);
}

TEST(Frame, StickAlongX)
{
    const Frame f = frame_from_stick(Stick{{0, 0, 0}, {2, 0, 0}, 0.5, 0.5});
    expect_vec_near(f.zb, {2, 0, 0}, 0.0);
    EXPECT_NEAR(norm(f.xb), 0.5, 1e-15);
    EXPECT_NEAR(dot(f.xb, f.zb), 0.0, 1e-15);
}

TEST(Frame, WidthScalingIsLinear)
{
    std::mt19937_64 rng(5);
    const Stick s = random_stick(rng);
    Stick s2 = s;
    s2.w *= 2.0;
    const Frame a = frame_from_stick(s);
    const Frame b = frame_from_stick(s2);
    expect_vec_near(b.xb, a.xb * 2.0, 1e-15);
    expect_vec_near(b.ob, a.ob - a.xb * 0.5, 1e-15);
}

TEST(Frame, RandomSticksSatisfyInvariants)
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10000; ++trial) {
        const Stick s = random_stick(rng);
        const Frame f = frame_from_stick(s);
        ASSERT_NEAR(norm(f.xb), s.w, 1e-9);
        ASSERT_NEAR(norm(f.yb), s.l, 1e-9);
        ASSERT_NEAR(norm(f.zb), distance(s.p1, s.p2), 1e-9);
        ASSERT_NEAR(dot(f.xb, f.yb), 0.0, 1e-9);
        ASSERT_NEAR(dot(f.xb, f.zb), 0.0, 1e-9);
        ASSERT_NEAR(dot(f.yb, f.zb), 0.0, 1e-9);
        ASSERT_LE(distance(f.apply({0.5, 0.5, 0.0}), s.p1), 1e-9);
        ASSERT_LE(distance(f.apply({0.5, 0.5, 1.0}), s.p2), 1e-9);
        ASSERT_LE(distance(f.ob + f.xb * 0.5 + f.yb * 0.5, s.p1), 1e-9);
    }
}

TEST(Frame, DegenerateStickThrows)
{
    EXPECT_THROW(frame_from_stick(Stick{{1, 1, 1}, {1, 1, 1}, 1.0, 1.0}), DegenerateStickError);
}

TEST(Frame, DifferentiableEvaluationMatchesPlain)
{
    std::mt19937_64 rng(9);
    const Stick s = random_stick(rng);
    ad::Tape tape;
    BasicStick<ad::Var> v{{tape.variable(s.p1.x), tape.variable(s.p1.y), tape.variable(s.p1.z)},
                          {tape.variable(s.p2.x), tape.variable(s.p2.y), tape.variable(s.p2.z)},
                          tape.variable(s.w),
                          tape.variable(s.l)};
    const auto fv = frame_from_stick(v);
    const Frame f = frame_from_stick(s);
    for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(fv.xb[i].value(), f.xb[i]);
        EXPECT_EQ(fv.yb[i].value(), f.yb[i]);
        EXPECT_EQ(fv.ob[i].value(), f.ob[i]);
    }
}

TEST(KeyPoints, UnitOrdering)
{
    const auto& k = unit_key_points();
    expect_vec_near(k[5], {1, 0, 1}, 0.0);
    expect_vec_near(k[8], {0, 0, 0.5}, 0.0);    // edge (0,1)
    expect_vec_near(k[19], {1, 1, 0.5}, 0.0);   // edge (6,7)
    expect_vec_near(k[kKeyPointP1], {0.5, 0.5, 0}, 0.0);
    expect_vec_near(k[kKeyPointP2], {0.5, 0.5, 1}, 0.0);
    expect_vec_near(k[20], {0, 0.5, 0.5}, 0.0);
}

TEST(KeyPoints, CanonicalStickTopFace)
{
    const auto k = key_points(frame_from_stick(Stick{{0, 0, 0}, {0, 0, 1}, 1.0, 1.0}));
    expect_vec_near(k[25], {0, 0, 1}, 0.0);
}

TEST(KeyPoints, VertexMeanIsCenterAndMatchesMatrixOracle)
{
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 500; ++trial) {
        const Frame f = frame_from_stick(random_stick(rng));
        const auto k = key_points(f);
        Vec3 mean;
        for (int i = 0; i < 8; ++i) mean += k[i] / 8.0;
        expect_vec_near(mean, f.ob + (f.xb + f.yb + f.zb) * 0.5, 1e-12);
        for (int i = 0; i < kKeyPointCount; ++i) {
            ASSERT_EQ(k[i], f.apply(unit_key_points()[i]));
            ASSERT_LE(distance(k[i], matrix_apply(f, unit_key_points()[i])), 1e-12);
        }
    }
}

TEST(Sampling, RoundTripOnFaces)
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const Frame f = frame_from_stick(trial == 0 ? Stick{{0, 0, 0}, {0, 0, 1}, 1, 1} : random_stick(rng));
        const PointCloud pc = sample_surface(f, trial == 0 ? 6 : 200, 1234 + trial);
        const FrameInverse inv(f);
        for (const Vec3& p : pc.points) {
            const Vec3 u = inv.local(p);
            double face_gap = 1.0;
            for (int a = 0; a < 3; ++a) {
                ASSERT_GE(u[a], -1e-12);
                ASSERT_LE(u[a], 1.0 + 1e-12);
                face_gap = std::min({face_gap, std::abs(u[a]), std::abs(u[a] - 1.0)});
            }
            ASSERT_LE(face_gap, 1e-12);
        }
    }
}

TEST(Sampling, AreaWeighting)
{
    const Frame f = frame_from_stick(Stick{{0, 0, 0}, {0, 0, 10}, 1, 1});
    const std::size_t n = 20000;
    const PointCloud pc = sample_surface(f, n, 99);
    std::size_t caps = 0;
    const FrameInverse inv(f);
    for (const Vec3& p : pc.points) {
        const double z = inv.local(p).z;
        if (z == 0.0 || z == 1.0 || std::abs(z) < 1e-12 || std::abs(z - 1.0) < 1e-12) ++caps;
    }
    const double prob = 2.0 / 42.0;
    const double sigma = std::sqrt(n * prob * (1 - prob));
    EXPECT_NEAR(double(caps), n * prob, 3 * sigma);
}

TEST(Sampling, DeterministicAndRejectsZero)
{
    const Frame f = frame_from_stick(Stick{{0, 0, 0}, {0, 0, 1}, 1, 1});
    EXPECT_EQ(sample_surface(f, 10, 5).points, sample_surface(f, 10, 5).points);
    EXPECT_THROW(sample_surface(f, 0, 5), ValidationError);
}

TEST(Queries, LocalCoords)
{
    std::mt19937_64 rng(19);
    const Stick s = random_stick(rng);
    const Frame f = frame_from_stick(s);
    expect_vec_near(local_coords(f, s.p1), {0.5, 0.5, 0.0}, 1e-12);
    expect_vec_near(local_coords(f, f.ob), {0, 0, 0}, 1e-12);
    for (int i = 0; i < 1000; ++i) {
        const Vec3 p = random_vec(rng, -3, 3);
        ASSERT_LE(distance(f.apply(local_coords(f, p)), p), 1e-10);
    }
}

TEST(Queries, ContainsAndFaceDistance)
{
    const Frame f = frame_from_stick(Stick{{0, 0, 0}, {0, 0, 1}, 1, 1});
    EXPECT_TRUE(contains(f, {0, 0, 0.5}));
    EXPECT_DOUBLE_EQ(face_distance(f, {0, 0, 0.5}), -0.5);
    EXPECT_FALSE(contains(f, {0, 0, 2}));
    EXPECT_DOUBLE_EQ(face_distance(f, {0, 0, 2}), 1.0);
    EXPECT_DOUBLE_EQ(volume(f), 1.0);
    EXPECT_DOUBLE_EQ(surface_area(f), 6.0);
}

TEST(Queries, FaceDistanceInWorldUnits)
{
    const Frame f = frame_from_stick(Stick{{0, 0, 0}, {0, 0, 4}, 2, 1});
    EXPECT_NEAR(face_distance(f, {0, 0, 2}), -0.5, 1e-12);  // nearest faces are the l = 1 pair
    EXPECT_NEAR(face_distance(f, {3, 0, 2}), 2.0, 1e-12);
}

}  // namespace
}  // namespace stickform
