// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "stickform/error.h"
#include "stickform/vec.h"

namespace stickform {

/// Sticks shorter than this are rejected.
inline constexpr double kStickEpsilon = 1e-8;

/// Below this value of 1 + cos(theta) the direction is treated as
/// antiparallel to +z and the rotation axis is fixed to +x.
inline constexpr double kAntiparallelTolerance = 1e-10;

/// A cuboid given by its two axis end points and its cross-section size.
/// `p1` and `p2` are the centers of the local -z and +z faces; `w` spans the
/// local x axis and `l` the local y axis. Rotation about the axis is zero.
template <class T>
struct BasicStick {
    BasicVec3<T> p1;
    BasicVec3<T> p2;
    T w{};
    T l{};
};

/// Affine frame mapping the unit cube onto a cuboid:
/// world = ob + u.x * xb + u.y * yb + u.z * zb.
template <class T>
struct BasicFrame {
    BasicVec3<T> xb;
    BasicVec3<T> yb;
    BasicVec3<T> zb;
    BasicVec3<T> ob;

    BasicVec3<T> apply(const Vec3& local) const
    {
        return ob + xb * local.x + yb * local.y + zb * local.z;
    }
};

using Stick = BasicStick<double>;
using Frame = BasicFrame<double>;

struct RotationDecomposition {
    double theta = 0.0;  ///< radians in [0, pi]
    Vec3 axis{1.0, 0.0, 0.0};
    Mat3 matrix = Mat3::identity();
};

/// Columns of the rotation taking +z onto `direction`. Uses the
/// normalization-free form of Rodrigues' formula,
///   R = I + [v]x + [v]x^2 / (1 + c),  v = e_z x d, c = e_z . d,
/// which equals the angle/axis form everywhere it is defined and stays smooth
/// through the parallel case. The antiparallel case is the half turn about +x.
template <class T>
std::array<BasicVec3<T>, 3> rotation_columns(const BasicVec3<T>& direction)
{
    const T len = norm(direction);
    if (!(value_of(len) > kStickEpsilon))
        throw DegenerateStickError("degenerate stick: zero-length direction");
    const BasicVec3<T> d = direction / len;
    const T c = d.z;
    if (value_of(c) + 1.0 < kAntiparallelTolerance) {
        return {BasicVec3<T>{T(1.0), T(0.0), T(0.0)}, BasicVec3<T>{T(0.0), T(-1.0), T(0.0)},
                BasicVec3<T>{T(0.0), T(0.0), T(-1.0)}};
    }
    const T k = 1.0 / (1.0 + c);
    const T kxy = -k * d.x * d.y;
    return {BasicVec3<T>{1.0 - k * d.x * d.x, kxy, -d.x},
            BasicVec3<T>{kxy, 1.0 - k * d.y * d.y, -d.y},
            BasicVec3<T>{d.x, d.y, c}};
}

/// Angle, axis and matrix of the rotation taking +z onto `direction`.
RotationDecomposition rotation_from_z(const Vec3& direction);

template <class T>
BasicFrame<T> frame_from_stick(const BasicStick<T>& s)
{
    const BasicVec3<T> zb = s.p2 - s.p1;
    const auto cols = rotation_columns(zb);
    BasicFrame<T> f;
    f.zb = zb;
    f.xb = cols[0] * s.w;
    f.yb = cols[1] * s.l;
    f.ob = s.p1 - f.xb * 0.5 - f.yb * 0.5;
    return f;
}

inline constexpr int kKeyPointCount = 26;

/// Unit-cube coordinates of the 26 key points: 0-7 vertices with index
/// 4x + 2y + z, 8-19 edge midpoints in lexicographic (vertex, vertex) order,
/// 20-25 face centers in -x, +x, -y, +y, -z, +z order.
const std::array<Vec3, kKeyPointCount>& unit_key_points();

/// The 12 cube edges as vertex index pairs, in key-point order.
const std::array<std::array<int, 2>, 12>& unit_cube_edges();

inline constexpr int kKeyPointP1 = 24;  ///< center of the -z face
inline constexpr int kKeyPointP2 = 25;  ///< center of the +z face

template <class T>
using BasicKeyPoints = std::array<BasicVec3<T>, kKeyPointCount>;
using KeyPoints = BasicKeyPoints<double>;

template <class T>
BasicKeyPoints<T> key_points(const BasicFrame<T>& f)
{
    BasicKeyPoints<T> out;
    const auto& unit = unit_key_points();
    for (int k = 0; k < kKeyPointCount; ++k) out[k] = f.apply(unit[k]);
    return out;
}

/// Points with an optional per-point label (cuboid index).
struct PointCloud {
    std::vector<Vec3> points;
    std::vector<int> labels;  ///< empty or aligned with points

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    bool labeled() const { return !labels.empty(); }
};

using Rng = std::mt19937_64;

/// Draws `n` unit-cube surface points, uniform by the world area of the
/// faces of `f`.
std::vector<Vec3> sample_unit_surface(const Frame& f, std::size_t n, Rng& rng);

/// `n` surface samples of the cuboid, deterministic in `seed`.
PointCloud sample_surface(const Frame& f, std::size_t n, std::uint64_t seed);

/// Inverse of `Frame::apply`.
Vec3 local_coords(const Frame& f, const Vec3& p);

/// Local coordinates within [-tol, 1 + tol]^3.
bool contains(const Frame& f, const Vec3& p, double tol = 0.0);

/// Largest signed distance from `p` to the six face planes, in world units;
/// negative inside.
double face_distance(const Frame& f, const Vec3& p);

double volume(const Frame& f);

double surface_area(const Frame& f);

/// The eight corners in key-point order.
std::array<Vec3, 8> vertices(const Frame& f);

Vec3 center(const Frame& f);

/// Precomputed inverse of a frame for repeated point queries.
class FrameInverse {
  public:
    FrameInverse() = default;
    explicit FrameInverse(const Frame& f);

    Vec3 local(const Vec3& p) const;
    const Frame& frame() const { return frame_; }

  private:
    Frame frame_;
    std::array<Vec3, 3> rows_{};
};

}  // namespace stickform
