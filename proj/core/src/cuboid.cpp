// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#include "stickform/cuboid.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

namespace stickform {

namespace {

std::array<Vec3, kKeyPointCount> make_unit_key_points()
{
    std::array<Vec3, kKeyPointCount> k{};
    for (int i = 0; i < 8; ++i)
        k[i] = Vec3{double((i >> 2) & 1), double((i >> 1) & 1), double(i & 1)};
    const auto& edges = unit_cube_edges();
    for (int e = 0; e < 12; ++e) k[8 + e] = (k[edges[e][0]] + k[edges[e][1]]) * 0.5;
    k[20] = {0.0, 0.5, 0.5};
    k[21] = {1.0, 0.5, 0.5};
    k[22] = {0.5, 0.0, 0.5};
    k[23] = {0.5, 1.0, 0.5};
    k[24] = {0.5, 0.5, 0.0};
    k[25] = {0.5, 0.5, 1.0};
    return k;
}

}  // namespace

const std::array<std::array<int, 2>, 12>& unit_cube_edges()
{
    static const std::array<std::array<int, 2>, 12> edges = [] {
        std::array<std::array<int, 2>, 12> e{};
        int n = 0;
        for (int a = 0; a < 8; ++a)
            for (int b = a + 1; b < 8; ++b)
                if (std::popcount(unsigned(a ^ b)) == 1) e[n++] = {a, b};
        return e;
    }();
    return edges;
}

const std::array<Vec3, kKeyPointCount>& unit_key_points()
{
    static const auto points = make_unit_key_points();
    return points;
}

RotationDecomposition rotation_from_z(const Vec3& direction)
{
    const auto cols = rotation_columns(direction);
    RotationDecomposition r;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) r.matrix.m[i][j] = cols[j][i];

    const Vec3 d = direction / norm(direction);
    r.theta = std::acos(std::clamp(d.z, -1.0, 1.0));
    const Vec3 axis = cross(Vec3{0.0, 0.0, 1.0}, d);
    const double axis_len = norm(axis);
    if (d.z + 1.0 < kAntiparallelTolerance || axis_len == 0.0) {
        r.axis = {1.0, 0.0, 0.0};
        if (d.z + 1.0 < kAntiparallelTolerance) r.theta = std::numbers::pi;
    } else {
        r.axis = axis / axis_len;
    }
    return r;
}

std::vector<Vec3> sample_unit_surface(const Frame& f, std::size_t n, Rng& rng)
{
    if (n == 0) throw ValidationError("sample count must be at least 1");
    const double lx = norm(f.xb);
    const double ly = norm(f.yb);
    const double lz = norm(f.zb);
    // -x/+x, -y/+y, -z/+z pairs
    const std::array<double, 3> pair_area{ly * lz, lx * lz, lx * ly};
    const double total = 2.0 * (pair_area[0] + pair_area[1] + pair_area[2]);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Vec3> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double pick = unit(rng) * total;
        int face = 5;
        for (int k = 0; k < 6; ++k) {
            const double a = pair_area[k / 2];
            if (pick < a) {
                face = k;
                break;
            }
            pick -= a;
        }
        const double s = unit(rng);
        const double t = unit(rng);
        const int axis = face / 2;
        const double side = (face % 2 == 0) ? 0.0 : 1.0;
        Vec3 p;
        p[axis] = side;
        p[(axis + 1) % 3] = s;
        p[(axis + 2) % 3] = t;
        out.push_back(p);
    }
    return out;
}

PointCloud sample_surface(const Frame& f, std::size_t n, std::uint64_t seed)
{
    Rng rng(seed);
    PointCloud pc;
    for (const Vec3& u : sample_unit_surface(f, n, rng)) pc.points.push_back(f.apply(u));
    return pc;
}

FrameInverse::FrameInverse(const Frame& f) : frame_(f)
{
    // Rows of the inverse of [xb yb zb] are the reciprocal basis.
    const Vec3 yz = cross(f.yb, f.zb);
    const Vec3 zx = cross(f.zb, f.xb);
    const Vec3 xy = cross(f.xb, f.yb);
    const double det = dot(f.xb, yz);
    if (det == 0.0) throw DegenerateStickError("frame is not invertible");
    rows_ = {yz / det, zx / det, xy / det};
}

Vec3 FrameInverse::local(const Vec3& p) const
{
    const Vec3 q = p - frame_.ob;
    return {dot(rows_[0], q), dot(rows_[1], q), dot(rows_[2], q)};
}

Vec3 local_coords(const Frame& f, const Vec3& p) { return FrameInverse(f).local(p); }

bool contains(const Frame& f, const Vec3& p, double tol)
{
    const Vec3 u = local_coords(f, p);
    for (int i = 0; i < 3; ++i)
        if (u[i] < -tol || u[i] > 1.0 + tol) return false;
    return true;
}

double face_distance(const Frame& f, const Vec3& p)
{
    const Vec3 u = local_coords(f, p);
    const std::array<double, 3> len{norm(f.xb), norm(f.yb), norm(f.zb)};
    double d = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
        d = std::max(d, -u[i] * len[i]);
        d = std::max(d, (u[i] - 1.0) * len[i]);
    }
    return d;
}

double volume(const Frame& f) { return norm(f.xb) * norm(f.yb) * norm(f.zb); }

double surface_area(const Frame& f)
{
    const double a = norm(f.xb), b = norm(f.yb), c = norm(f.zb);
    return 2.0 * (a * b + a * c + b * c);
}

std::array<Vec3, 8> vertices(const Frame& f)
{
    std::array<Vec3, 8> v{};
    const auto& unit = unit_key_points();
    for (int i = 0; i < 8; ++i) v[i] = f.apply(unit[i]);
    return v;
}

Vec3 center(const Frame& f) { return f.apply({0.5, 0.5, 0.5}); }

}  // namespace stickform
