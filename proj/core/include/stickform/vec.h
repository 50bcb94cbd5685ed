// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace stickform {

/// Value of a scalar with derivative information stripped. Overloaded by
/// the autodiff variable type.
inline double value_of(double v) { return v; }

/// Three-component vector over an arbitrary scalar. The scalar is `double`
/// for plain evaluation and `ad::Var` when gradients are recorded.
template <class T>
struct BasicVec3 {
    T x{};
    T y{};
    T z{};

    constexpr T& operator[](std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }
    constexpr const T& operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }

    BasicVec3& operator+=(const BasicVec3& o)
    {
        x = x + o.x;
        y = y + o.y;
        z = z + o.z;
        return *this;
    }
    BasicVec3& operator-=(const BasicVec3& o)
    {
        x = x - o.x;
        y = y - o.y;
        z = z - o.z;
        return *this;
    }
};

template <class T>
BasicVec3<T> operator+(const BasicVec3<T>& a, const BasicVec3<T>& b)
{
    return {a.x + b.x, a.y + b.y, a.z + b.z};
}

template <class T>
BasicVec3<T> operator-(const BasicVec3<T>& a, const BasicVec3<T>& b)
{
    return {a.x - b.x, a.y - b.y, a.z - b.z};
}

template <class T>
BasicVec3<T> operator-(const BasicVec3<T>& a)
{
    return {-a.x, -a.y, -a.z};
}

template <class T, class S>
BasicVec3<T> operator*(const S& s, const BasicVec3<T>& a)
{
    return {s * a.x, s * a.y, s * a.z};
}

template <class T, class S>
BasicVec3<T> operator*(const BasicVec3<T>& a, const S& s)
{
    return {a.x * s, a.y * s, a.z * s};
}

template <class T, class S>
BasicVec3<T> operator/(const BasicVec3<T>& a, const S& s)
{
    return {a.x / s, a.y / s, a.z / s};
}

template <class T>
bool operator==(const BasicVec3<T>& a, const BasicVec3<T>& b)
{
    return a.x == b.x && a.y == b.y && a.z == b.z;
}

template <class T>
T dot(const BasicVec3<T>& a, const BasicVec3<T>& b)
{
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

template <class T>
BasicVec3<T> cross(const BasicVec3<T>& a, const BasicVec3<T>& b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

template <class T>
T squared_norm(const BasicVec3<T>& a)
{
    return dot(a, a);
}

template <class T>
T norm(const BasicVec3<T>& a)
{
    using std::sqrt;
    return sqrt(dot(a, a));
}

template <class T>
BasicVec3<double> value_of(const BasicVec3<T>& a)
{
    return {value_of(a.x), value_of(a.y), value_of(a.z)};
}

using Vec3 = BasicVec3<double>;

inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }
inline double squared_distance(const Vec3& a, const Vec3& b) { return squared_norm(a - b); }

/// Row-major 3x3 matrix.
struct Mat3 {
    std::array<std::array<double, 3>, 3> m{};

    static Mat3 identity()
    {
        Mat3 r;
        r.m[0][0] = r.m[1][1] = r.m[2][2] = 1.0;
        return r;
    }
    Vec3 column(std::size_t j) const { return {m[0][j], m[1][j], m[2][j]}; }
    Vec3 operator*(const Vec3& v) const
    {
        return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
                m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
                m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
    }
    Mat3 operator*(const Mat3& o) const
    {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) r.m[i][j] += m[i][k] * o.m[k][j];
        return r;
    }
    Mat3 transposed() const
    {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
        return r;
    }
};

/// Point in a two-dimensional view, `u` horizontal and `v` vertical.
struct Vec2 {
    double u = 0.0;
    double v = 0.0;

    friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.u + b.u, a.v + b.v}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.u - b.u, a.v - b.v}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.u, s * a.v}; }
inline double dot(Vec2 a, Vec2 b) { return a.u * b.u + a.v * b.v; }
inline double cross(Vec2 a, Vec2 b) { return a.u * b.v - a.v * b.u; }
inline double squared_distance(Vec2 a, Vec2 b) { return dot(a - b, a - b); }

}  // namespace stickform
