// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#include "stickform/polygon.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "stickform/error.h"

namespace stickform {

ViewPolygon full_square()
{
    ViewPolygon p;
    p.outer.push_back({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}});
    return p;
}

double signed_area(const Ring& r)
{
    double a = 0.0;
    for (std::size_t i = 0, n = r.size(); i < n; ++i) a += cross(r[i], r[(i + 1) % n]);
    return 0.5 * a;
}

double area(const ViewPolygon& p)
{
    double a = 0.0;
    for (const Ring& r : p.outer) a += std::abs(signed_area(r));
    for (const Ring& r : p.holes) a -= std::abs(signed_area(r));
    return a;
}

namespace {

bool crosses(Vec2 p, const Ring& r)
{
    bool inside = false;
    for (std::size_t i = 0, n = r.size(), j = n - 1; i < n; j = i++) {
        const Vec2 a = r[i], b = r[j];
        if ((a.v > p.v) != (b.v > p.v)) {
            const double u = a.u + (p.v - a.v) * (b.u - a.u) / (b.v - a.v);
            if (p.u < u) inside = !inside;
        }
    }
    return inside;
}

int orientation(Vec2 a, Vec2 b, Vec2 c)
{
    const double d = cross(b - a, c - a);
    return (d > 0.0) - (d < 0.0);
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p)
{
    return std::min(a.u, b.u) <= p.u && p.u <= std::max(a.u, b.u) && std::min(a.v, b.v) <= p.v &&
           p.v <= std::max(a.v, b.v);
}

bool segments_touch(Vec2 a, Vec2 b, Vec2 c, Vec2 d)
{
    const int o1 = orientation(a, b, c), o2 = orientation(a, b, d);
    const int o3 = orientation(c, d, a), o4 = orientation(c, d, b);
    if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return true;
    if (o1 == 0 && on_segment(a, b, c)) return true;
    if (o2 == 0 && on_segment(a, b, d)) return true;
    if (o3 == 0 && on_segment(c, d, a)) return true;
    if (o4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

}  // namespace

bool point_in_polygon(Vec2 p, const ViewPolygon& poly)
{
    bool inside = false;
    for (const Ring& r : poly.outer) inside ^= crosses(p, r);
    for (const Ring& r : poly.holes) inside ^= crosses(p, r);
    return inside;
}

double segment_distance(Vec2 p, Vec2 a, Vec2 b)
{
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::sqrt(squared_distance(p, a + t * ab));
}

double polygon_distance(Vec2 p, const ViewPolygon& poly)
{
    double best = std::numeric_limits<double>::infinity();
    auto scan = [&](const std::vector<Ring>& rings) {
        for (const Ring& r : rings)
            for (std::size_t i = 0, n = r.size(); i < n; ++i)
                best = std::min(best, segment_distance(p, r[i], r[(i + 1) % n]));
    };
    scan(poly.outer);
    scan(poly.holes);
    return best;
}

double snap_coordinate(double x)
{
    constexpr double scale = 9007199254740992.0;  // 2^53
    if (!(x > 0.0)) return 0.0;
    if (x >= 1.0) return 1.0;
    return std::round(x * scale) / scale;
}

ViewPolygon normalized(ViewPolygon p)
{
    auto clean = [](std::vector<Ring>& rings, bool ccw) {
        std::vector<Ring> kept;
        for (Ring& r : rings) {
            Ring out;
            for (const Vec2& v : r) {
                const Vec2 s{snap_coordinate(v.u), snap_coordinate(v.v)};
                if (out.empty() || !(out.back() == s)) out.push_back(s);
            }
            while (out.size() > 1 && out.front() == out.back()) out.pop_back();
            if (out.size() < 3) continue;
            const double a = signed_area(out);
            if (a == 0.0) continue;
            if ((a > 0.0) != ccw) std::reverse(out.begin() + 1, out.end());
            kept.push_back(std::move(out));
        }
        rings = std::move(kept);
    };
    clean(p.outer, true);
    clean(p.holes, false);
    return p;
}

bool ring_is_simple(const Ring& r)
{
    const std::size_t n = r.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = r[i], b = r[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;
            if (segments_touch(a, b, r[j], r[(j + 1) % n])) return false;
        }
    }
    return true;
}

void validate(const ViewPolygon& p)
{
    auto check = [](const std::vector<Ring>& rings, bool ccw, const char* what) {
        for (std::size_t k = 0; k < rings.size(); ++k) {
            const Ring& r = rings[k];
            const std::string name = std::string(what) + " ring " + std::to_string(k);
            if (r.size() < 3) throw ValidationError(name + " has fewer than three vertices");
            for (const Vec2& v : r)
                if (!(v.u >= -1e-9 && v.u <= 1.0 + 1e-9 && v.v >= -1e-9 && v.v <= 1.0 + 1e-9))
                    throw ValidationError(name + " leaves the unit square");
            if ((signed_area(r) > 0.0) != ccw) throw ValidationError(name + " has the wrong orientation");
            if (!ring_is_simple(r)) throw ValidationError(name + " is not simple");
        }
    };
    check(p.outer, true, "outer");
    check(p.holes, false, "hole");
}

nlohmann::json to_json(const ViewPolygon& p)
{
    auto rings = [](const std::vector<Ring>& rs) {
        nlohmann::json out = nlohmann::json::array();
        for (const Ring& r : rs) {
            nlohmann::json ring = nlohmann::json::array();
            for (const Vec2& v : r) ring.push_back({v.u, v.v});
            out.push_back(ring);
        }
        return out;
    };
    return {{"outer", rings(p.outer)}, {"holes", rings(p.holes)}};
}

ViewPolygon view_polygon_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) throw ValidationError("view must be an object with 'outer' and 'holes'");
    auto rings = [](const nlohmann::json& rs, const char* what) {
        std::vector<Ring> out;
        if (rs.is_null()) return out;
        if (!rs.is_array()) throw ValidationError(std::string("'") + what + "' must be a list of rings");
        for (const auto& r : rs) {
            if (!r.is_array()) throw ValidationError(std::string("'") + what + "' ring must be a list of [u, v]");
            Ring ring;
            for (const auto& v : r) {
                if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
                    throw ValidationError(std::string("'") + what + "' vertex must be [u, v]");
                ring.push_back({v[0].get<double>(), v[1].get<double>()});
            }
            out.push_back(std::move(ring));
        }
        return out;
    };
    ViewPolygon p;
    p.outer = rings(j.value("outer", nlohmann::json()), "outer");
    p.holes = rings(j.value("holes", nlohmann::json()), "holes");
    return p;
}

}  // namespace stickform
