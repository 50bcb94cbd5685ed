// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#include "stickform/detail.h"

#include <nlohmann/json.hpp>

#include "stickform/alpha_shape.h"
#include "stickform/error.h"
#include "stickform/raster.h"

namespace stickform {

Detail full_detail() { return Detail{}; }

std::vector<std::vector<Vec3>> split_normalize(const StructureInstance& s, const PointCloud& p)
{
    std::vector<std::vector<Vec3>> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!s.alive[i]) continue;
        const FrameInverse inv(s.frames[i]);
        for (const Vec3& q : p.points) {
            const Vec3 u = inv.local(q);
            if (u.x >= 0.0 && u.x <= 1.0 && u.y >= 0.0 && u.y <= 1.0 && u.z >= 0.0 && u.z <= 1.0)
                out[i].push_back(u);
        }
    }
    return out;
}

Vec2 project(const Vec3& local, Axis view)
{
    switch (view) {
    case Axis::x:
        return {local.y, local.z};
    case Axis::y:
        return {local.x, local.z};
    case Axis::z:
        break;
    }
    return {local.x, local.y};
}

std::vector<Vec2> project(std::span<const Vec3> local, Axis view)
{
    std::vector<Vec2> out;
    out.reserve(local.size());
    for (const Vec3& p : local) out.push_back(project(p, view));
    return out;
}

namespace {

ViewPolygon extract_view(std::span<const Vec2> pts, const DetailOptions& options)
{
    if (pts.size() < options.min_points) return full_square();
    ViewPolygon poly;
    try {
        poly = alpha_shape(pts, options.alpha);
    } catch (const DegenerateDetailError&) {
        return full_square();
    }
    if (poly.outer.empty()) return full_square();
    try {
        validate(poly);
    } catch (const ValidationError&) {
        poly = trace(rasterize(poly));
        if (poly.outer.empty()) return full_square();
    }
    return poly;
}

}  // namespace

Detail extract_detail(std::span<const Vec3> local, const DetailOptions& options)
{
    Detail d;
    for (Axis a : {Axis::x, Axis::y, Axis::z}) d.view(a) = extract_view(project(local, a), options);
    return d;
}

std::vector<Detail> extract_details(const StructureInstance& s, const PointCloud& p, const DetailOptions& options)
{
    const auto clouds = split_normalize(s, p);
    std::vector<Detail> out;
    out.reserve(clouds.size());
    for (const auto& c : clouds) out.push_back(extract_detail(c, options));
    return out;
}

namespace {

ViewPolygon mirror(const ViewPolygon& p, bool flip_u, bool flip_v)
{
    ViewPolygon out = p;
    auto apply = [&](std::vector<Ring>& rings) {
        for (Ring& r : rings)
            for (Vec2& v : r) {
                if (flip_u) v.u = 1.0 - v.u;
                if (flip_v) v.v = 1.0 - v.v;
            }
    };
    apply(out.outer);
    apply(out.holes);
    return normalized(std::move(out));
}

}  // namespace

Detail reflect_detail(const Detail& d, Plane plane)
{
    Detail out = d;
    auto& x = out.view(Axis::x);
    auto& y = out.view(Axis::y);
    auto& z = out.view(Axis::z);
    switch (plane) {
    case Plane::yz:  // local x -> 1 - x
        y = mirror(y, true, false);
        z = mirror(z, true, false);
        x = normalized(x);
        break;
    case Plane::xz:  // local y -> 1 - y
        x = mirror(x, true, false);
        z = mirror(z, false, true);
        y = normalized(y);
        break;
    case Plane::xy:  // local z -> 1 - z
        x = mirror(x, false, true);
        y = mirror(y, false, true);
        z = normalized(z);
        break;
    }
    return out;
}

Detail blend_details(const Detail& a, const Detail& b, double t)
{
    if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("blend weight must be in [0, 1]");
    Detail out;
    for (int k = 0; k < 3; ++k) {
        const BinaryImage ia = rasterize(a.views[std::size_t(k)]);
        const BinaryImage ib = rasterize(b.views[std::size_t(k)]);
        BinaryImage mix(ia.size);
        for (std::size_t p = 0; p < mix.pixels.size(); ++p)
            mix.pixels[p] = (1.0 - t) * ia.pixels[p] + t * ib.pixels[p] >= 0.5 ? 1 : 0;
        out.views[std::size_t(k)] = trace(mix);
    }
    return out;
}

nlohmann::json detail_to_json(const std::string& cuboid, const Detail& d)
{
    return {{"cuboid", cuboid},
            {"views", {{"x", to_json(d.view(Axis::x))}, {"y", to_json(d.view(Axis::y))}, {"z", to_json(d.view(Axis::z))}}}};
}

std::pair<std::string, Detail> detail_from_json(const nlohmann::json& j)
{
    if (!j.is_object() || !j.contains("cuboid") || !j["cuboid"].is_string())
        throw ValidationError("detail needs a string 'cuboid'");
    Detail d;
    if (j.contains("views")) {
        const auto& v = j["views"];
        if (!v.is_object()) throw ValidationError("detail 'views' must be an object");
        for (const auto& [key, value] : v.items()) {
            if (key != "x" && key != "y" && key != "z") throw ValidationError("unknown detail view '" + key + "'");
            const Axis a = key == "x" ? Axis::x : key == "y" ? Axis::y : Axis::z;
            d.view(a) = view_polygon_from_json(value);
        }
    }
    return {j["cuboid"].get<std::string>(), d};
}

Plane plane_from_string(const std::string& s)
{
    if (s == "yz") return Plane::yz;
    if (s == "xz") return Plane::xz;
    if (s == "xy") return Plane::xy;
    throw ValidationError("plane must be yz, xz or xy, got '" + s + "'");
}

}  // namespace stickform
