// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#include "stickform/sdf.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <thread>

#include <nlohmann/json.hpp>

#include "stickform/error.h"

namespace stickform {

double local_detail_value(const Detail& d, const Vec3& local)
{
    bool inside = true;
    double dis = std::numeric_limits<double>::infinity();
    for (Axis a : {Axis::x, Axis::y, Axis::z}) {
        const Vec2 q = project(local, a);
        inside = inside && point_in_polygon(q, d.view(a));
        dis = std::min(dis, polygon_distance(q, d.view(a)));
    }
    return inside ? -dis : std::min(dis, 1.0);
}

SdfField::SdfField(const StructureInstance& s, std::span<const Detail> details, SdfOptions options)
    : options_(options)
{
    if (details.size() != s.size())
        throw ValidationError("expected " + std::to_string(s.size()) + " details, got " +
                              std::to_string(details.size()));
    const double inf = std::numeric_limits<double>::infinity();
    lower_ = {inf, inf, inf};
    upper_ = {-inf, -inf, -inf};
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!s.alive[i]) continue;
        Part part{FrameInverse(s.frames[i]), {inf, inf, inf}, {-inf, -inf, -inf}, &details[i]};
        for (const Vec3& v : vertices(s.frames[i]))
            for (int a = 0; a < 3; ++a) {
                part.lower[a] = std::min(part.lower[a], v[a]);
                part.upper[a] = std::max(part.upper[a], v[a]);
            }
        for (int a = 0; a < 3; ++a) {
            lower_[a] = std::min(lower_[a], part.lower[a]);
            upper_[a] = std::max(upper_[a], part.upper[a]);
        }
        parts_.push_back(part);
    }
    if (parts_.empty()) throw ValidationError("structure has no alive cuboids");
}

double SdfField::operator()(const Vec3& p) const
{
    double best = std::numeric_limits<double>::infinity();
    bool hit = false;
    for (const Part& part : parts_) {
        if (p.x < part.lower.x || p.y < part.lower.y || p.z < part.lower.z || p.x > part.upper.x ||
            p.y > part.upper.y || p.z > part.upper.z)
            continue;
        const Vec3 u = part.inverse.local(p);
        if (u.x < 0.0 || u.y < 0.0 || u.z < 0.0 || u.x > 1.0 || u.y > 1.0 || u.z > 1.0) continue;
        hit = true;
        best = std::min(best, local_detail_value(*part.detail, u));
    }
    if (hit) return best;
    if (!options_.smooth_outside) return 1.0;
    for (const Part& part : parts_) {
        const Vec3 u = part.inverse.local(p);
        const Vec3 c{std::clamp(u.x, 0.0, 1.0), std::clamp(u.y, 0.0, 1.0), std::clamp(u.z, 0.0, 1.0)};
        best = std::min(best, distance(part.inverse.frame().apply(c), p));
    }
    return best;
}

double sdf_value(const StructureInstance& s, std::span<const Detail> details, const Vec3& p, SdfOptions options)
{
    return SdfField(s, details, options)(p);
}

Vec3 SdfGrid::center(int i, int j, int k) const
{
    const Vec3 h = voxel_size();
    return {lower.x + (i + 0.5) * h.x, lower.y + (j + 0.5) * h.y, lower.z + (k + 0.5) * h.z};
}

SdfGrid build_grid(const StructureInstance& s, std::span<const Detail> details, const GridOptions& options)
{
    if (options.resolution < 8) throw ValidationError("grid resolution must be at least 8");
    if (!(options.padding >= 0.0)) throw ValidationError("grid padding must be non-negative");
    const SdfField field(s, details, options.sdf);

    SdfGrid g;
    g.resolution = options.resolution;
    const Vec3 extent = field.upper() - field.lower();
    g.lower = field.lower() - options.padding * extent;
    g.upper = field.upper() + options.padding * extent;
    const int n = g.resolution;
    g.values.resize(std::size_t(n) * std::size_t(n) * std::size_t(n));

    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, unsigned(n));
    auto slab = [&](int k0, int k1) {
        for (int k = k0; k < k1; ++k)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i)
                    g.values[(std::size_t(k) * std::size_t(n) + std::size_t(j)) * std::size_t(n) + std::size_t(i)] =
                        float(field(g.center(i, j, k)));
    };
    if (threads <= 1) {
        slab(0, n);
        return g;
    }
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        const int k0 = int(std::size_t(n) * t / threads), k1 = int(std::size_t(n) * (t + 1) / threads);
        pool.emplace_back(slab, k0, k1);
    }
    return g;
}

namespace {

std::uint32_t to_little(std::uint32_t v)
{
    if constexpr (std::endian::native == std::endian::big)
        v = (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
    return v;
}

}  // namespace

void write_sdf_grid(const SdfGrid& g, const std::filesystem::path& raw, const std::filesystem::path& sidecar)
{
    std::ofstream out(raw, std::ios::binary);
    if (!out) throw ValidationError("cannot open " + raw.string() + " for writing");
    for (float f : g.values) {
        const std::uint32_t bits = to_little(std::bit_cast<std::uint32_t>(f));
        out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
    nlohmann::json j{{"resolution", g.resolution},
                     {"lower", {g.lower.x, g.lower.y, g.lower.z}},
                     {"upper", {g.upper.x, g.upper.y, g.upper.z}},
                     {"order", "x-fastest"},
                     {"dtype", "float32-le"}};
    std::ofstream meta(sidecar);
    if (!meta) throw ValidationError("cannot open " + sidecar.string() + " for writing");
    meta << j.dump(2) << '\n';
    if (!out || !meta) throw ValidationError("failed writing sdf grid");
}

SdfGrid read_sdf_grid(const std::filesystem::path& raw, const std::filesystem::path& sidecar)
{
    std::ifstream meta(sidecar);
    if (!meta) throw ValidationError("cannot open " + sidecar.string());
    SdfGrid g;
    try {
        const auto j = nlohmann::json::parse(meta);
        g.resolution = j.at("resolution").get<int>();
        const auto lo = j.at("lower").get<std::array<double, 3>>();
        const auto hi = j.at("upper").get<std::array<double, 3>>();
        g.lower = {lo[0], lo[1], lo[2]};
        g.upper = {hi[0], hi[1], hi[2]};
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(sidecar.string() + ": " + e.what());
    }
    if (g.resolution < 1) throw ValidationError(sidecar.string() + ": bad resolution");
    const std::size_t count = std::size_t(g.resolution) * std::size_t(g.resolution) * std::size_t(g.resolution);
    std::ifstream in(raw, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + raw.string());
    g.values.resize(count);
    for (float& f : g.values) {
        std::uint32_t bits = 0;
        if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits))
            throw ValidationError(raw.string() + ": truncated grid data");
        f = std::bit_cast<float>(to_little(bits));
    }
    return g;
}

}  // namespace stickform
