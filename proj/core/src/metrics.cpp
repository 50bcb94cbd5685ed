// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#include "stickform/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include <nlohmann/json.hpp>

#include "stickform/chamfer.h"
#include "stickform/error.h"
#include "stickform/fit.h"
#include "stickform/marching_cubes.h"

namespace stickform {

double surface_cd(const Mesh& reconstruction, const PointCloud& target, std::size_t n, std::uint64_t seed)
{
    if (n == 0 || target.empty()) throw ValidationError("surface_cd needs samples and a non-empty target");
    return chamfer(sample_mesh_surface(reconstruction, n, seed), target);
}

double surface_cd(const StructureInstance& reconstruction, const PointCloud& target, std::size_t n,
                  std::uint64_t seed)
{
    if (n == 0 || target.empty()) throw ValidationError("surface_cd needs samples and a non-empty target");
    return chamfer(sample_structure(reconstruction, n, seed), target);
}

PointCloud sample_solid(const SdfField& field, std::size_t n, std::uint64_t seed, std::size_t* attempts)
{
    Rng rng(mix_seed(seed, 1));
    const Vec3 lo = field.lower(), hi = field.upper();
    std::uniform_real_distribution<double> ux(lo.x, hi.x), uy(lo.y, hi.y), uz(lo.z, hi.z);
    PointCloud out;
    out.points.reserve(n);
    const std::size_t budget = std::max<std::size_t>(100000, 1000 * n);
    std::size_t tries = 0;
    for (; out.points.size() < n; ++tries) {
        if (tries >= budget) throw ValidationError("no interior found for solid sampling");
        const Vec3 p{ux(rng), uy(rng), uz(rng)};
        if (field(p) < 0.0) out.points.push_back(p);
    }
    if (attempts) *attempts = tries;
    return out;
}

double solid_cd(const SdfField& reconstruction, const PointCloud& target_solid, std::size_t n, std::uint64_t seed)
{
    if (n == 0 || target_solid.empty()) throw ValidationError("solid_cd needs samples and a non-empty target");
    return chamfer(sample_solid(reconstruction, n, seed), target_solid);
}

PointCloud reflect(const PointCloud& p, Plane plane)
{
    PointCloud out = p;
    const std::size_t axis = plane == Plane::yz ? 0 : (plane == Plane::xz ? 1 : 2);
    for (Vec3& q : out.points) q[axis] = -q[axis];
    return out;
}

double symmetry_distance(const PointCloud& reconstruction, const PointCloud& target)
{
    if (reconstruction.empty() || target.empty()) throw ValidationError("symmetry_distance needs non-empty clouds");
    double total = 0.0;
    for (Plane plane : {Plane::yz, Plane::xz, Plane::xy}) {
        const double cs = std::max(chamfer(reconstruction, reflect(reconstruction, plane)), kSymmetryLogFloor);
        const double ct = std::max(chamfer(target, reflect(target, plane)), kSymmetryLogFloor);
        total += std::abs(std::log(cs) - std::log(ct));
    }
    return total / 3.0;
}

namespace {

struct Box {
    Vec3 center;
    std::array<Vec3, 3> half;
};

Box box_of(const Frame& f, double grow)
{
    Box b{center(f), {0.5 * f.xb, 0.5 * f.yb, 0.5 * f.zb}};
    for (Vec3& h : b.half) {
        const double len = norm(h);
        if (len > 0.0) h = h * ((len + grow) / len);
    }
    return b;
}

double radius_along(const Box& b, const Vec3& axis)
{
    return std::abs(dot(b.half[0], axis)) + std::abs(dot(b.half[1], axis)) + std::abs(dot(b.half[2], axis));
}

bool overlap(const Box& a, const Box& b)
{
    std::vector<Vec3> axes;
    for (const Vec3& h : a.half) axes.push_back(h);
    for (const Vec3& h : b.half) axes.push_back(h);
    for (const Vec3& ha : a.half)
        for (const Vec3& hb : b.half) axes.push_back(cross(ha, hb));
    const Vec3 d = b.center - a.center;
    for (const Vec3& raw : axes) {
        const double len = norm(raw);
        if (len < 1e-12) continue;
        const Vec3 axis = raw / len;
        if (std::abs(dot(d, axis)) > radius_along(a, axis) + radius_along(b, axis)) return false;
    }
    return true;
}

double ground_level(const StructureInstance& s)
{
    double y = std::numeric_limits<double>::infinity();
    for (int i : alive_indices(s))
        for (const Vec3& v : vertices(s.frames[std::size_t(i)])) y = std::min(y, v.y);
    return y;
}

double lowest_y(const Frame& f)
{
    double y = std::numeric_limits<double>::infinity();
    for (const Vec3& v : vertices(f)) y = std::min(y, v.y);
    return y;
}

// Part of the cuboid at or below the plane y = level, as (x, z) points:
// corners below it and edge crossings of it.
std::vector<Vec2> footprint(const Frame& f, double level)
{
    const auto v = vertices(f);
    std::vector<Vec2> out;
    for (const Vec3& p : v)
        if (p.y <= level) out.push_back({p.x, p.z});
    for (const auto& e : unit_cube_edges()) {
        const Vec3 a = v[std::size_t(e[0])], b = v[std::size_t(e[1])];
        if ((a.y - level) * (b.y - level) < 0.0) {
            const double t = (level - a.y) / (b.y - a.y);
            out.push_back({a.x + t * (b.x - a.x), a.z + t * (b.z - a.z)});
        }
    }
    return out;
}

std::vector<Vec2> hull(std::vector<Vec2> pts)
{
    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.u < b.u || (a.u == b.u && a.v < b.v); });
    pts.erase(std::unique(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.u == b.u && a.v == b.v; }),
              pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Vec2> h(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
        h[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

double segment_distance2(Vec2 p, Vec2 a, Vec2 b)
{
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    const double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
    return squared_distance(p, a + t * ab);
}

}  // namespace

bool cuboids_touch(const Frame& a, const Frame& b, double eps)
{
    return overlap(box_of(a, 0.0), box_of(b, eps));
}

bool rooted(const StructureInstance& s, double eps)
{
    const std::vector<int> alive = alive_indices(s);
    if (alive.empty()) return false;
    const double ground = ground_level(s);
    const std::size_t n = alive.size();
    std::vector<bool> reached(n, false);
    std::vector<std::size_t> queue;
    for (std::size_t i = 0; i < n; ++i)
        if (lowest_y(s.frames[std::size_t(alive[i])]) <= ground + eps) {
            reached[i] = true;
            queue.push_back(i);
        }
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const Frame& f = s.frames[std::size_t(alive[queue[head]])];
        for (std::size_t j = 0; j < n; ++j) {
            if (reached[j]) continue;
            const Frame& g = s.frames[std::size_t(alive[j])];
            if (cuboids_touch(f, g, eps) || cuboids_touch(g, f, eps)) {
                reached[j] = true;
                queue.push_back(j);
            }
        }
    }
    return std::all_of(reached.begin(), reached.end(), [](bool r) { return r; });
}

bool stable(const StructureInstance& s, double eps)
{
    const std::vector<int> alive = alive_indices(s);
    if (alive.empty()) return false;
    const double ground = ground_level(s);
    Vec3 weighted{};
    double mass = 0.0;
    std::vector<Vec2> contact;
    for (int i : alive) {
        const Frame& f = s.frames[std::size_t(i)];
        const double v = volume(f);
        weighted = weighted + v * center(f);
        mass += v;
        const auto part = footprint(f, ground + eps);
        contact.insert(contact.end(), part.begin(), part.end());
    }
    const Vec2 com{weighted.x / mass, weighted.z / mass};
    const std::vector<Vec2> h = hull(contact);
    constexpr double tol2 = 1e-18;
    if (h.size() == 1) return squared_distance(com, h[0]) <= tol2;
    if (h.size() == 2) return segment_distance2(com, h[0], h[1]) <= tol2;
    for (std::size_t k = 0; k < h.size(); ++k) {
        const Vec2 a = h[k], b = h[(k + 1) % h.size()];
        if (cross(b - a, com - a) < 0.0 && segment_distance2(com, a, b) > tol2) return false;
    }
    return !h.empty();
}

ParameterVector interpolate_params(const ParameterVector& a, const ParameterVector& b, double t)
{
    if (a.size() != b.size() || (!a.names.empty() && !b.names.empty() && a.names != b.names))
        throw LengthMismatchError("interpolated parameter vectors come from different templates");
    if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("interpolation t must be in [0, 1]");
    ParameterVector out;
    out.names = a.names.empty() ? b.names : a.names;
    out.values.resize(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = (1.0 - t) * a.values[i] + t * b.values[i];
    return out;
}

ParameterVector random_sample(const TemplateConfig& t, std::uint64_t seed, double spread)
{
    if (!(spread >= 0.0 && spread <= 1.0)) throw ValidationError("spread must be in [0, 1]");
    ParameterVector out = default_params(t);
    if (spread == 0.0) return out;
    Rng rng(mix_seed(seed, 2));
    std::normal_distribution<double> noise(0.0, spread);
    for (double& v : out.values) v = std::clamp(v + noise(rng), 0.0, 1.0);
    return out;
}

nlohmann::json to_json(const MetricsReport& r)
{
    return {{"surface_cd", r.surface_cd},
            {"solid_cd", r.solid_cd},
            {"symmetry_distance", r.symmetry_distance},
            {"rooted", r.rooted},
            {"stable", r.stable}};
}

void write_metrics_csv(std::ostream& out, const std::vector<std::pair<std::string, MetricsReport>>& rows)
{
    out << "object,surface_cd,solid_cd,symmetry_distance,rooted,stable\n";
    const auto old = out.precision(17);
    for (const auto& [id, r] : rows)
        out << id << ',' << r.surface_cd << ',' << r.solid_cd << ',' << r.symmetry_distance << ','
            << (r.rooted ? 1 : 0) << ',' << (r.stable ? 1 : 0) << '\n';
    out.precision(old);
}

MetricsReport compute_metrics(const StructureInstance& s, std::span<const Detail> details, const PointCloud& target,
                              const PointCloud* target_solid, const MetricsOptions& options)
{
    GridOptions grid;
    grid.resolution = options.resolution;
    const Mesh mesh = mesh_structure(s, details, grid);
    if (mesh.empty()) throw ValidationError("reconstruction has an empty surface");
    const PointCloud surface = sample_mesh_surface(mesh, options.samples, options.seed);
    MetricsReport r;
    r.surface_cd = chamfer(surface, target);
    if (target_solid) r.solid_cd = solid_cd(SdfField(s, details), *target_solid, options.samples, options.seed);
    r.symmetry_distance = symmetry_distance(surface, target);
    r.rooted = rooted(s);
    r.stable = stable(s);
    return r;
}

}  // namespace stickform
