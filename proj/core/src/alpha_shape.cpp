// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#include "stickform/alpha_shape.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>

#include "stickform/error.h"

namespace stickform {

namespace {

using Real = long double;

struct P {
    Real x, y;
};

Real orient(const P& a, const P& b, const P& c) { return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x); }

/// Positive when d lies inside the circumcircle of counter-clockwise a, b, c.
Real incircle(const P& a, const P& b, const P& c, const P& d)
{
    const Real adx = a.x - d.x, ady = a.y - d.y;
    const Real bdx = b.x - d.x, bdy = b.y - d.y;
    const Real cdx = c.x - d.x, cdy = c.y - d.y;
    const Real ad = adx * adx + ady * ady;
    const Real bd = bdx * bdx + bdy * bdy;
    const Real cd = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

std::uint64_t hash64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint32_t spread_bits(std::uint32_t v)
{
    v &= 0xffff;
    v = (v | (v << 8)) & 0x00ff00ff;
    v = (v | (v << 4)) & 0x0f0f0f0f;
    v = (v | (v << 2)) & 0x33333333;
    v = (v | (v << 1)) & 0x55555555;
    return v;
}

struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> n{-1, -1, -1};
    bool alive = true;
};

class Builder {
  public:
    explicit Builder(std::vector<P> pts) : pts_(std::move(pts)) {}

    void run(const std::vector<int>& order)
    {
        Real lo_x = pts_[0].x, hi_x = lo_x, lo_y = pts_[0].y, hi_y = lo_y;
        for (const P& p : pts_) {
            lo_x = std::min(lo_x, p.x);
            hi_x = std::max(hi_x, p.x);
            lo_y = std::min(lo_y, p.y);
            hi_y = std::max(hi_y, p.y);
        }
        const Real span = std::max({hi_x - lo_x, hi_y - lo_y, Real(1e-12)});
        const Real cx = (lo_x + hi_x) / 2, cy = (lo_y + hi_y) / 2;
        const int s = int(pts_.size());
        super_ = s;
        pts_.push_back({cx - 100 * span, cy - 100 * span});
        pts_.push_back({cx + 100 * span, cy - 100 * span});
        pts_.push_back({cx, cy + 100 * span});
        tris_.push_back(Tri{{s, s + 1, s + 2}});
        for (int i : order) insert(i);
    }

    const std::vector<Tri>& triangles() const { return tris_; }
    bool is_super(int v) const { return v >= super_; }

  private:
    int locate(const P& p)
    {
        int t = last_;
        if (t < 0 || !tris_[std::size_t(t)].alive) t = first_alive();
        for (std::size_t steps = 0; steps < 4 * tris_.size() + 16; ++steps) {
            const Tri& tri = tris_[std::size_t(t)];
            int next = -1;
            for (int k = 0; k < 3; ++k) {
                const P& a = pts_[std::size_t(tri.v[(k + 1) % 3])];
                const P& b = pts_[std::size_t(tri.v[(k + 2) % 3])];
                if (orient(a, b, p) < 0) {
                    next = tri.n[k];
                    break;
                }
            }
            if (next < 0) return t;
            t = next;
        }
        // Walk did not settle; fall back to a scan.
        for (std::size_t i = 0; i < tris_.size(); ++i) {
            const Tri& tri = tris_[i];
            if (!tri.alive) continue;
            bool inside = true;
            for (int k = 0; k < 3 && inside; ++k)
                inside = orient(pts_[std::size_t(tri.v[(k + 1) % 3])], pts_[std::size_t(tri.v[(k + 2) % 3])], p) >= 0;
            if (inside) return int(i);
        }
        return t;
    }

    int first_alive() const
    {
        for (std::size_t i = tris_.size(); i-- > 0;)
            if (tris_[i].alive) return int(i);
        return 0;
    }

    bool in_circle(int t, const P& p) const
    {
        const Tri& tri = tris_[std::size_t(t)];
        return incircle(pts_[std::size_t(tri.v[0])], pts_[std::size_t(tri.v[1])], pts_[std::size_t(tri.v[2])], p) > 0;
    }

    void insert(int pi)
    {
        const P& p = pts_[std::size_t(pi)];
        const int start = locate(p);

        cavity_.clear();
        stack_.clear();
        stack_.push_back(start);
        mark_.resize(tris_.size(), 0);
        ++stamp_;
        mark_[std::size_t(start)] = stamp_;
        while (!stack_.empty()) {
            const int t = stack_.back();
            stack_.pop_back();
            cavity_.push_back(t);
            for (int nb : tris_[std::size_t(t)].n) {
                if (nb < 0 || mark_[std::size_t(nb)] == stamp_) continue;
                if (in_circle(nb, p)) {
                    mark_[std::size_t(nb)] = stamp_;
                    stack_.push_back(nb);
                }
            }
        }

        struct Edge {
            int a, b, outside;
        };
        std::vector<Edge> boundary;
        for (int t : cavity_) {
            const Tri& tri = tris_[std::size_t(t)];
            for (int k = 0; k < 3; ++k) {
                const int nb = tri.n[k];
                if (nb >= 0 && mark_[std::size_t(nb)] == stamp_) continue;
                boundary.push_back({tri.v[(k + 1) % 3], tri.v[(k + 2) % 3], nb});
            }
        }
        for (int t : cavity_) tris_[std::size_t(t)].alive = false;

        std::map<int, int> by_start, by_end;
        const int base = int(tris_.size());
        for (std::size_t e = 0; e < boundary.size(); ++e) {
            const Edge& ed = boundary[e];
            Tri tri{{ed.a, ed.b, pi}};
            tri.n[2] = ed.outside;
            const int id = base + int(e);
            if (ed.outside >= 0) {
                Tri& o = tris_[std::size_t(ed.outside)];
                for (int k = 0; k < 3; ++k) {
                    const int oa = o.v[(k + 1) % 3], ob = o.v[(k + 2) % 3];
                    if (oa == ed.b && ob == ed.a) o.n[k] = id;
                }
            }
            tris_.push_back(tri);
            by_start[ed.a] = id;
            by_end[ed.b] = id;
        }
        for (std::size_t e = 0; e < boundary.size(); ++e) {
            Tri& tri = tris_[std::size_t(base) + e];
            // across (b, p), opposite a: the new triangle starting at b
            const auto s = by_start.find(tri.v[1]);
            tri.n[0] = s == by_start.end() ? -1 : s->second;
            // across (p, a), opposite b: the new triangle ending at a
            const auto f = by_end.find(tri.v[0]);
            tri.n[1] = f == by_end.end() ? -1 : f->second;
        }
        last_ = base;
    }

    std::vector<P> pts_;
    std::vector<Tri> tris_;
    std::vector<int> cavity_, stack_;
    std::vector<std::uint32_t> mark_;
    std::uint32_t stamp_ = 0;
    int last_ = -1;
    int super_ = 0;
};

}  // namespace

double circumradius(Vec2 a, Vec2 b, Vec2 c)
{
    const double ab = std::sqrt(squared_distance(a, b));
    const double bc = std::sqrt(squared_distance(b, c));
    const double ca = std::sqrt(squared_distance(c, a));
    const double twice_area = std::abs(cross(b - a, c - a));
    if (twice_area == 0.0) return std::numeric_limits<double>::infinity();
    return ab * bc * ca / (2.0 * twice_area);
}

Triangulation delaunay(std::span<const Vec2> points)
{
    // distinct points, first occurrence wins
    std::vector<int> idx(points.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        const Vec2 p = points[std::size_t(a)], q = points[std::size_t(b)];
        return p.u < q.u || (p.u == q.u && p.v < q.v);
    });
    std::vector<int> unique;
    for (int i : idx)
        if (unique.empty() || !(points[std::size_t(unique.back())] == points[std::size_t(i)])) unique.push_back(i);
    if (unique.size() < 3) throw DegenerateDetailError("alpha shape needs at least three distinct points");

    double lo_u = points[std::size_t(unique[0])].u, hi_u = lo_u, lo_v = points[std::size_t(unique[0])].v, hi_v = lo_v;
    for (int i : unique) {
        lo_u = std::min(lo_u, points[std::size_t(i)].u);
        hi_u = std::max(hi_u, points[std::size_t(i)].u);
        lo_v = std::min(lo_v, points[std::size_t(i)].v);
        hi_v = std::max(hi_v, points[std::size_t(i)].v);
    }
    const double extent = std::max(hi_u - lo_u, hi_v - lo_v);
    {
        const Vec2 a = points[std::size_t(unique[0])];
        bool collinear = true;
        std::size_t far = 1;
        for (std::size_t k = 1; k < unique.size(); ++k)
            if (squared_distance(points[std::size_t(unique[k])], a) > squared_distance(points[std::size_t(unique[far])], a))
                far = k;
        const Vec2 b = points[std::size_t(unique[far])];
        for (int i : unique)
            if (std::abs(cross(b - a, points[std::size_t(i)] - a)) > 1e-12 * extent * extent) collinear = false;
        if (collinear) throw DegenerateDetailError("alpha shape input is collinear");
    }

    // Local copies with a deterministic perturbation far below any
    // meaningful scale, to break exact cocircularity.
    std::vector<P> pts;
    pts.reserve(unique.size() + 3);
    const Real jitter = Real(1e-9) * Real(extent);
    for (int i : unique) {
        const std::uint64_t h = hash64(std::uint64_t(i));
        const Real jx = (Real(h & 0xffffffff) / Real(4294967296.0) - 0.5L) * jitter;
        const Real jy = (Real(h >> 32) / Real(4294967296.0) - 0.5L) * jitter;
        pts.push_back({Real(points[std::size_t(i)].u) + jx, Real(points[std::size_t(i)].v) + jy});
    }

    // Insert along a Morton curve so point location walks stay short.
    std::vector<int> order(unique.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::uint64_t> code(unique.size());
    const double scale = extent > 0.0 ? 65535.0 / extent : 0.0;
    for (std::size_t k = 0; k < unique.size(); ++k) {
        const Vec2 p = points[std::size_t(unique[k])];
        const auto qx = std::uint32_t((p.u - lo_u) * scale);
        const auto qy = std::uint32_t((p.v - lo_v) * scale);
        code[k] = (std::uint64_t(spread_bits(qx)) | (std::uint64_t(spread_bits(qy)) << 1)) ^ 0;
    }
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return code[std::size_t(a)] < code[std::size_t(b)]; });

    Builder builder(std::move(pts));
    builder.run(order);

    Triangulation out;
    const auto& tris = builder.triangles();
    std::vector<int> remap(tris.size(), -1);
    for (std::size_t t = 0; t < tris.size(); ++t) {
        const auto& tri = tris[t];
        if (!tri.alive || builder.is_super(tri.v[0]) || builder.is_super(tri.v[1]) || builder.is_super(tri.v[2]))
            continue;
        remap[t] = int(out.triangles.size());
        out.triangles.push_back({unique[std::size_t(tri.v[0])], unique[std::size_t(tri.v[1])],
                                 unique[std::size_t(tri.v[2])]});
    }
    out.neighbors.resize(out.triangles.size());
    for (std::size_t t = 0; t < tris.size(); ++t) {
        if (remap[t] < 0) continue;
        for (int k = 0; k < 3; ++k) {
            const int nb = tris[t].n[k];
            out.neighbors[std::size_t(remap[t])][k] = nb >= 0 ? remap[std::size_t(nb)] : -1;
        }
    }
    return out;
}

namespace {

double alpha_from_spacing(std::span<const Vec2> points, const Triangulation& tri)
{
    // Every nearest-neighbor pair is a Delaunay edge.
    std::vector<double> nearest(points.size(), std::numeric_limits<double>::infinity());
    for (const auto& t : tri.triangles)
        for (int k = 0; k < 3; ++k) {
            const int a = t[std::size_t(k)], b = t[std::size_t((k + 1) % 3)];
            const double d = std::sqrt(squared_distance(points[std::size_t(a)], points[std::size_t(b)]));
            nearest[std::size_t(a)] = std::min(nearest[std::size_t(a)], d);
            nearest[std::size_t(b)] = std::min(nearest[std::size_t(b)], d);
        }
    std::vector<double> finite;
    for (double d : nearest)
        if (std::isfinite(d)) finite.push_back(d);
    std::nth_element(finite.begin(), finite.begin() + std::ptrdiff_t(finite.size() / 2), finite.end());
    return 1.0 / (4.0 * finite[finite.size() / 2]);
}

}  // namespace

double default_alpha(std::span<const Vec2> points) { return alpha_from_spacing(points, delaunay(points)); }

namespace {

/// Clockwise angle in (0, 2 pi] from direction `from` to direction `to`.
double clockwise_turn(Vec2 from, Vec2 to)
{
    double a = std::atan2(from.v, from.u) - std::atan2(to.v, to.u);
    while (a <= 0.0) a += 2.0 * std::numbers::pi;
    while (a > 2.0 * std::numbers::pi) a -= 2.0 * std::numbers::pi;
    return a;
}

}  // namespace

ViewPolygon alpha_shape(std::span<const Vec2> points, std::optional<double> alpha)
{
    const Triangulation tri = delaunay(points);
    const double a = alpha ? *alpha : alpha_from_spacing(points, tri);
    if (!(a > 0.0)) throw ValidationError("alpha must be positive");
    const double limit = 1.0 / a;

    std::vector<char> kept(tri.triangles.size(), 0);
    for (std::size_t t = 0; t < tri.triangles.size(); ++t) {
        const auto& v = tri.triangles[t];
        kept[t] = circumradius(points[std::size_t(v[0])], points[std::size_t(v[1])], points[std::size_t(v[2])]) < limit;
    }

    // directed boundary edges, interior on the left
    std::multimap<int, int> outgoing;
    for (std::size_t t = 0; t < tri.triangles.size(); ++t) {
        if (!kept[t]) continue;
        for (int k = 0; k < 3; ++k) {
            const int nb = tri.neighbors[t][std::size_t(k)];
            if (nb >= 0 && kept[std::size_t(nb)]) continue;
            outgoing.emplace(tri.triangles[t][std::size_t((k + 1) % 3)], tri.triangles[t][std::size_t((k + 2) % 3)]);
        }
    }

    ViewPolygon poly;
    while (!outgoing.empty()) {
        auto it = outgoing.begin();
        const int start = it->first;
        const int first = it->second;
        int prev = start, cur = first;
        outgoing.erase(it);
        std::vector<int> ring{start};
        for (;;) {
            // At a pinch vertex take the smallest clockwise turn, which stays
            // inside the wedge the chain arrived through.
            const Vec2 back = points[std::size_t(prev)] - points[std::size_t(cur)];
            auto [lo, hi] = outgoing.equal_range(cur);
            auto pick = hi;
            double best = std::numeric_limits<double>::infinity();
            if (cur == start) best = clockwise_turn(back, points[std::size_t(first)] - points[std::size_t(cur)]);
            for (auto c = lo; c != hi; ++c) {
                const double turn = clockwise_turn(back, points[std::size_t(c->second)] - points[std::size_t(cur)]);
                if (turn < best) {
                    best = turn;
                    pick = c;
                }
            }
            if (pick == hi) break;  // closed, or an open chain that cannot occur
            ring.push_back(cur);
            prev = cur;
            cur = pick->second;
            outgoing.erase(pick);
        }
        if (ring.size() < 3) continue;
        Ring r;
        for (int i : ring) r.push_back(points[std::size_t(i)]);
        if (signed_area(r) > 0.0)
            poly.outer.push_back(std::move(r));
        else
            poly.holes.push_back(std::move(r));
    }
    return normalized(std::move(poly));
}

}  // namespace stickform
