// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#include "stickform/raster.h"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <utility>

#include "stickform/error.h"

namespace stickform {

std::size_t BinaryImage::count() const
{
    return std::size_t(std::count(pixels.begin(), pixels.end(), std::uint8_t(1)));
}

BinaryImage rasterize(const ViewPolygon& p, int size)
{
    if (size < 1) throw ValidationError("raster size must be positive");
    BinaryImage img(size);
    std::vector<double> xs;
    for (int j = 0; j < size; ++j) {
        const double v = (j + 0.5) / size;
        xs.clear();
        auto collect = [&](const std::vector<Ring>& rings) {
            for (const Ring& r : rings)
                for (std::size_t i = 0, n = r.size(), k = n - 1; i < n; k = i++) {
                    const Vec2 a = r[i], b = r[k];
                    if ((a.v > v) != (b.v > v)) xs.push_back(a.u + (v - a.v) * (b.u - a.u) / (b.v - a.v));
                }
        };
        collect(p.outer);
        collect(p.holes);
        std::sort(xs.begin(), xs.end());
        // pixel center u is inside when an odd number of crossings lie right of it
        std::size_t right = 0;
        for (int i = size - 1; i >= 0; --i) {
            const double u = (i + 0.5) / size;
            while (right < xs.size() && xs[xs.size() - 1 - right] > u) ++right;
            img.at(i, j) = std::uint8_t(right % 2);
        }
    }
    return img;
}

namespace {

using Key = std::pair<int, int>;

Vec2 key_point(Key k, int n)
{
    // doubled padded-center lattice: center of padded pixel i sits at 2i
    return {double(k.first - 1) / (2.0 * n), double(k.second - 1) / (2.0 * n)};
}

}  // namespace

ViewPolygon trace(const BinaryImage& img)
{
    const int n = img.size;
    if (img.count() == std::size_t(n) * std::size_t(n)) return full_square();
    auto value = [&](int pi, int pj) {
        const int i = pi - 1, j = pj - 1;
        if (i < 0 || j < 0 || i >= n || j >= n) return 0;
        return int(img.at(i, j));
    };

    std::map<Key, Key> next;
    for (int ci = 0; ci <= n; ++ci) {
        for (int cj = 0; cj <= n; ++cj) {
            // counter-clockwise corners and the midpoints of the edges leaving them
            const std::array<int, 4> c{value(ci, cj), value(ci + 1, cj), value(ci + 1, cj + 1), value(ci, cj + 1)};
            if (c[0] == c[1] && c[1] == c[2] && c[2] == c[3]) continue;
            const std::array<Key, 4> mid{Key{2 * ci + 1, 2 * cj}, Key{2 * ci + 2, 2 * cj + 1},
                                         Key{2 * ci + 1, 2 * cj + 2}, Key{2 * ci, 2 * cj + 1}};
            // Each exit point joins the entry point that opened its run of ones.
            int last_entry = -1;
            for (int pass = 0; pass < 2; ++pass)
                for (int e = 0; e < 4; ++e) {
                    const int from = c[std::size_t(e)], to = c[std::size_t((e + 1) % 4)];
                    if (from == 0 && to == 1) last_entry = e;
                    if (pass == 1 && from == 1 && to == 0 && last_entry >= 0)
                        next[mid[std::size_t(e)]] = mid[std::size_t(last_entry)];
                }
        }
    }

    ViewPolygon poly;
    while (!next.empty()) {
        const Key start = next.begin()->first;
        std::vector<Key> keys;
        Key cur = start;
        for (;;) {
            keys.push_back(cur);
            const auto it = next.find(cur);
            if (it == next.end()) break;
            cur = it->second;
            next.erase(it);
            if (cur == start) break;
        }
        // drop vertices in the middle of straight runs
        Ring ring;
        const std::size_t m = keys.size();
        for (std::size_t i = 0; i < m; ++i) {
            const Key a = keys[(i + m - 1) % m], b = keys[i], c = keys[(i + 1) % m];
            const long cross = long(b.first - a.first) * long(c.second - b.second) -
                               long(b.second - a.second) * long(c.first - b.first);
            if (cross != 0) ring.push_back(key_point(b, n));
        }
        if (ring.size() < 3) continue;
        if (signed_area(ring) > 0.0)
            poly.outer.push_back(std::move(ring));
        else
            poly.holes.push_back(std::move(ring));
    }
    return normalized(std::move(poly));
}

double iou(const BinaryImage& a, const BinaryImage& b)
{
    if (a.size != b.size) throw ValidationError("images differ in size");
    std::size_t inter = 0, uni = 0;
    for (std::size_t k = 0; k < a.pixels.size(); ++k) {
        inter += a.pixels[k] & b.pixels[k];
        uni += a.pixels[k] | b.pixels[k];
    }
    return uni == 0 ? 1.0 : double(inter) / double(uni);
}

}  // namespace stickform
