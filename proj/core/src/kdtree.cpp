// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#include "stickform/kdtree.h"

#include <algorithm>
#include <limits>
#include <numeric>

namespace stickform {

namespace {
constexpr std::uint32_t kLeafSize = 8;
}

KdTree::KdTree(std::span<const Vec3> points) : points_(points.begin(), points.end())
{
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), 0u);
    if (!points_.empty()) {
        nodes_.reserve(2 * points_.size() / kLeafSize + 2);
        build(0, std::uint32_t(points_.size()));
    }
}

int KdTree::build(std::uint32_t begin, std::uint32_t end)
{
    const int id = int(nodes_.size());
    nodes_.push_back({begin, end});
    if (end - begin <= kLeafSize) return id;

    Vec3 lo = points_[order_[begin]], hi = lo;
    for (std::uint32_t i = begin; i < end; ++i) {
        const Vec3& p = points_[order_[i]];
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], p[a]);
            hi[a] = std::max(hi[a], p[a]);
        }
    }
    int axis = 0;
    for (int a = 1; a < 3; ++a)
        if (hi[a] - lo[a] > hi[axis] - lo[axis]) axis = a;
    if (hi[axis] == lo[axis]) return id;  // all points coincide

    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) { return points_[a][axis] < points_[b][axis]; });
    const double split = points_[order_[mid]][axis];
    const int left = build(begin, mid);
    const int right = build(mid, end);
    Node& n = nodes_[std::size_t(id)];
    n.axis = axis;
    n.split = split;
    n.left = left;
    n.right = right;
    return id;
}

KdTree::Hit KdTree::nearest(const Vec3& q) const
{
    Hit best{std::numeric_limits<std::size_t>::max(), std::numeric_limits<double>::infinity()};
    if (nodes_.empty()) return best;

    struct Pending {
        int node;
        double bound;
    };
    Pending stack[128];
    int top = 0;
    stack[top++] = {0, 0.0};
    while (top > 0) {
        const Pending cur = stack[--top];
        if (cur.bound > best.dist2) continue;
        const Node& n = nodes_[std::size_t(cur.node)];
        if (n.left < 0) {
            for (std::uint32_t i = n.begin; i < n.end; ++i) {
                const std::uint32_t idx = order_[i];
                const double d2 = squared_distance(points_[idx], q);
                if (d2 < best.dist2 || (d2 == best.dist2 && idx < best.index)) best = {idx, d2};
            }
            continue;
        }
        // Left holds coordinates <= split, right holds >= split.
        const double diff = q[n.axis] - n.split;
        const int near = diff < 0.0 ? n.left : n.right;
        const int far = diff < 0.0 ? n.right : n.left;
        stack[top++] = {far, std::max(cur.bound, diff * diff)};
        stack[top++] = {near, cur.bound};
    }
    return best;
}

}  // namespace stickform
