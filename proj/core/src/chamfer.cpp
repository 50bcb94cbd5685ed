// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#include "stickform/chamfer.h"

#include "stickform/error.h"

namespace stickform {

namespace {

double mean_nearest(std::span<const Vec3> from, const KdTree& to, std::vector<std::size_t>* match)
{
    double sum = 0.0;
    if (match) match->resize(from.size());
    for (std::size_t i = 0; i < from.size(); ++i) {
        const auto hit = to.nearest(from[i]);
        sum += hit.dist2;
        if (match) (*match)[i] = hit.index;
    }
    return sum / double(from.size());
}

void require_points(std::span<const Vec3> p, std::span<const Vec3> q)
{
    if (p.empty() || q.empty()) throw ValidationError("chamfer distance needs two non-empty point clouds");
}

}  // namespace

double chamfer(std::span<const Vec3> p, std::span<const Vec3> q)
{
    require_points(p, q);
    const KdTree tp(p), tq(q);
    return mean_nearest(p, tq, nullptr) + mean_nearest(q, tp, nullptr);
}

double chamfer(const PointCloud& p, const PointCloud& q) { return chamfer(p.points, q.points); }

ChamferMatch chamfer_match(std::span<const Vec3> p, std::span<const Vec3> q, const KdTree& q_tree)
{
    require_points(p, q);
    ChamferMatch m;
    const KdTree tp(p);
    m.forward = mean_nearest(p, q_tree, &m.p_to_q);
    m.backward = mean_nearest(q, tp, &m.q_to_p);
    m.value = m.forward + m.backward;
    return m;
}

}  // namespace stickform
