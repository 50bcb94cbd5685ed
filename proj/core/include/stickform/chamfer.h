// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stickform/cuboid.h"
#include "stickform/kdtree.h"

namespace stickform {

/// Nearest-neighbor correspondences in both directions, as used by the
/// Chamfer loss and its gradient.
struct ChamferMatch {
    double value = 0.0;
    double forward = 0.0;   ///< mean squared distance from P to Q
    double backward = 0.0;  ///< mean squared distance from Q to P
    std::vector<std::size_t> p_to_q;
    std::vector<std::size_t> q_to_p;
};

/// Symmetric Chamfer distance: mean squared nearest-neighbor distance from P
/// to Q plus the same from Q to P. Throws on an empty cloud.
double chamfer(std::span<const Vec3> p, std::span<const Vec3> q);
double chamfer(const PointCloud& p, const PointCloud& q);

/// Chamfer with correspondences. `q_tree` must be built over `q`.
ChamferMatch chamfer_match(std::span<const Vec3> p, std::span<const Vec3> q, const KdTree& q_tree);

}  // namespace stickform
