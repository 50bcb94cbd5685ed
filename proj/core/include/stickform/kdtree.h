// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stickform/vec.h"

namespace stickform {

/// Static 3-d tree for exact nearest-neighbor queries. Among equidistant
/// points the lowest index wins, so results do not depend on tree layout.
class KdTree {
  public:
    struct Hit {
        std::size_t index = 0;
        double dist2 = 0.0;
    };

    KdTree() = default;
    explicit KdTree(std::span<const Vec3> points);

    Hit nearest(const Vec3& query) const;

    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }

  private:
    struct Node {
        std::uint32_t begin;
        std::uint32_t end;
        std::int32_t left = -1;
        std::int32_t right = -1;
        int axis = 0;
        double split = 0.0;
    };

    int build(std::uint32_t begin, std::uint32_t end);

    std::vector<Vec3> points_;
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;
};

}  // namespace stickform
