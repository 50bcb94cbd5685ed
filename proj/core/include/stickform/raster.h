// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "stickform/polygon.h"

namespace stickform {

inline constexpr int kDetailResolution = 128;

/// Square binary image over [0,1]^2. Pixel (i, j) covers
/// [i/n, (i+1)/n) x [j/n, (j+1)/n); i runs along u, j along v.
struct BinaryImage {
    int size = kDetailResolution;
    std::vector<std::uint8_t> pixels;  ///< row-major in j, then i

    BinaryImage() : BinaryImage(kDetailResolution) {}
    explicit BinaryImage(int n) : size(n), pixels(std::size_t(n) * std::size_t(n), 0) {}

    std::uint8_t at(int i, int j) const { return pixels[std::size_t(j) * std::size_t(size) + std::size_t(i)]; }
    std::uint8_t& at(int i, int j) { return pixels[std::size_t(j) * std::size_t(size) + std::size_t(i)]; }
    std::size_t count() const;
    friend bool operator==(const BinaryImage&, const BinaryImage&) = default;
};

/// A pixel is set when its center is inside the polygon (even-odd).
BinaryImage rasterize(const ViewPolygon& p, int size = kDetailResolution);

/// Marching-squares contour at level 0.5 on the zero-padded image. Contour
/// vertices sit on pixel boundaries; diagonal pixel pairs stay separate. An
/// all-ones image yields the full square.
ViewPolygon trace(const BinaryImage& img);

/// Intersection over union of two same-size images; 1 for two empty images.
double iou(const BinaryImage& a, const BinaryImage& b);

}  // namespace stickform
