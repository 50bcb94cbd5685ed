// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "stickform/detail.h"
#include "stickform/template.h"

namespace stickform {

struct SdfOptions {
    /// Outside every cuboid, return the Euclidean distance to the nearest
    /// one instead of the constant 1.
    bool smooth_outside = false;
};

/// Field over a structure with per-cuboid details. Inside a cuboid the value
/// comes from the three views in local unit-cube coordinates: minus the
/// smallest polygon distance when the point projects inside all three views,
/// plus it (capped at 1) otherwise. Overlapping cuboids take the minimum.
/// Points outside every alive cuboid get +1.
class SdfField {
  public:
    /// `details` holds one entry per cuboid of `s` (dead ones included).
    SdfField(const StructureInstance& s, std::span<const Detail> details, SdfOptions options = {});

    double operator()(const Vec3& p) const;

    /// World-space bounding box of the alive cuboids.
    Vec3 lower() const { return lower_; }
    Vec3 upper() const { return upper_; }

  private:
    struct Part {
        FrameInverse inverse;
        Vec3 lower, upper;
        const Detail* detail;
    };
    std::vector<Part> parts_;
    SdfOptions options_;
    Vec3 lower_, upper_;
};

double sdf_value(const StructureInstance& s, std::span<const Detail> details, const Vec3& p,
                 SdfOptions options = {});

/// Value of the field inside one cuboid, from local coordinates.
double local_detail_value(const Detail& d, const Vec3& local);

inline constexpr int kDefaultGridResolution = 128;
inline constexpr double kDefaultGridPadding = 0.05;

struct SdfGrid {
    int resolution = 0;
    Vec3 lower, upper;
    std::vector<float> values;  ///< x fastest, then y, then z

    Vec3 voxel_size() const { return (upper - lower) / double(resolution); }
    /// Center of voxel (i, j, k).
    Vec3 center(int i, int j, int k) const;
    float at(int i, int j, int k) const
    {
        return values[(std::size_t(k) * std::size_t(resolution) + std::size_t(j)) * std::size_t(resolution) +
                      std::size_t(i)];
    }
};

struct GridOptions {
    int resolution = kDefaultGridResolution;
    double padding = kDefaultGridPadding;  ///< fraction of the box extent added per side
    unsigned threads = 0;                  ///< 0: hardware concurrency
    SdfOptions sdf;
};

/// Samples the field at voxel centers of the padded bounding box.
SdfGrid build_grid(const StructureInstance& s, std::span<const Detail> details, const GridOptions& options = {});

/// Raw little-endian float32 values plus a JSON sidecar with resolution and
/// bounds.
void write_sdf_grid(const SdfGrid& g, const std::filesystem::path& raw, const std::filesystem::path& sidecar);
SdfGrid read_sdf_grid(const std::filesystem::path& raw, const std::filesystem::path& sidecar);

}  // namespace stickform
