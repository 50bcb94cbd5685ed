// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "stickform/detail.h"
#include "stickform/mesh.h"
#include "stickform/sdf.h"
#include "stickform/template.h"

namespace stickform {

/// Chamfer between `n` surface samples of the reconstruction and the target.
double surface_cd(const Mesh& reconstruction, const PointCloud& target, std::size_t n, std::uint64_t seed);
double surface_cd(const StructureInstance& reconstruction, const PointCloud& target, std::size_t n,
                  std::uint64_t seed);

/// Uniform points of the field's negative region, by rejection inside its
/// bounding box. Throws when nothing is accepted within the attempt budget.
/// `attempts`, when given, receives the number of candidates drawn.
PointCloud sample_solid(const SdfField& field, std::size_t n, std::uint64_t seed, std::size_t* attempts = nullptr);

/// Chamfer between `n` interior samples of the reconstruction and target
/// interior samples.
double solid_cd(const SdfField& reconstruction, const PointCloud& target_solid, std::size_t n, std::uint64_t seed);

inline constexpr double kSymmetryLogFloor = 1e-9;

/// Reflection across a world coordinate plane through the origin.
PointCloud reflect(const PointCloud& p, Plane plane);

/// Mean over the three coordinate planes of |log CD(Ps, Ps') - log CD(Pt, Pt')|,
/// each Chamfer floored at kSymmetryLogFloor.
double symmetry_distance(const PointCloud& reconstruction, const PointCloud& target);

inline constexpr double kContactEpsilon = 0.01;

/// True when the cuboid `b`, grown by `eps` on every face, overlaps `a`.
bool cuboids_touch(const Frame& a, const Frame& b, double eps = kContactEpsilon);

/// Every alive cuboid is connected through touching cuboids to one that
/// reaches the ground (within `eps` of the lowest world y).
bool rooted(const StructureInstance& s, double eps = kContactEpsilon);

/// The volume-weighted center, projected to the ground (x, z), lies inside
/// the convex hull of the cuboid parts within `eps` of the ground.
bool stable(const StructureInstance& s, double eps = kContactEpsilon);

/// (1 - t) a + t b per coordinate.
ParameterVector interpolate_params(const ParameterVector& a, const ParameterVector& b, double t);

/// Defaults plus normal noise with standard deviation `spread`, clipped to
/// [0, 1]. Deterministic per seed.
ParameterVector random_sample(const TemplateConfig& t, std::uint64_t seed, double spread);

struct MetricsReport {
    double surface_cd = 0.0;
    double solid_cd = 0.0;
    double symmetry_distance = 0.0;
    bool rooted = false;
    bool stable = false;
};

nlohmann::json to_json(const MetricsReport& r);
/// Header plus one row per object.
void write_metrics_csv(std::ostream& out, const std::vector<std::pair<std::string, MetricsReport>>& rows);

struct MetricsOptions {
    std::size_t samples = 4096;
    std::uint64_t seed = 0;
    int resolution = 64;  ///< grid used for the reconstruction's surface
};

/// Full report for a structure with details against target surface points.
/// Surface samples come from the extracted mesh; solid samples of the target
/// come from `target_solid` when given, else the metric is left at zero.
MetricsReport compute_metrics(const StructureInstance& s, std::span<const Detail> details, const PointCloud& target,
                              const PointCloud* target_solid, const MetricsOptions& options = {});

}  // namespace stickform
