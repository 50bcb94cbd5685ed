// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "stickform/cuboid.h"

namespace stickform {

struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::uint32_t, 3>> triangles;

    bool empty() const { return triangles.empty(); }
    friend bool operator==(const Mesh&, const Mesh&) = default;
};

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);
double surface_area(const Mesh& m);
/// Signed enclosed volume; positive for outward-facing triangles.
double signed_volume(const Mesh& m);

/// Drops triangles with a repeated index or zero area and vertices no
/// triangle uses.
void remove_degenerate(Mesh& m);

/// Wavefront OBJ with a comment header, "v x y z" and 1-based "f i j k".
/// Coordinates are written with round-trip precision.
void write_obj(std::ostream& out, const Mesh& m);
void save_obj(const std::filesystem::path& path, const Mesh& m);
/// Reads v and f records (polygons are fan-triangulated); other records are
/// ignored.
Mesh read_obj(std::istream& in);
Mesh load_obj(const std::filesystem::path& path);

/// Area-weighted uniform samples on the triangles.
PointCloud sample_mesh_surface(const Mesh& m, std::size_t n, std::uint64_t seed);

}  // namespace stickform
