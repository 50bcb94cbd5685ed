// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "stickform/mesh.h"
#include "stickform/sdf.h"

namespace stickform {

/// Zero isosurface of the grid with linear interpolation along cell edges.
/// Negative values are inside; triangles face toward positive values.
/// Vertices on a shared grid edge are shared, and ambiguous cell faces are
/// resolved by the sign of the face's mean corner value, so neighboring cells
/// agree and the surface is closed away from the grid border.
Mesh marching_cubes(const SdfGrid& g);

/// build_grid followed by marching_cubes.
Mesh mesh_structure(const StructureInstance& s, std::span<const Detail> details, const GridOptions& options = {});

}  // namespace stickform
