// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "stickform/detail.h"
#include "stickform/template.h"

namespace stickform {

/// A named oriented box: center plus three half-extent vectors.
struct AnnotatedPart {
    std::string name;
    Vec3 center;
    std::array<Vec3, 3> axes;
};

/// Reads {"parts": [{"name", "center": [x, y, z], "axes": [[...], [...], [...]]}]}.
/// Axes must be non-zero and mutually orthogonal within 1e-6 (cosine).
std::vector<AnnotatedPart> parse_annotation(std::string_view document);
std::vector<AnnotatedPart> annotation_from_json(const nlohmann::json& document);

/// Stick along the longest box axis (ties prefer the third axis, then the
/// second). The stick points along the positive sense of its largest world
/// component. w is the extent of the remaining axis closer to the frame's
/// x direction, l the other.
Stick stickify(const AnnotatedPart& p);

std::array<Vec3, 8> corners(const AnnotatedPart& p);

enum class RelationKind { self_symmetry, pair_symmetry, joint };

struct RelationFinding {
    RelationKind kind = RelationKind::joint;
    Plane plane = Plane::yz;  ///< symmetry findings
    int part = 0;             ///< the part, or the lower index of a pair, or the joint source
    int other = -1;           ///< pair partner or joint target
    int control = 0;          ///< joint source point: 0 for p1, 1 for p2
    int key = 0;              ///< joint target key point
    double residual = 0.0;
};

inline constexpr double kSymmetryThreshold = 0.05;
inline constexpr double kJointThreshold = 0.05;
inline constexpr double kFreeRangeFraction = 0.3;

/// Self and pair reflections across the three world coordinate planes,
/// compared by the symmetric maximum corner distance. Each part joins at
/// most one pair per plane, chosen greedily by lowest residual.
std::vector<RelationFinding> detect_symmetries(const std::vector<AnnotatedPart>& parts,
                                               double threshold = kSymmetryThreshold);

/// For every control point, the nearest key point of any other cuboid
/// (ties: lower cuboid, then lower key), kept when strictly closer than
/// `threshold`.
std::vector<RelationFinding> detect_joints(const std::vector<Stick>& sticks, double threshold = kJointThreshold);

struct AutoTemplate {
    TemplateConfig config;
    nlohmann::json document;
    std::vector<RelationFinding> applied;  ///< findings that became slot codes
};

struct AutoTemplateOptions {
    std::string category = "auto";
    double free_range_fraction = kFreeRangeFraction;  ///< of the overall bounding box extent
};

/// Template whose default evaluation reproduces the sticks of `parts`.
/// Joints become key point relations with the observed offset, symmetric
/// partners mirror the earlier part's control points, self-symmetric
/// sticks are pinned to the plane, and everything else gets a range
/// centered at the observed value. Joint cycles are broken by dropping the
/// joint with the largest residual.
AutoTemplate emit_template(const std::vector<AnnotatedPart>& parts, const std::vector<RelationFinding>& findings,
                           const AutoTemplateOptions& options = {});

/// stickify, detect_symmetries, detect_joints and emit_template.
AutoTemplate auto_template(const std::vector<AnnotatedPart>& parts, const AutoTemplateOptions& options = {});

}  // namespace stickform
