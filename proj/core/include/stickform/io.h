// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stickform/cuboid.h"
#include "stickform/detail.h"
#include "stickform/fit.h"
#include "stickform/template.h"

namespace stickform {

/// ASCII XYZ: one "x y z" per line. Blank lines and lines starting with '#'
/// are skipped; a fourth integer column is read as the point label.
PointCloud read_xyz(std::istream& in);
/// Writes coordinates with round-trip precision; labels go to a fourth column.
void write_xyz(std::ostream& out, const PointCloud& p);

/// Binary: little-endian uint64 point count, then count float32 triples.
PointCloud read_binary_cloud(std::istream& in);
void write_binary_cloud(std::ostream& out, const PointCloud& p);

/// Picks the binary format for ".bin" and XYZ otherwise.
PointCloud load_point_cloud(const std::filesystem::path& path);
void save_point_cloud(const std::filesystem::path& path, const PointCloud& p);

/// {"category": str, "values": [...]}
nlohmann::json params_to_json(const TemplateConfig& t, const ParameterVector& a);
/// Checks the category (when present) and the length against `t`; values are
/// kept as written, without clamping.
ParameterVector params_from_json(const TemplateConfig& t, const nlohmann::json& j);

/// Array of per-cuboid detail entries for the alive cuboids.
nlohmann::json details_to_json(const StructureInstance& s, const std::vector<Detail>& details);
/// One Detail per cuboid of `t`; cuboids without an entry get full squares.
/// Accepts a single entry, an array of entries or {"details": [...]}.
std::vector<Detail> details_from_json(const TemplateConfig& t, const nlohmann::json& j);

/// Frames, key points and alive flags of an evaluated structure.
nlohmann::json structure_to_json(const StructureInstance& s);

/// [[x, y, z], ...]
PointCloud cloud_from_json(const nlohmann::json& j);
nlohmann::json cloud_to_json(const PointCloud& p);

/// Overrides fields of `base` from {"iterations", "step_size", "points",
/// "rule", "momentum", "second_moment", "final_step_fraction",
/// "volume_threshold", "seed", "resample"}; unknown keys are rejected.
FitConfig fit_config_from_json(const nlohmann::json& j, FitConfig base = {});
StepRule step_rule_from_string(const std::string& s);
nlohmann::json fit_report_to_json(const FitReport& r);
nlohmann::json expansion_to_json(const Expansion& e);

std::string read_text_file(const std::filesystem::path& path);
/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace stickform
