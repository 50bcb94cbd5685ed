// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "stickform/cuboid.h"
#include "stickform/error.h"

namespace stickform {

enum class Axis { x = 0, y = 1, z = 2 };

/// Slot order inside a cuboid definition.
inline constexpr std::array<std::string_view, 8> kSlotNames{"x1", "y1", "z1", "x2",
                                                            "y2", "z2", "w",  "l"};

struct KeyRef {
    int cuboid = 0;
    int key = 0;
    friend bool operator==(const KeyRef&, const KeyRef&) = default;
};

/// s1 * K[cuboid][key] . e1
struct PointTerm {
    int sign = 1;
    KeyRef ref;
    Axis axis = Axis::x;
    friend bool operator==(const PointTerm&, const PointTerm&) = default;
};

/// s2 * (a * K[from] + (1 - a) * K[to]) . e2
struct LineTerm {
    int sign = 1;
    KeyRef from;  ///< "p1" of the line, weight a
    KeyRef to;    ///< "p2" of the line, weight 1 - a
    Axis axis = Axis::x;
    int param = -1;
    friend bool operator==(const LineTerm&, const LineTerm&) = default;
};

/// min + (max - min) * a, with `def` the value at the default parameter.
struct RangeTerm {
    double min = 0.0;
    double def = 0.0;
    double max = 0.0;
    int param = -1;
    friend bool operator==(const RangeTerm&, const RangeTerm&) = default;
};

/// sign * (value of an earlier slot).
struct CopyTerm {
    int sign = 1;
    int cuboid = 0;
    int slot = 0;
    friend bool operator==(const CopyTerm&, const CopyTerm&) = default;
};

/// One cuboid parameter b = c + r a1 + s1 K e1 + s2 (a2 K + (1 - a2) K') e2,
/// plus an optional copied slot value. Terms absent from the code are empty.
struct SlotSpec {
    double constant = 0.0;  ///< the "const" code, kept apart from the range minimum
    std::optional<RangeTerm> range;
    std::optional<PointTerm> relate;
    std::optional<LineTerm> line;
    std::optional<CopyTerm> copy;

    double c() const { return constant + (range ? range->min : 0.0); }
    double r() const { return range ? range->max - range->min : 0.0; }
    int s1() const { return relate ? relate->sign : 0; }
    int s2() const { return line ? line->sign : 0; }
    std::optional<int> param_index() const
    {
        if (range) return range->param;
        if (line) return line->param;
        return std::nullopt;
    }
    /// Number of free parameters this slot owns (0 or 1).
    int parameter_count() const { return param_index() ? 1 : 0; }

    friend bool operator==(const SlotSpec&, const SlotSpec&) = default;
};

struct CuboidDef {
    std::string name;
    std::array<SlotSpec, 8> slots;
    friend bool operator==(const CuboidDef&, const CuboidDef&) = default;
};

inline constexpr double kDefaultVolumeThreshold = 1e-4;

struct TemplateConfig {
    std::string category;
    std::vector<CuboidDef> cuboids;
    std::vector<std::string> param_names;  ///< "<cuboid>.<slot>", dense by index
    double volume_threshold = kDefaultVolumeThreshold;

    std::size_t n_params() const { return param_names.size(); }
    /// Index of the named cuboid, or -1.
    int cuboid_index(std::string_view name) const;

    friend bool operator==(const TemplateConfig&, const TemplateConfig&) = default;
};

struct ParameterVector {
    std::vector<double> values;
    std::vector<std::string> names;

    std::size_t size() const { return values.size(); }
};

struct StructureInstance {
    std::vector<std::string> names;
    std::vector<Stick> sticks;
    std::vector<Frame> frames;
    std::vector<KeyPoints> keypoints;
    std::vector<bool> alive;

    std::size_t size() const { return frames.size(); }
    std::size_t alive_count() const { return std::size_t(std::count(alive.begin(), alive.end(), true)); }
};

/// Parses a template document (JSON text).
TemplateConfig parse_template(std::string_view document);
TemplateConfig template_from_json(const nlohmann::json& document);
/// Serializes back to the template document schema; parse_template inverts it.
nlohmann::json template_to_json(const TemplateConfig& t);

ParameterVector default_params(const TemplateConfig& t);

/// Checks the length against the template and clamps every value to [0, 1].
ParameterVector checked_params(const TemplateConfig& t, std::span<const double> values);

/// Evaluates every cuboid in order: slot values, stick, frame, key points and
/// the volume filter.
StructureInstance evaluate(const TemplateConfig& t, const ParameterVector& a);

/// Slot values only (x1, y1, z1, x2, y2, z2, w, l per cuboid).
std::vector<std::array<double, 8>> slot_values(const TemplateConfig& t, const ParameterVector& a);

/// Cuboids of `s` that are alive, in order.
std::vector<int> alive_indices(const StructureInstance& s);

/// Structure built directly from sticks, no template involved.
StructureInstance structure_from_sticks(std::vector<std::string> names, std::vector<Stick> sticks,
                                        double volume_threshold = kDefaultVolumeThreshold);

// ---------------------------------------------------------------------------
// Generic evaluation, shared by the plain and the differentiated paths.

template <class T>
struct BasicEvaluation {
    std::vector<std::array<T, 8>> slots;
    std::vector<BasicFrame<T>> frames;
    std::vector<BasicKeyPoints<T>> keypoints;
};

namespace detail {
[[noreturn]] void throw_degenerate(const TemplateConfig& t, std::size_t cuboid);
[[noreturn]] void throw_length(const TemplateConfig& t, std::size_t got);
}  // namespace detail

/// Evaluates the slot equations over scalar type T, cuboid by cuboid, so key
/// points of earlier cuboids are available to later ones. `a` must already be
/// clamped to [0, 1].
template <class T>
BasicEvaluation<T> evaluate_generic(const TemplateConfig& t, std::span<const T> a)
{
    if (a.size() != t.n_params()) detail::throw_length(t, a.size());
    BasicEvaluation<T> ev;
    const std::size_t n = t.cuboids.size();
    ev.slots.resize(n);
    ev.frames.resize(n);
    ev.keypoints.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const CuboidDef& def = t.cuboids[i];
        std::array<T, 8>& b = ev.slots[i];
        for (std::size_t s = 0; s < 8; ++s) {
            const SlotSpec& spec = def.slots[s];
            T v = T(spec.c());
            if (spec.copy) {
                const T& src = ev.slots[std::size_t(spec.copy->cuboid)][std::size_t(spec.copy->slot)];
                v = spec.copy->sign > 0 ? v + src : v - src;
            }
            if (spec.range) v = v + spec.r() * a[std::size_t(spec.range->param)];
            if (spec.relate) {
                const auto& p = spec.relate;
                const T& k = ev.keypoints[std::size_t(p->ref.cuboid)][std::size_t(p->ref.key)][std::size_t(p->axis)];
                v = p->sign > 0 ? v + k : v - k;
            }
            if (spec.line) {
                const auto& ln = spec.line;
                const T& w = a[std::size_t(ln->param)];
                const T& k2 = ev.keypoints[std::size_t(ln->from.cuboid)][std::size_t(ln->from.key)][std::size_t(ln->axis)];
                const T& k3 = ev.keypoints[std::size_t(ln->to.cuboid)][std::size_t(ln->to.key)][std::size_t(ln->axis)];
                const T term = w * k2 + (1.0 - w) * k3;
                v = ln->sign > 0 ? v + term : v - term;
            }
            b[s] = v;
        }
        BasicStick<T> stick{{b[0], b[1], b[2]}, {b[3], b[4], b[5]}, b[6], b[7]};
        try {
            ev.frames[i] = frame_from_stick(stick);
        } catch (const DegenerateStickError&) {
            detail::throw_degenerate(t, i);
        }
        ev.keypoints[i] = key_points(ev.frames[i]);
    }
    return ev;
}

}  // namespace stickform
