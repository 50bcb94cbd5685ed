// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#include "stickform/auto_template.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>

#include <nlohmann/json.hpp>

#include "stickform/error.h"

namespace stickform {

using nlohmann::json;

namespace {

Vec3 vec_from_json(const json& j, const std::string& where)
{
    if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() || !j[2].is_number())
        throw ValidationError(where + ": expected [x, y, z]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::size_t mirror_axis(Plane p) { return p == Plane::yz ? 0 : (p == Plane::xz ? 1 : 2); }

Vec3 mirror(Vec3 v, Plane p)
{
    v[mirror_axis(p)] = -v[mirror_axis(p)];
    return v;
}

template <class A, class B>
double corner_hausdorff(const A& a, const B& b)
{
    auto one_way = [](const auto& from, const auto& to) {
        double worst = 0.0;
        for (const Vec3& p : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const Vec3& q : to) best = std::min(best, distance(p, q));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(one_way(a, b), one_way(b, a));
}

std::array<Vec3, 8> mirrored(const std::array<Vec3, 8>& c, Plane p)
{
    std::array<Vec3, 8> out{};
    for (std::size_t i = 0; i < 8; ++i) out[i] = mirror(c[i], p);
    return out;
}

std::string sanitize(const std::string& name)
{
    std::string out;
    for (char c : name) out += std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ? c : '_';
    if (out.empty() || out == "line") out = "part_" + out;
    return out;
}

const char* axis_name(std::size_t a) { return a == 0 ? "x" : (a == 1 ? "y" : "z"); }

}  // namespace

std::vector<AnnotatedPart> annotation_from_json(const json& document)
{
    if (!document.is_object() || !document.contains("parts") || !document["parts"].is_array())
        throw ValidationError("annotation: expected an object with a 'parts' list");
    std::vector<AnnotatedPart> parts;
    for (std::size_t i = 0; i < document["parts"].size(); ++i) {
        const json& p = document["parts"][i];
        const std::string where = "parts[" + std::to_string(i) + "]";
        if (!p.is_object() || !p.contains("name") || !p["name"].is_string())
            throw ValidationError(where + ".name: expected a string");
        if (!p.contains("center")) throw ValidationError(where + ".center: missing");
        if (!p.contains("axes") || !p["axes"].is_array() || p["axes"].size() != 3)
            throw ValidationError(where + ".axes: expected three vectors");
        AnnotatedPart part;
        part.name = p["name"].get<std::string>();
        part.center = vec_from_json(p["center"], where + ".center");
        for (std::size_t k = 0; k < 3; ++k) {
            part.axes[k] = vec_from_json(p["axes"][k], where + ".axes[" + std::to_string(k) + "]");
            if (!(norm(part.axes[k]) > 0.0)) throw ValidationError(where + ".axes: zero-length axis");
        }
        for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = a + 1; b < 3; ++b) {
                const double c = dot(part.axes[a], part.axes[b]) / (norm(part.axes[a]) * norm(part.axes[b]));
                if (std::abs(c) > 1e-6) throw ValidationError(where + ".axes: not mutually orthogonal");
            }
        parts.push_back(part);
    }
    return parts;
}

std::vector<AnnotatedPart> parse_annotation(std::string_view document)
{
    json j;
    try {
        j = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("annotation: ") + e.what());
    }
    return annotation_from_json(j);
}

std::array<Vec3, 8> corners(const AnnotatedPart& p)
{
    std::array<Vec3, 8> out{};
    for (int c = 0; c < 8; ++c) {
        Vec3 v = p.center;
        for (std::size_t a = 0; a < 3; ++a) v = v + ((c >> (2 - a)) & 1 ? 1.0 : -1.0) * p.axes[a];
        out[std::size_t(c)] = v;
    }
    return out;
}

Stick stickify(const AnnotatedPart& p)
{
    std::size_t longest = 2;
    for (std::size_t a : {std::size_t(1), std::size_t(0)})
        if (norm(p.axes[a]) > norm(p.axes[longest])) longest = a;
    Vec3 half = p.axes[longest];
    std::size_t dominant = 0;
    for (std::size_t a = 1; a < 3; ++a)
        if (std::abs(half[a]) > std::abs(half[dominant])) dominant = a;
    if (half[dominant] < 0.0) half = -half;

    Stick s;
    s.p1 = p.center - half;
    s.p2 = p.center + half;
    std::array<std::size_t, 2> rest{};
    std::size_t r = 0;
    for (std::size_t a = 0; a < 3; ++a)
        if (a != longest) rest[r++] = a;
    const Vec3 x_dir = rotation_columns(half)[0];
    const Vec3 u = p.axes[rest[0]], v = p.axes[rest[1]];
    const bool u_first = std::abs(dot(u, x_dir)) / norm(u) >= std::abs(dot(v, x_dir)) / norm(v);
    s.w = 2.0 * norm(u_first ? u : v);
    s.l = 2.0 * norm(u_first ? v : u);
    return s;
}

std::vector<RelationFinding> detect_symmetries(const std::vector<AnnotatedPart>& parts, double threshold)
{
    std::vector<std::array<Vec3, 8>> c;
    for (const auto& p : parts) c.push_back(corners(p));
    std::vector<RelationFinding> out;
    for (Plane plane : {Plane::yz, Plane::xz, Plane::xy}) {
        for (std::size_t i = 0; i < parts.size(); ++i) {
            const double r = corner_hausdorff(mirrored(c[i], plane), c[i]);
            if (r < threshold) out.push_back({RelationKind::self_symmetry, plane, int(i), -1, 0, 0, r});
        }
        std::vector<RelationFinding> candidates;
        for (std::size_t i = 0; i < parts.size(); ++i)
            for (std::size_t j = i + 1; j < parts.size(); ++j) {
                const double r = corner_hausdorff(mirrored(c[i], plane), c[j]);
                if (r < threshold) candidates.push_back({RelationKind::pair_symmetry, plane, int(i), int(j), 0, 0, r});
            }
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const auto& a, const auto& b) { return a.residual < b.residual; });
        std::vector<bool> paired(parts.size(), false);
        for (const auto& f : candidates) {
            if (paired[std::size_t(f.part)] || paired[std::size_t(f.other)]) continue;
            paired[std::size_t(f.part)] = paired[std::size_t(f.other)] = true;
            out.push_back(f);
        }
    }
    return out;
}

std::vector<RelationFinding> detect_joints(const std::vector<Stick>& sticks, double threshold)
{
    std::vector<KeyPoints> keys;
    for (const Stick& s : sticks) keys.push_back(key_points(frame_from_stick(s)));
    std::vector<RelationFinding> out;
    for (std::size_t i = 0; i < sticks.size(); ++i)
        for (int control = 0; control < 2; ++control) {
            const Vec3 p = control == 0 ? sticks[i].p1 : sticks[i].p2;
            double best = std::numeric_limits<double>::infinity();
            int best_part = -1, best_key = -1;
            for (std::size_t j = 0; j < sticks.size(); ++j) {
                if (j == i) continue;
                for (int k = 0; k < kKeyPointCount; ++k) {
                    const double d = distance(p, keys[j][std::size_t(k)]);
                    if (d < best) {  // strict: earlier cuboid and key win ties
                        best = d;
                        best_part = int(j);
                        best_key = k;
                    }
                }
            }
            if (best_part >= 0 && best < threshold)
                out.push_back({RelationKind::joint, Plane::yz, int(i), best_part, control, best_key, best});
        }
    return out;
}

namespace {

enum class SlotSource { free, joint, symmetry, self };

struct SlotPlan {
    SlotSource source = SlotSource::free;
    json code;
};

// Finds a cycle in the dependency graph (edges part -> prerequisite) and
// returns it as a list of parts, or an empty list.
std::vector<int> find_cycle(const std::vector<std::set<int>>& deps)
{
    const std::size_t n = deps.size();
    std::vector<int> state(n, 0), parent(n, -1);
    for (std::size_t root = 0; root < n; ++root) {
        if (state[root]) continue;
        std::vector<std::pair<int, std::set<int>::const_iterator>> stack{{int(root), deps[root].begin()}};
        state[root] = 1;
        while (!stack.empty()) {
            auto& [v, it] = stack.back();
            if (it == deps[std::size_t(v)].end()) {
                state[std::size_t(v)] = 2;
                stack.pop_back();
                continue;
            }
            const int w = *it++;
            if (state[std::size_t(w)] == 1) {
                std::vector<int> cycle{w};
                for (int u = v; u != w; u = parent[std::size_t(u)]) cycle.push_back(u);
                std::reverse(cycle.begin() + 1, cycle.end());
                return cycle;
            }
            if (state[std::size_t(w)] == 0) {
                state[std::size_t(w)] = 1;
                parent[std::size_t(w)] = v;
                stack.push_back({w, deps[std::size_t(w)].begin()});
            }
        }
    }
    return {};
}

}  // namespace

AutoTemplate emit_template(const std::vector<AnnotatedPart>& parts, const std::vector<RelationFinding>& findings,
                           const AutoTemplateOptions& options)
{
    const std::size_t n = parts.size();
    if (n == 0) throw ValidationError("annotation has no parts");
    std::vector<Stick> sticks;
    for (const auto& p : parts) sticks.push_back(stickify(p));

    std::vector<std::string> names;
    for (const auto& p : parts) {
        std::string base = sanitize(p.name), name = base;
        for (int k = 2; std::find(names.begin(), names.end(), name) != names.end(); ++k)
            name = base + "_" + std::to_string(k);
        names.push_back(name);
    }

    double extent = 0.0;
    {
        Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
        for (const auto& p : parts)
            for (const Vec3& c : corners(p))
                for (std::size_t a = 0; a < 3; ++a) {
                    lo[a] = std::min(lo[a], c[a]);
                    hi[a] = std::max(hi[a], c[a]);
                }
        for (std::size_t a = 0; a < 3; ++a) extent = std::max(extent, hi[a] - lo[a]);
    }
    const double delta = options.free_range_fraction * extent;
    if (!(delta > 0.0)) throw ValidationError("annotation has zero extent");

    // Joints (one per control point) and mirror sources (one per part).
    std::vector<std::array<std::optional<RelationFinding>, 2>> joint(n);
    std::vector<std::optional<RelationFinding>> mirror_of(n);
    std::vector<std::vector<RelationFinding>> self(n);
    for (const auto& f : findings) {
        if (f.part < 0 || std::size_t(f.part) >= n || (f.kind != RelationKind::self_symmetry &&
                                                      (f.other < 0 || std::size_t(f.other) >= n)))
            throw ValidationError("relation finding references an unknown part");
        if (f.kind == RelationKind::joint) {
            auto& slot = joint[std::size_t(f.part)][std::size_t(f.control)];
            if (!slot || f.residual < slot->residual) slot = f;
        } else if (f.kind == RelationKind::pair_symmetry) {
            auto& m = mirror_of[std::size_t(f.other)];
            if (!m || f.residual < m->residual) m = f;
        } else {
            self[std::size_t(f.part)].push_back(f);
        }
    }

    // Order parts so every reference points backward; break joint cycles.
    std::vector<int> order;
    for (;;) {
        std::vector<std::set<int>> deps(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (const auto& j : joint[i])
                if (j) deps[i].insert(j->other);
            if (mirror_of[i]) deps[i].insert(mirror_of[i]->part);
        }
        const std::vector<int> cycle = find_cycle(deps);
        if (cycle.empty()) {
            std::vector<int> indegree(n, 0);
            for (std::size_t i = 0; i < n; ++i) indegree[i] = int(deps[i].size());
            std::set<int> ready;
            for (std::size_t i = 0; i < n; ++i)
                if (!indegree[i]) ready.insert(int(i));
            while (!ready.empty()) {
                const int v = *ready.begin();
                ready.erase(ready.begin());
                order.push_back(v);
                for (std::size_t i = 0; i < n; ++i)
                    if (deps[i].count(v) && --indegree[i] == 0) ready.insert(int(i));
            }
            break;
        }
        std::optional<RelationFinding>* weakest = nullptr;
        for (std::size_t k = 0; k < cycle.size(); ++k) {
            const int from = cycle[k], to = cycle[(k + 1) % cycle.size()];
            for (auto& j : joint[std::size_t(from)])
                if (j && j->other == to && (!weakest || j->residual > (*weakest)->residual)) weakest = &j;
        }
        if (!weakest) {
            std::string text;
            for (int v : cycle) text += names[std::size_t(v)] + " -> ";
            throw TemplateError("cyclic constraints: " + text + names[std::size_t(cycle.front())]);
        }
        weakest->reset();
    }

    // Values the emitted template produces, filled in emission order.
    std::vector<KeyPoints> keys(n);
    std::vector<std::array<double, 8>> emitted(n);
    std::vector<RelationFinding> applied;
    auto slot_name = [&](std::size_t part, std::size_t slot) { return names[part] + "." + std::string(kSlotNames[slot]); };
    auto key_text = [&](std::size_t part, int key, std::size_t axis, bool negate) {
        return std::string(negate ? "-" : "") + names[part] + ".k" + std::to_string(key) + "." + axis_name(axis);
    };

    json doc{{"category", options.category}, {"volume_threshold", kDefaultVolumeThreshold}, {"cuboids", json::array()}};
    for (int idx : order) {
        const std::size_t i = std::size_t(idx);
        const Stick& s = sticks[i];
        const std::array<double, 8> observed{s.p1.x, s.p1.y, s.p1.z, s.p2.x, s.p2.y, s.p2.z, s.w, s.l};
        std::array<SlotPlan, 8> plan{};
        std::array<double, 8>& value = emitted[i];

        for (int control = 0; control < 2; ++control) {
            const auto& j = joint[i][std::size_t(control)];
            if (!j) continue;
            applied.push_back(*j);
            for (std::size_t a = 0; a < 3; ++a) {
                const std::size_t slot = std::size_t(control) * 3 + a;
                const double k = keys[std::size_t(j->other)][std::size_t(j->key)][a];
                plan[slot].source = SlotSource::joint;
                plan[slot].code = {{"relate", key_text(std::size_t(j->other), j->key, a, false)}};
                const double offset = observed[slot] - k;
                if (offset != 0.0) plan[slot].code["const"] = offset;
                value[slot] = offset + k;
            }
        }

        if (const auto& m = mirror_of[i]) {
            const std::size_t src = std::size_t(m->part);
            const std::size_t flip = mirror_axis(m->plane);
            const Vec3 a1 = mirror(Vec3{emitted[src][0], emitted[src][1], emitted[src][2]}, m->plane);
            const Vec3 a2 = mirror(Vec3{emitted[src][3], emitted[src][4], emitted[src][5]}, m->plane);
            const bool swap = distance(a1, s.p2) + distance(a2, s.p1) < distance(a1, s.p1) + distance(a2, s.p2);
            bool used = false;
            for (int control = 0; control < 2; ++control) {
                const int key = (control == 0) != swap ? kKeyPointP1 : kKeyPointP2;
                const Vec3 image = (control == 0) != swap ? a1 : a2;
                for (std::size_t a = 0; a < 3; ++a) {
                    const std::size_t slot = std::size_t(control) * 3 + a;
                    if (plan[slot].source != SlotSource::free) continue;
                    plan[slot].source = SlotSource::symmetry;
                    plan[slot].code = {{"relate", key_text(src, key, a, a == flip)}};
                    value[slot] = image[a];
                    used = true;
                }
            }
            const bool cross = std::abs(emitted[src][6] - s.l) + std::abs(emitted[src][7] - s.w) <
                               std::abs(emitted[src][6] - s.w) + std::abs(emitted[src][7] - s.l);
            for (std::size_t slot = 6; slot < 8; ++slot) {
                const std::size_t from = cross ? 13 - slot : slot;
                plan[slot].source = SlotSource::symmetry;
                plan[slot].code = {{"copy", slot_name(src, from)}};
                value[slot] = emitted[src][from];
                used = true;
            }
            if (used) applied.push_back(*m);
        }

        for (const auto& f : self[i]) {
            const std::size_t a = mirror_axis(f.plane);
            const std::size_t first = a, second = 3 + a;
            if (plan[first].source != SlotSource::free || plan[second].source != SlotSource::free) continue;
            const bool across = std::abs(s.p2[a] - s.p1[a]) >= kSymmetryThreshold;
            if (across && std::abs(s.p1[a] + s.p2[a]) < kSymmetryThreshold) {
                plan[second] = {SlotSource::self, {{"copy", "-" + slot_name(i, first)}}};
            } else if (!across && std::abs(s.p1[a]) < kSymmetryThreshold && std::abs(s.p2[a]) < kSymmetryThreshold) {
                plan[first] = {SlotSource::self, {{"const", 0.0}}};
                plan[second] = {SlotSource::self, {{"copy", slot_name(i, first)}}};
                value[first] = value[second] = 0.0;
            } else {
                continue;
            }
            applied.push_back(f);
        }

        for (std::size_t slot = 0; slot < 8; ++slot) {
            if (plan[slot].source != SlotSource::free) continue;
            const double v = observed[slot];
            const double lo = slot >= 6 ? std::max(0.0, v - delta) : v - delta;
            plan[slot].code = {{"range", {lo, v, v + delta}}};
            value[slot] = lo + (v + delta - lo) * ((v - lo) / (v + delta - lo));
        }
        // Slots copying the negated first point depend on its final value.
        for (std::size_t slot = 3; slot < 6; ++slot)
            if (plan[slot].source == SlotSource::self && plan[slot].code.contains("copy") &&
                plan[slot].code["copy"].get<std::string>().front() == '-')
                value[slot] = -value[slot - 3];

        json cub{{"name", names[i]}, {"slots", json::object()}};
        for (std::size_t slot = 0; slot < 8; ++slot) cub["slots"][std::string(kSlotNames[slot])] = plan[slot].code;
        doc["cuboids"].push_back(cub);

        const Stick made{{value[0], value[1], value[2]}, {value[3], value[4], value[5]}, value[6], value[7]};
        keys[i] = key_points(frame_from_stick(made));
    }

    AutoTemplate out;
    out.config = template_from_json(doc);
    out.document = std::move(doc);
    out.applied = std::move(applied);
    return out;
}

AutoTemplate auto_template(const std::vector<AnnotatedPart>& parts, const AutoTemplateOptions& options)
{
    std::vector<Stick> sticks;
    for (const auto& p : parts) sticks.push_back(stickify(p));
    std::vector<RelationFinding> findings = detect_symmetries(parts);
    const auto joints = detect_joints(sticks);
    findings.insert(findings.end(), joints.begin(), joints.end());
    return emit_template(parts, findings, options);
}

}  // namespace stickform
