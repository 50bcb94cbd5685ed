// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#include "stickform/template.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

namespace stickform {

using nlohmann::json;

namespace {

std::string slot_label(const std::string& cuboid, std::size_t slot)
{
    return cuboid + "." + std::string(kSlotNames[slot]);
}

bool is_identifier(std::string_view s)
{
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    });
}

Axis parse_axis(std::string_view s, const std::string& where)
{
    if (s == "x") return Axis::x;
    if (s == "y") return Axis::y;
    if (s == "z") return Axis::z;
    throw TemplateError(where + ": axis must be x, y or z, got '" + std::string(s) + "'");
}

char axis_char(Axis a) { return "xyz"[int(a)]; }

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(s.substr(start));
            return parts;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

int strip_sign(std::string_view& s)
{
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        const int sign = s.front() == '-' ? -1 : 1;
        s.remove_prefix(1);
        return sign;
    }
    return 1;
}

/// Resolves names against the cuboids parsed so far.
class Resolver {
  public:
    Resolver(const std::map<std::string, int, std::less<>>& names, int current, std::string current_name,
             std::string where)
        : names_(names), current_(current), current_name_(std::move(current_name)), where_(std::move(where))
    {
    }

    int cuboid(std::string_view name) const
    {
        if (name == current_name_) {
            throw TemplateError(where_ + ": cuboid '" + current_name_ +
                                "' cannot reference its own key points (forward reference)");
        }
        const auto it = names_.find(name);
        if (it == names_.end()) {
            throw TemplateError(where_ + ": unknown cuboid '" + std::string(name) + "'");
        }
        if (it->second >= current_) {
            throw TemplateError(where_ + ": forward reference to cuboid '" + std::string(name) +
                                "' (references must point to earlier cuboids)");
        }
        return it->second;
    }

    /// "NAME.kINT"
    KeyRef key(std::string_view text) const
    {
        const auto parts = split(text, '.');
        if (parts.size() != 2) throw TemplateError(where_ + ": expected NAME.kINT, got '" + std::string(text) + "'");
        return {cuboid(parts[0]), key_index(parts[1])};
    }

    int key_index(std::string_view k) const
    {
        if (k.size() < 2 || k.front() != 'k' ||
            !std::all_of(k.begin() + 1, k.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
            throw TemplateError(where_ + ": malformed key point '" + std::string(k) + "'");
        }
        if (k.size() > 3) throw TemplateError(where_ + ": key point index out of range in '" + std::string(k) + "'");
        const int idx = std::stoi(std::string(k.substr(1)));
        if (idx < 0 || idx >= kKeyPointCount) {
            throw TemplateError(where_ + ": key point index " + std::to_string(idx) + " outside 0..25");
        }
        return idx;
    }

    const std::string& where() const { return where_; }

  private:
    const std::map<std::string, int, std::less<>>& names_;
    int current_;
    std::string current_name_;
    std::string where_;
};

double number(const json& v, const std::string& where)
{
    if (!v.is_number()) throw TemplateError(where + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw TemplateError(where + ": non-finite number");
    return d;
}

SlotSpec parse_slot(const json& code, const Resolver& res, int cuboid, int slot,
                    std::vector<std::string>& param_names, const std::string& cuboid_name)
{
    const std::string& where = res.where();
    SlotSpec spec;
    if (code.is_number()) {
        spec.constant = number(code, where);
        return spec;
    }
    if (!code.is_object()) throw TemplateError(where + ": slot code must be an object");
    for (const auto& [key, _] : code.items()) {
        if (key != "const" && key != "range" && key != "relate" && key != "line" && key != "copy")
            throw TemplateError(where + ": unknown code key '" + key + "'");
    }

    if (code.contains("const")) spec.constant = number(code["const"], where + ".const");

    if (code.contains("range")) {
        const json& r = code["range"];
        if (!r.is_array() || r.size() != 3)
            throw TemplateError(where + ": malformed range, expected [min, default, max]");
        RangeTerm term{number(r[0], where), number(r[1], where), number(r[2], where), -1};
        if (!(term.min < term.max) || term.def < term.min || term.def > term.max) {
            throw TemplateError(where + ": malformed range, need min < max and min <= default <= max");
        }
        spec.range = term;
    }

    std::vector<std::string> relations;
    if (code.contains("relate")) {
        const json& r = code["relate"];
        if (r.is_string()) {
            relations.push_back(r.get<std::string>());
        } else if (r.is_array()) {
            for (const json& e : r) {
                if (!e.is_string()) throw TemplateError(where + ": relate entries must be strings");
                relations.push_back(e.get<std::string>());
            }
        } else {
            throw TemplateError(where + ": relate must be a string or a list of strings");
        }
    }

    std::optional<std::pair<int, Axis>> line_relation;
    for (const std::string& text : relations) {
        std::string_view body = text;
        const int sign = strip_sign(body);
        const auto parts = split(body, '.');
        if (parts.size() == 2 && parts[0] == "line") {
            if (line_relation) throw TemplateError(where + ": more than one line relation");
            line_relation = std::make_pair(sign, parse_axis(parts[1], where));
            continue;
        }
        if (parts.size() != 3) {
            throw TemplateError(where + ": relate must be '±NAME.kINT.AXIS' or 'line.AXIS', got '" + text + "'");
        }
        if (spec.relate) throw TemplateError(where + ": more than one key point relation");
        PointTerm term;
        term.sign = sign;
        term.ref = {res.cuboid(parts[0]), res.key_index(parts[1])};
        term.axis = parse_axis(parts[2], where);
        spec.relate = term;
    }

    if (code.contains("line") != line_relation.has_value()) {
        throw TemplateError(where + ": a line needs both the 'line' points and a 'line.AXIS' relation");
    }
    if (line_relation) {
        const json& ln = code["line"];
        if (!ln.is_object() || !ln.contains("p1") || !ln.contains("p2") || !ln["p1"].is_string() ||
            !ln["p2"].is_string() || ln.size() != 2) {
            throw TemplateError(where + ": line must be {\"p1\": \"NAME.kINT\", \"p2\": \"NAME.kINT\"}");
        }
        LineTerm term;
        term.sign = line_relation->first;
        term.axis = line_relation->second;
        term.from = res.key(ln["p1"].get<std::string>());
        term.to = res.key(ln["p2"].get<std::string>());
        spec.line = term;
    }

    if (spec.range && spec.line) {
        throw TemplateError(where + ": range and line parameters cannot occur in the same slot");
    }

    if (code.contains("copy")) {
        if (!code["copy"].is_string()) throw TemplateError(where + ": copy must be 'NAME.SLOT'");
        std::string_view body = code["copy"].get_ref<const std::string&>();
        CopyTerm term;
        term.sign = strip_sign(body);
        const auto parts = split(body, '.');
        if (parts.size() != 2) throw TemplateError(where + ": copy must be 'NAME.SLOT'");
        const auto slot_it = std::find(kSlotNames.begin(), kSlotNames.end(), parts[1]);
        if (slot_it == kSlotNames.end()) {
            throw TemplateError(where + ": unknown slot '" + std::string(parts[1]) + "' in copy");
        }
        term.slot = int(slot_it - kSlotNames.begin());
        if (parts[0] == cuboid_name) {
            if (term.slot >= slot) throw TemplateError(where + ": copy must reference an earlier slot");
            term.cuboid = cuboid;
        } else {
            term.cuboid = res.cuboid(parts[0]);
        }
        spec.copy = term;
    }

    if (spec.range) {
        spec.range->param = int(param_names.size());
        param_names.push_back(slot_label(cuboid_name, std::size_t(slot)));
    } else if (spec.line) {
        spec.line->param = int(param_names.size());
        param_names.push_back(slot_label(cuboid_name, std::size_t(slot)));
    }
    return spec;
}

std::string key_text(const TemplateConfig& t, const KeyRef& k)
{
    return t.cuboids[std::size_t(k.cuboid)].name + ".k" + std::to_string(k.key);
}

}  // namespace

namespace detail {

void throw_degenerate(const TemplateConfig& t, std::size_t cuboid)
{
    throw DegenerateStickError("degenerate stick for cuboid '" + t.cuboids[cuboid].name +
                               "': control points coincide");
}

void throw_length(const TemplateConfig& t, std::size_t got)
{
    throw LengthMismatchError("template '" + t.category + "' expects " + std::to_string(t.n_params()) +
                              " parameters, got " + std::to_string(got));
}

}  // namespace detail

int TemplateConfig::cuboid_index(std::string_view name) const
{
    for (std::size_t i = 0; i < cuboids.size(); ++i)
        if (cuboids[i].name == name) return int(i);
    return -1;
}

TemplateConfig parse_template(std::string_view document)
{
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw TemplateError(std::string("template is not valid JSON: ") + e.what());
    }
    return template_from_json(doc);
}

TemplateConfig template_from_json(const json& doc)
{
    if (!doc.is_object()) throw TemplateError("template document must be an object");
    if (!doc.contains("category") || !doc["category"].is_string())
        throw TemplateError("template needs a string 'category'");
    if (!doc.contains("cuboids") || !doc["cuboids"].is_array())
        throw TemplateError("template needs a 'cuboids' list");

    TemplateConfig t;
    t.category = doc["category"].get<std::string>();
    if (doc.contains("volume_threshold")) {
        t.volume_threshold = number(doc["volume_threshold"], "volume_threshold");
        if (t.volume_threshold < 0.0) throw TemplateError("volume_threshold must be non-negative");
    }

    std::map<std::string, int, std::less<>> names;
    int index = 0;
    for (const json& c : doc["cuboids"]) {
        if (!c.is_object() || !c.contains("name") || !c["name"].is_string())
            throw TemplateError("cuboid #" + std::to_string(index) + " needs a string 'name'");
        CuboidDef def;
        def.name = c["name"].get<std::string>();
        if (!is_identifier(def.name) || def.name == "line")
            throw TemplateError("invalid cuboid name '" + def.name + "'");
        if (names.count(def.name)) throw TemplateError("duplicate cuboid name '" + def.name + "'");
        if (!c.contains("slots") || !c["slots"].is_object())
            throw TemplateError("cuboid '" + def.name + "' needs a 'slots' object");
        const json& slots = c["slots"];
        for (const auto& [key, _] : slots.items()) {
            if (std::find(kSlotNames.begin(), kSlotNames.end(), key) == kSlotNames.end())
                throw TemplateError("cuboid '" + def.name + "': unknown slot '" + key + "'");
        }
        for (std::size_t s = 0; s < 8; ++s) {
            const std::string key(kSlotNames[s]);
            const std::string where = slot_label(def.name, s);
            if (!slots.contains(key)) throw TemplateError(where + ": missing slot");
            Resolver res(names, index, def.name, where);
            def.slots[s] = parse_slot(slots[key], res, index, int(s), t.param_names, def.name);
        }
        names.emplace(def.name, index);
        t.cuboids.push_back(std::move(def));
        ++index;
    }
    return t;
}

json template_to_json(const TemplateConfig& t)
{
    json doc;
    doc["category"] = t.category;
    doc["volume_threshold"] = t.volume_threshold;
    json cuboids = json::array();
    for (const CuboidDef& def : t.cuboids) {
        json slots = json::object();
        for (std::size_t s = 0; s < 8; ++s) {
            const SlotSpec& spec = def.slots[s];
            json code = json::object();
            const bool bare = !spec.range && !spec.relate && !spec.line && !spec.copy;
            if (spec.constant != 0.0 || bare) code["const"] = spec.constant;
            if (spec.range) code["range"] = {spec.range->min, spec.range->def, spec.range->max};
            std::vector<std::string> rel;
            if (spec.relate) {
                const auto& p = *spec.relate;
                rel.push_back(std::string(p.sign < 0 ? "-" : "") + key_text(t, p.ref) + "." + axis_char(p.axis));
            }
            if (spec.line) {
                const auto& ln = *spec.line;
                rel.push_back(std::string(ln.sign < 0 ? "-" : "") + "line." + axis_char(ln.axis));
                code["line"] = {{"p1", key_text(t, ln.from)}, {"p2", key_text(t, ln.to)}};
            }
            if (rel.size() == 1) code["relate"] = rel.front();
            if (rel.size() > 1) code["relate"] = rel;
            if (spec.copy) {
                const auto& c = *spec.copy;
                code["copy"] = std::string(c.sign < 0 ? "-" : "") + t.cuboids[std::size_t(c.cuboid)].name + "." +
                               std::string(kSlotNames[std::size_t(c.slot)]);
            }
            slots[std::string(kSlotNames[s])] = code;
        }
        cuboids.push_back({{"name", def.name}, {"slots", slots}});
    }
    doc["cuboids"] = cuboids;
    return doc;
}

ParameterVector default_params(const TemplateConfig& t)
{
    ParameterVector a;
    a.values.assign(t.n_params(), 0.5);
    a.names = t.param_names;
    for (const CuboidDef& def : t.cuboids)
        for (const SlotSpec& spec : def.slots)
            if (spec.range)
                a.values[std::size_t(spec.range->param)] =
                    (spec.range->def - spec.range->min) / (spec.range->max - spec.range->min);
    return a;
}

ParameterVector checked_params(const TemplateConfig& t, std::span<const double> values)
{
    if (values.size() != t.n_params()) detail::throw_length(t, values.size());
    ParameterVector a;
    a.names = t.param_names;
    a.values.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]))
            throw ValidationError("parameter " + t.param_names[i] + " is not finite");
        a.values.push_back(std::clamp(values[i], 0.0, 1.0));
    }
    return a;
}

StructureInstance evaluate(const TemplateConfig& t, const ParameterVector& a)
{
    const ParameterVector clamped = checked_params(t, a.values);
    const auto ev = evaluate_generic<double>(t, clamped.values);
    StructureInstance s;
    for (std::size_t i = 0; i < t.cuboids.size(); ++i) {
        const auto& b = ev.slots[i];
        s.names.push_back(t.cuboids[i].name);
        s.sticks.push_back(Stick{{b[0], b[1], b[2]}, {b[3], b[4], b[5]}, b[6], b[7]});
        s.frames.push_back(ev.frames[i]);
        s.keypoints.push_back(ev.keypoints[i]);
        s.alive.push_back(volume(ev.frames[i]) >= t.volume_threshold);
    }
    return s;
}

std::vector<std::array<double, 8>> slot_values(const TemplateConfig& t, const ParameterVector& a)
{
    const ParameterVector clamped = checked_params(t, a.values);
    return evaluate_generic<double>(t, clamped.values).slots;
}

std::vector<int> alive_indices(const StructureInstance& s)
{
    std::vector<int> out;
    for (std::size_t i = 0; i < s.alive.size(); ++i)
        if (s.alive[i]) out.push_back(int(i));
    return out;
}

StructureInstance structure_from_sticks(std::vector<std::string> names, std::vector<Stick> sticks,
                                        double volume_threshold)
{
    if (names.size() != sticks.size()) throw ValidationError("names and sticks differ in length");
    StructureInstance s;
    s.names = std::move(names);
    s.sticks = std::move(sticks);
    for (std::size_t i = 0; i < s.sticks.size(); ++i) {
        Frame f;
        try {
            f = frame_from_stick(s.sticks[i]);
        } catch (const DegenerateStickError&) {
            throw DegenerateStickError("degenerate stick for cuboid '" + s.names[i] + "'");
        }
        s.frames.push_back(f);
        s.keypoints.push_back(key_points(f));
        s.alive.push_back(volume(f) >= volume_threshold);
    }
    return s;
}

}  // namespace stickform
