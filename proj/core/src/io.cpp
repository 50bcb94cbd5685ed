// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#include "stickform/io.h"

#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "stickform/error.h"

namespace stickform {

using nlohmann::json;

namespace {

template <class U>
U little(U v)
{
    if constexpr (std::endian::native == std::endian::big) {
        U out = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i) out = U((out << 8) | ((v >> (8 * i)) & 0xff));
        return out;
    }
    return v;
}

bool parse_double(std::string_view tok, double& out)
{
    const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return r.ec == std::errc() && r.ptr == tok.data() + tok.size();
}

}  // namespace

PointCloud read_xyz(std::istream& in)
{
    PointCloud p;
    std::string line;
    std::size_t lineno = 0;
    bool any_label = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::vector<std::string> tok;
        for (std::string t; ss >> t;) tok.push_back(t);
        if (tok.empty() || tok[0][0] == '#') continue;
        const std::string where = "xyz line " + std::to_string(lineno);
        if (tok.size() != 3 && tok.size() != 4) throw ValidationError(where + ": expected 'x y z' or 'x y z label'");
        Vec3 v;
        for (std::size_t a = 0; a < 3; ++a)
            if (!parse_double(tok[a], v[a]) || !std::isfinite(v[a]))
                throw ValidationError(where + ": bad coordinate '" + tok[a] + "'");
        if (tok.size() == 4) {
            int label = 0;
            const auto r = std::from_chars(tok[3].data(), tok[3].data() + tok[3].size(), label);
            if (r.ec != std::errc() || r.ptr != tok[3].data() + tok[3].size())
                throw ValidationError(where + ": bad label '" + tok[3] + "'");
            if (!any_label && !p.points.empty()) throw ValidationError(where + ": labels on some lines only");
            any_label = true;
            p.labels.push_back(label);
        } else if (any_label) {
            throw ValidationError(where + ": labels on some lines only");
        }
        p.points.push_back(v);
    }
    return p;
}

void write_xyz(std::ostream& out, const PointCloud& p)
{
    char buf[32];
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t a = 0; a < 3; ++a) {
            const auto r = std::to_chars(buf, buf + sizeof buf, p.points[i][a]);
            if (a) out << ' ';
            out << std::string_view(buf, std::size_t(r.ptr - buf));
        }
        if (p.labeled()) out << ' ' << p.labels[i];
        out << '\n';
    }
}

PointCloud read_binary_cloud(std::istream& in)
{
    std::uint64_t count = 0;
    if (!in.read(reinterpret_cast<char*>(&count), sizeof count)) throw ValidationError("binary cloud: missing count");
    count = little(count);
    if (count > (std::uint64_t(1) << 32)) throw ValidationError("binary cloud: implausible count");
    PointCloud p;
    p.points.reserve(std::size_t(count));
    for (std::uint64_t i = 0; i < count; ++i) {
        Vec3 v;
        for (std::size_t a = 0; a < 3; ++a) {
            std::uint32_t bits = 0;
            if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits))
                throw ValidationError("binary cloud: truncated after " + std::to_string(i) + " points");
            v[a] = double(std::bit_cast<float>(little(bits)));
        }
        p.points.push_back(v);
    }
    return p;
}

void write_binary_cloud(std::ostream& out, const PointCloud& p)
{
    const std::uint64_t count = little(std::uint64_t(p.size()));
    out.write(reinterpret_cast<const char*>(&count), sizeof count);
    for (const Vec3& v : p.points)
        for (std::size_t a = 0; a < 3; ++a) {
            const std::uint32_t bits = little(std::bit_cast<std::uint32_t>(float(v[a])));
            out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
        }
}

PointCloud load_point_cloud(const std::filesystem::path& path)
{
    const bool binary = path.extension() == ".bin";
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw ValidationError("cannot open " + path.string());
    try {
        return binary ? read_binary_cloud(in) : read_xyz(in);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void save_point_cloud(const std::filesystem::path& path, const PointCloud& p)
{
    const bool binary = path.extension() == ".bin";
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
    binary ? write_binary_cloud(out, p) : write_xyz(out, p);
    if (!out) throw ValidationError("failed writing " + path.string());
}

json params_to_json(const TemplateConfig& t, const ParameterVector& a)
{
    return {{"category", t.category}, {"values", a.values}};
}

ParameterVector params_from_json(const TemplateConfig& t, const json& j)
{
    if (!j.is_object() || !j.contains("values") || !j["values"].is_array())
        throw ValidationError("values: expected a list of numbers");
    if (j.contains("category") && (!j["category"].is_string() || j["category"].get<std::string>() != t.category))
        throw ValidationError("category: does not match template '" + t.category + "'");
    ParameterVector a;
    a.names = t.param_names;
    for (std::size_t i = 0; i < j["values"].size(); ++i) {
        const json& v = j["values"][i];
        if (!v.is_number()) throw ValidationError("values[" + std::to_string(i) + "]: expected a number");
        a.values.push_back(v.get<double>());
    }
    if (a.values.size() != t.n_params())
        throw LengthMismatchError("values: template '" + t.category + "' expects " + std::to_string(t.n_params()) +
                                  " parameters, got " + std::to_string(a.values.size()));
    return a;
}

json details_to_json(const StructureInstance& s, const std::vector<Detail>& details)
{
    if (details.size() != s.size()) throw ValidationError("one detail per cuboid expected");
    json out = json::array();
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s.alive[i]) out.push_back(detail_to_json(s.names[i], details[i]));
    return out;
}

std::vector<Detail> details_from_json(const TemplateConfig& t, const json& j)
{
    const json* list = &j;
    json single;
    if (j.is_object() && j.contains("details")) {
        list = &j["details"];
    } else if (j.is_object()) {
        single = json::array({j});
        list = &single;
    }
    if (!list->is_array()) throw ValidationError("details: expected a list of detail entries");
    std::vector<Detail> out(t.cuboids.size());
    for (const json& entry : *list) {
        auto [name, d] = detail_from_json(entry);
        const int c = t.cuboid_index(name);
        if (c < 0) throw ValidationError("details: unknown cuboid '" + name + "'");
        out[std::size_t(c)] = std::move(d);
    }
    return out;
}

json structure_to_json(const StructureInstance& s)
{
    auto vec = [](const Vec3& v) { return json::array({v.x, v.y, v.z}); };
    json cuboids = json::array();
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Frame& f = s.frames[i];
        const Stick& st = s.sticks[i];
        json keys = json::array();
        for (const Vec3& k : s.keypoints[i]) keys.push_back(vec(k));
        cuboids.push_back({{"name", s.names[i]},
                           {"alive", bool(s.alive[i])},
                           {"stick", {{"p1", vec(st.p1)}, {"p2", vec(st.p2)}, {"w", st.w}, {"l", st.l}}},
                           {"frame", {{"x", vec(f.xb)}, {"y", vec(f.yb)}, {"z", vec(f.zb)}, {"origin", vec(f.ob)}}},
                           {"keypoints", keys}});
    }
    return {{"cuboids", cuboids}};
}

PointCloud cloud_from_json(const json& j)
{
    if (!j.is_array()) throw ValidationError("points: expected a list of [x, y, z]");
    PointCloud p;
    p.points.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        const json& q = j[i];
        if (!q.is_array() || q.size() != 3 || !q[0].is_number() || !q[1].is_number() || !q[2].is_number())
            throw ValidationError("points[" + std::to_string(i) + "]: expected [x, y, z]");
        p.points.push_back({q[0].get<double>(), q[1].get<double>(), q[2].get<double>()});
    }
    return p;
}

json cloud_to_json(const PointCloud& p)
{
    json out = json::array();
    for (const Vec3& v : p.points) out.push_back({v.x, v.y, v.z});
    return out;
}

StepRule step_rule_from_string(const std::string& s)
{
    if (s == "gradient") return StepRule::gradient;
    if (s == "momentum") return StepRule::momentum;
    if (s == "adam") return StepRule::adam;
    throw ValidationError("rule: expected gradient, momentum or adam, got '" + s + "'");
}

FitConfig fit_config_from_json(const json& j, FitConfig base)
{
    if (j.is_null()) return base;
    if (!j.is_object()) throw ValidationError("config: expected an object");
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "iterations") base.iterations = v.get<int>();
            else if (key == "step_size") base.step_size = v.get<double>();
            else if (key == "points") base.points_per_structure = v.get<std::size_t>();
            else if (key == "rule") base.rule = step_rule_from_string(v.get<std::string>());
            else if (key == "momentum") base.momentum = v.get<double>();
            else if (key == "second_moment") base.second_moment = v.get<double>();
            else if (key == "final_step_fraction") base.final_step_fraction = v.get<double>();
            else if (key == "volume_threshold") base.volume_threshold = v.get<double>();
            else if (key == "seed") base.seed = v.get<std::uint64_t>();
            else if (key == "resample") base.resample = v.get<bool>();
            else throw ValidationError("config." + key + ": unknown field");
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    base.validate();
    return base;
}

json fit_report_to_json(const FitReport& r)
{
    return {{"final_values", r.final_params.values},
            {"best_values", r.best_params.values},
            {"best_loss", r.best_loss},
            {"loss_trace", r.loss_trace},
            {"wall_seconds", r.wall_seconds},
            {"cancelled", r.cancelled}};
}

json expansion_to_json(const Expansion& e)
{
    json cuboids = json::array();
    for (std::size_t i = 0; i < e.report.cuboids.size(); ++i) {
        const ExpansionEntry& c = e.report.cuboids[i];
        cuboids.push_back({{"name", e.structure.names[i]}, {"scale", c.scale}, {"points", c.points}});
    }
    json out = structure_to_json(e.structure);
    out["expansion"] = cuboids;
    return out;
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content)
{
    static std::atomic<std::uint64_t> counter{0};
    const auto tag = std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + "." +
                     std::to_string(counter.fetch_add(1));
    std::filesystem::path tmp = path;
    tmp += ".tmp." + tag;
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw ValidationError("failed writing " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw ValidationError("cannot replace " + path.string() + ": " + ec.message());
    }
}

}  // namespace stickform
