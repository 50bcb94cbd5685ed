// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#include "stickform/mesh.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "stickform/error.h"
#include "stickform/fit.h"

namespace stickform {

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) { return 0.5 * norm(cross(b - a, c - a)); }

double surface_area(const Mesh& m)
{
    double total = 0.0;
    for (const auto& t : m.triangles) total += triangle_area(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]);
    return total;
}

double signed_volume(const Mesh& m)
{
    double total = 0.0;
    for (const auto& t : m.triangles)
        total += dot(m.vertices[t[0]], cross(m.vertices[t[1]], m.vertices[t[2]]));
    return total / 6.0;
}

void remove_degenerate(Mesh& m)
{
    std::vector<std::array<std::uint32_t, 3>> kept;
    kept.reserve(m.triangles.size());
    for (const auto& t : m.triangles) {
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) continue;
        if (triangle_area(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]) <= 0.0) continue;
        kept.push_back(t);
    }
    std::vector<std::uint32_t> remap(m.vertices.size(), UINT32_MAX);
    std::vector<Vec3> verts;
    for (auto& t : kept)
        for (auto& v : t) {
            if (remap[v] == UINT32_MAX) {
                remap[v] = std::uint32_t(verts.size());
                verts.push_back(m.vertices[v]);
            }
            v = remap[v];
        }
    m.vertices = std::move(verts);
    m.triangles = std::move(kept);
}

void write_obj(std::ostream& out, const Mesh& m)
{
    out << "# stickform mesh: " << m.vertices.size() << " vertices, " << m.triangles.size() << " faces\n";
    char buf[32];
    for (const Vec3& v : m.vertices) {
        out << 'v';
        for (double c : {v.x, v.y, v.z}) {
            const auto r = std::to_chars(buf, buf + sizeof buf, c);
            out << ' ' << std::string_view(buf, std::size_t(r.ptr - buf));
        }
        out << '\n';
    }
    for (const auto& t : m.triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

void save_obj(const std::filesystem::path& path, const Mesh& m)
{
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
    write_obj(out, m);
    if (!out) throw ValidationError("failed writing " + path.string());
}

namespace {

double parse_number(std::string_view tok, std::size_t line)
{
    double v = 0.0;
    const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (r.ec != std::errc() || r.ptr != tok.data() + tok.size())
        throw ValidationError("obj line " + std::to_string(line) + ": bad number '" + std::string(tok) + "'");
    return v;
}

}  // namespace

Mesh read_obj(std::istream& in)
{
    Mesh m;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag)) continue;
        if (tag == "v") {
            std::string a, b, c;
            if (!(ss >> a >> b >> c)) throw ValidationError("obj line " + std::to_string(lineno) + ": short vertex");
            m.vertices.push_back({parse_number(a, lineno), parse_number(b, lineno), parse_number(c, lineno)});
        } else if (tag == "f") {
            std::vector<std::uint32_t> idx;
            std::string tok;
            while (ss >> tok) {
                const std::string head = tok.substr(0, tok.find('/'));
                long v = 0;
                const auto r = std::from_chars(head.data(), head.data() + head.size(), v);
                if (r.ec != std::errc() || v == 0)
                    throw ValidationError("obj line " + std::to_string(lineno) + ": bad index '" + tok + "'");
                if (v < 0) v += long(m.vertices.size()) + 1;
                if (v < 1 || std::size_t(v) > m.vertices.size())
                    throw ValidationError("obj line " + std::to_string(lineno) + ": index out of range");
                idx.push_back(std::uint32_t(v - 1));
            }
            if (idx.size() < 3) throw ValidationError("obj line " + std::to_string(lineno) + ": face needs 3 indices");
            for (std::size_t k = 1; k + 1 < idx.size(); ++k) m.triangles.push_back({idx[0], idx[k], idx[k + 1]});
        }
    }
    return m;
}

Mesh load_obj(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    return read_obj(in);
}

PointCloud sample_mesh_surface(const Mesh& m, std::size_t n, std::uint64_t seed)
{
    if (m.triangles.empty()) throw ValidationError("cannot sample an empty mesh");
    std::vector<double> cumulative;
    cumulative.reserve(m.triangles.size());
    double total = 0.0;
    for (const auto& t : m.triangles) {
        total += triangle_area(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]);
        cumulative.push_back(total);
    }
    Rng rng(mix_seed(seed, 0));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PointCloud out;
    out.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = u(rng) * total;
        std::size_t k = std::size_t(std::upper_bound(cumulative.begin(), cumulative.end(), r) - cumulative.begin());
        k = std::min(k, m.triangles.size() - 1);
        double s = u(rng), t = u(rng);
        if (s + t > 1.0) {
            s = 1.0 - s;
            t = 1.0 - t;
        }
        const auto& tri = m.triangles[k];
        const Vec3 a = m.vertices[tri[0]];
        out.points.push_back(a + s * (m.vertices[tri[1]] - a) + t * (m.vertices[tri[2]] - a));
    }
    return out;
}

}  // namespace stickform
