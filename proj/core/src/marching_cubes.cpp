// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#include "stickform/marching_cubes.h"

#include <array>
#include <unordered_map>

namespace stickform {

namespace {

// Cell corners are numbered x + 2y + 4z.
struct CellTopology {
    std::array<std::array<int, 2>, 12> edges{};  // lower corner first
    std::array<std::array<int, 4>, 6> faces{};   // counter-clockwise seen from outside
    std::array<std::array<int, 4>, 6> face_edges{};
    int edge_between[8][8]{};
    std::array<unsigned, 12> faces_of_edge{};  // bit mask over the six faces

    CellTopology()
    {
        int e = 0;
        for (int a = 0; a < 8; ++a)
            for (int bit = 1; bit < 8; bit <<= 1)
                if (!(a & bit)) {
                    edges[std::size_t(e)] = {a, a | bit};
                    edge_between[a][a | bit] = edge_between[a | bit][a] = e;
                    ++e;
                }
        auto corner = [](int c) { return Vec3{double(c & 1), double((c >> 1) & 1), double((c >> 2) & 1)}; };
        int f = 0;
        for (int axis = 0; axis < 3; ++axis)
            for (int side = 0; side < 2; ++side) {
                const int bit = 1 << axis, b1 = 1 << ((axis + 1) % 3), b2 = 1 << ((axis + 2) % 3);
                const int base = side ? bit : 0;
                std::array<int, 4> cyc{base, base | b1, base | b1 | b2, base | b2};
                Vec3 normal{};
                normal[std::size_t(axis)] = side ? 1.0 : -1.0;
                const Vec3 turn = cross(corner(cyc[1]) - corner(cyc[0]), corner(cyc[2]) - corner(cyc[1]));
                if (dot(turn, normal) < 0.0) std::swap(cyc[1], cyc[3]);
                faces[std::size_t(f)] = cyc;
                for (int m = 0; m < 4; ++m) {
                    const int e = edge_between[cyc[std::size_t(m)]][cyc[std::size_t((m + 1) % 4)]];
                    face_edges[std::size_t(f)][std::size_t(m)] = e;
                    faces_of_edge[std::size_t(e)] |= 1u << f;
                }
                ++f;
            }
    }
};

const CellTopology& topology()
{
    static const CellTopology t;
    return t;
}

}  // namespace

Mesh marching_cubes(const SdfGrid& g)
{
    const CellTopology& topo = topology();
    const int n = g.resolution;
    Mesh mesh;
    std::unordered_map<std::uint64_t, std::uint32_t> vertex_of_edge;

    auto grid_index = [n](int i, int j, int k) {
        return (std::uint64_t(k) * std::uint64_t(n) + std::uint64_t(j)) * std::uint64_t(n) + std::uint64_t(i);
    };

    for (int k = 0; k + 1 < n; ++k)
        for (int j = 0; j + 1 < n; ++j)
            for (int i = 0; i + 1 < n; ++i) {
                std::array<double, 8> v{};
                int negatives = 0;
                for (int c = 0; c < 8; ++c) {
                    v[std::size_t(c)] = g.at(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
                    negatives += v[std::size_t(c)] < 0.0;
                }
                if (negatives == 0 || negatives == 8) continue;

                // Cell-local edge -> mesh vertex, created on demand.
                std::array<std::int64_t, 12> local{};
                local.fill(-1);
                auto vertex = [&](int e) {
                    if (local[std::size_t(e)] >= 0) return std::uint32_t(local[std::size_t(e)]);
                    const int a = topo.edges[std::size_t(e)][0], b = topo.edges[std::size_t(e)][1];
                    const int axis = (a ^ b) == 1 ? 0 : ((a ^ b) == 2 ? 1 : 2);
                    const int ai = i + (a & 1), aj = j + ((a >> 1) & 1), ak = k + ((a >> 2) & 1);
                    const std::uint64_t key = grid_index(ai, aj, ak) * 3 + std::uint64_t(axis);
                    auto [it, fresh] = vertex_of_edge.try_emplace(key, std::uint32_t(mesh.vertices.size()));
                    if (fresh) {
                        const double va = v[std::size_t(a)], vb = v[std::size_t(b)];
                        const double t = va / (va - vb);
                        const Vec3 pa = g.center(ai, aj, ak);
                        const Vec3 pb = g.center(i + (b & 1), j + ((b >> 1) & 1), k + ((b >> 2) & 1));
                        mesh.vertices.push_back(pa + t * (pb - pa));
                    }
                    local[std::size_t(e)] = it->second;
                    return it->second;
                };

                // Link each entry crossing (outside -> inside, walking a face
                // counter-clockwise) to an exit crossing on the same face.
                std::array<int, 12> next{};
                next.fill(-1);
                for (std::size_t f = 0; f < 6; ++f) {
                    const auto& cyc = topo.faces[f];
                    std::array<int, 4> kind{};  // +1 entry, -1 exit, 0 none
                    int crossings = 0;
                    for (std::size_t m = 0; m < 4; ++m) {
                        const bool in0 = v[std::size_t(cyc[m])] < 0.0, in1 = v[std::size_t(cyc[(m + 1) % 4])] < 0.0;
                        kind[m] = in0 == in1 ? 0 : (in1 ? 1 : -1);
                        crossings += kind[m] != 0;
                    }
                    if (crossings == 0) continue;
                    bool forward = true;
                    if (crossings == 4) {
                        double mean = 0.0;
                        for (int c : cyc) mean += v[std::size_t(c)];
                        forward = mean >= 0.0;  // inside corners stay separate
                    }
                    for (std::size_t m = 0; m < 4; ++m) {
                        if (kind[m] != 1) continue;
                        for (std::size_t step = 1; step < 4; ++step) {
                            const std::size_t o = forward ? (m + step) % 4 : (m + 4 - step) % 4;
                            if (kind[o] == -1) {
                                next[std::size_t(topo.face_edges[f][m])] = topo.face_edges[f][o];
                                break;
                            }
                        }
                    }
                }

                std::array<bool, 12> used{};
                for (int start = 0; start < 12; ++start) {
                    if (next[std::size_t(start)] < 0 || used[std::size_t(start)]) continue;
                    std::vector<int> loop;
                    for (int e = start; e >= 0 && !used[std::size_t(e)]; e = next[std::size_t(e)]) {
                        used[std::size_t(e)] = true;
                        loop.push_back(e);
                    }
                    // A fan diagonal lying in a cell face could coincide with
                    // the neighbor's triangulation; use a center vertex then.
                    bool fan = true;
                    for (std::size_t m = 2; m + 1 < loop.size() && fan; ++m)
                        fan = !(topo.faces_of_edge[std::size_t(loop[0])] & topo.faces_of_edge[std::size_t(loop[m])]);
                    if (fan) {
                        for (std::size_t m = 1; m + 1 < loop.size(); ++m)
                            mesh.triangles.push_back({vertex(loop[0]), vertex(loop[m]), vertex(loop[m + 1])});
                        continue;
                    }
                    Vec3 c{};
                    for (int e : loop) c = c + mesh.vertices[vertex(e)];
                    const auto hub = std::uint32_t(mesh.vertices.size());
                    mesh.vertices.push_back(c / double(loop.size()));
                    for (std::size_t m = 0; m < loop.size(); ++m)
                        mesh.triangles.push_back({hub, vertex(loop[m]), vertex(loop[(m + 1) % loop.size()])});
                }
            }
    remove_degenerate(mesh);
    return mesh;
}

Mesh mesh_structure(const StructureInstance& s, std::span<const Detail> details, const GridOptions& options)
{
    return marching_cubes(build_grid(s, details, options));
}

}  // namespace stickform
