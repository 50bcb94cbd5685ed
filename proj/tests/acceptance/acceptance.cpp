// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

// Prints one PASS/FAIL line per acceptance criterion and exits non-zero if
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "common/annotations.h"
#include "common/generators.h"
#include "common/mesh_checks.h"
#include "common/oracles.h"
#include "common/polygons.h"
#include "common/service_harness.h"
#include "common/test_util.h"
#include "stickform/alpha_shape.h"
#include "stickform/auto_template.h"
#include "stickform/chamfer.h"
#include "stickform/fit.h"
#include "stickform/io.h"
#include "stickform/marching_cubes.h"
#include "stickform/metrics.h"
#include "stickform/raster.h"
#include "stickform/sdf.h"

namespace stickform {
namespace {

using nlohmann::json;

struct Outcome {
    bool pass = true;
    std::string detail;
};

/// Collects the first few failure messages of a criterion.
class Verdict {
  public:
    void require(bool ok, const std::string& what)
    {
        if (ok) return;
        ++failures_;
        if (failures_ <= 3) {
            if (!message_.empty()) message_ += "; ";
            message_ += what;
        }
    }
    Outcome outcome(const std::string& summary) const
    {
        if (failures_ == 0) return {true, summary};
        return {false, std::to_string(failures_) + " failure(s): " + message_ + " [" + summary + "]"};
    }

  private:
    int failures_ = 0;
    std::string message_;
};

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

TemplateConfig demo_template() { return parse_template(testing::read_file(testing::demo_template_path())); }

// ---------------------------------------------------------------------------

bool frame_ok(const Stick& s, const Frame& f, double tol)
{
    return std::abs(norm(f.xb) - s.w) <= tol && std::abs(norm(f.yb) - s.l) <= tol &&
           std::abs(norm(f.zb) - distance(s.p1, s.p2)) <= tol && std::abs(dot(f.xb, f.yb)) <= tol &&
           std::abs(dot(f.xb, f.zb)) <= tol && std::abs(dot(f.yb, f.zb)) <= tol &&
           distance(f.apply({0.5, 0.5, 0.0}), s.p1) <= tol && distance(f.apply({0.5, 0.5, 1.0}), s.p2) <= tol;
}

Outcome frame_math()
{
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    std::mt19937_64 rng(7);
    int bad = 0;
    for (int i = 0; i < 10000; ++i) {
        const Stick s = testing::random_stick(rng);
        bad += !frame_ok(s, frame_from_stick(s), 1e-9);
    }
    v.require(bad == 0, std::to_string(bad) + " random sticks violate an invariant");

    for (double len : {0.3, 1.0, 7.5}) {
        const Stick up{{0.1, 0.2, 0.3}, {0.1, 0.2, 0.3 + len}, 0.4, 0.2};
        const Stick down{{0.1, 0.2, 0.3}, {0.1, 0.2, 0.3 - len}, 0.4, 0.2};
        const Frame fu = frame_from_stick(up), fd = frame_from_stick(down);
        v.require(frame_ok(up, fu, 1e-12), "parallel stick");
        v.require(frame_ok(down, fd, 1e-12), "antiparallel stick");
        v.require(distance(fu.xb, Vec3{0.4, 0, 0}) <= 1e-15, "parallel stick is not the identity rotation");
    }
    const double secs = seconds_since(t0);
    v.require(secs < 5.0, "runtime " + fmt("%.2f s", secs) + " >= 5 s");
    return v.outcome("10000 sticks + degenerate directions, " + fmt("%.2f s", secs));
}

// ---------------------------------------------------------------------------

TemplateConfig probe_template(const json& code)
{
    json doc = {{"category", "probe"}, {"cuboids", json::array()}};
    int offset = 0;
    for (const char* name : {"B", "C", "D", "E"}) {
        doc["cuboids"].push_back({{"name", name},
                                  {"slots",
                                   {{"x1", offset}, {"y1", 0}, {"z1", 0}, {"x2", offset}, {"y2", 0}, {"z2", 1},
                                    {"w", 1}, {"l", 1}}}});
        ++offset;
    }
    doc["cuboids"].push_back({{"name", "probe"},
                              {"slots",
                               {{"x1", code}, {"y1", 0}, {"z1", 0}, {"x2", 0}, {"y2", 0}, {"z2", 5}, {"w", 1},
                                {"l", 1}}}});
    return template_from_json(doc);
}

struct CodeRow {
    const char* code;
    double c, r;
    int s1;
    const char* j1;
    int k1;
    int e1;
    int s2;
    const char* j2;
    int k2;
    const char* j3;
    int k3;
    int e2;
    int n_para;
};

Outcome dsl_golden()
{
    // Expected (c, r, s1, j1, k1, e1, s2, j2, k2, j3, k3, e2, N_para) per code.
    const CodeRow rows[] = {
        {R"({"const": 0.5})", 0.5, 0, 0, "", -1, -1, 0, "", -1, "", -1, -1, 0},
        {R"({"range": [-1, 0, 1]})", -1, 2, 0, "", -1, -1, 0, "", -1, "", -1, -1, 1},
        {R"({"relate": "-C.k4.x"})", 0, 0, -1, "C", 4, 0, 0, "", -1, "", -1, -1, 0},
        {R"({"range": [-1, 0, 1], "const": 0.5})", -0.5, 2, 0, "", -1, -1, 0, "", -1, "", -1, -1, 1},
        {R"({"range": [-1, 0, 1], "relate": "B.k9.y"})", -1, 2, 1, "B", 9, 1, 0, "", -1, "", -1, -1, 1},
        {R"({"line": {"p1": "D.k2", "p2": "E.k6"}, "relate": "line.z"})", 0, 0, 0, "", -1, -1, 1, "D", 2, "E", 6, 2,
         1},
    };
    Verdict v;
    for (const CodeRow& row : rows) {
        const TemplateConfig t = probe_template(json::parse(row.code));
        const SlotSpec& s = t.cuboids.back().slots[0];
        const std::string tag = row.code;
        v.require(s.c() == row.c, tag + ": c");
        v.require(s.r() == row.r, tag + ": r");
        v.require(s.s1() == row.s1, tag + ": s1");
        v.require(s.s2() == row.s2, tag + ": s2");
        v.require(s.parameter_count() == row.n_para && int(t.n_params()) == row.n_para, tag + ": N_para");
        if (row.s1 != 0) {
            v.require(s.relate && s.relate->ref.cuboid == t.cuboid_index(row.j1) && s.relate->ref.key == row.k1 &&
                          int(s.relate->axis) == row.e1,
                      tag + ": key point reference");
        }
        if (row.s2 != 0) {
            v.require(s.line && s.line->from == (KeyRef{t.cuboid_index(row.j2), row.k2}) &&
                          s.line->to == (KeyRef{t.cuboid_index(row.j3), row.k3}) && int(s.line->axis) == row.e2,
                      tag + ": line references");
        }
    }
    return v.outcome("6 code rows");
}

// ---------------------------------------------------------------------------

Outcome gradient()
{
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.1, 0.9);
    int triples = 0, coords = 0;
    double worst = 0.0;
    while (triples < 100) {
        const TemplateConfig t = testing::random_template(rng);
        if (t.n_params() == 0) continue;
        ParameterVector a = default_params(t), b = default_params(t);
        for (double& x : a.values) x = u(rng);
        for (double& x : b.values) x = u(rng);
        const PointCloud target = sample_structure(evaluate(t, b), 80, std::uint64_t(triples));
        FitConfig cfg;
        cfg.points_per_structure = 64;
        cfg.seed = 100 + std::uint64_t(triples);
        const LossGradient lg = loss_and_grad(t, a, target, cfg);
        const testing::FrozenChamfer oracle(t, a.values, target.points, cfg.points_per_structure, cfg.seed);
        const auto check = testing::compare_gradient(lg.gradient, oracle.gradient(a.values, 1e-4));
        worst = std::max(worst, check.worst_relative_error);
        coords += check.checked;
        v.require(check.worst_relative_error < 1e-3,
                  "triple " + std::to_string(triples) + fmt(" rel err %.2e", check.worst_relative_error));
        ++triples;
    }
    const double secs = seconds_since(t0);
    v.require(secs < 60.0, "runtime " + fmt("%.1f s", secs) + " >= 60 s");
    return v.outcome("100 triples, " + std::to_string(coords) + " coordinates, worst rel err " + fmt("%.2e", worst) +
                     ", " + fmt("%.1f s", secs));
}

// ---------------------------------------------------------------------------

Outcome recovery()
{
    const auto t0 = std::chrono::steady_clock::now();
    const TemplateConfig t = demo_template();
    constexpr int kTrials = 50;
    int ok = 0;
    double worst = 0.0;
    for (int trial = 0; trial < kTrials; ++trial) {
        std::mt19937_64 rng(1000 + std::uint64_t(trial));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        ParameterVector truth = default_params(t);
        for (double& x : truth.values) x = u(rng);
        const PointCloud target = sample_structure(evaluate(t, truth), 4096, 5000 + std::uint64_t(trial));

        FitConfig cfg;
        cfg.rule = StepRule::adam;
        cfg.step_size = 0.01;
        cfg.iterations = 500;
        cfg.points_per_structure = 1024;
        cfg.final_step_fraction = 0.1;
        cfg.seed = std::uint64_t(trial);
        const FitReport r = optimize(t, default_params(t), target, cfg);
        const double cd =
            chamfer(sample_structure(evaluate(t, r.final_params), 4096, 9000 + std::uint64_t(trial)), target);
        worst = std::max(worst, cd);
        ok += cd < 1e-3;
    }
    const double secs = seconds_since(t0);
    Verdict v;
    v.require(ok * 10 >= kTrials * 9, std::to_string(ok) + "/50 below 1e-3");
    v.require(secs < 300.0, "runtime " + fmt("%.0f s", secs) + " >= 300 s");
    return v.outcome(std::to_string(ok) + "/50 trials reach surface chamfer < 1e-3 in 500 iterations, worst " +
                     fmt("%.2e", worst) + ", " + fmt("%.0f s", secs));
}

// ---------------------------------------------------------------------------

Outcome sdf_fidelity()
{
    Verdict v;
    const TemplateConfig t = demo_template();
    const StructureInstance s = evaluate(t, default_params(t));
    const std::vector<Detail> full(s.size());
    const SdfField field(s, full);

    std::mt19937_64 rng(42);
    int mismatches = 0, checked = 0;
    for (int i = 0; i < 10000; ++i) {
        const Vec3 p = testing::random_vec(rng, -0.7, 0.7);
        bool inside = false, near = false;
        for (std::size_t c = 0; c < s.size(); ++c) {
            if (!s.alive[c]) continue;
            inside |= contains(s.frames[c], p, -1e-6);
            near |= contains(s.frames[c], p, 1e-6) && !contains(s.frames[c], p, -1e-6);
        }
        if (near) continue;
        ++checked;
        mismatches += (field(p) < 0.0) != inside;
    }
    v.require(mismatches == 0, std::to_string(mismatches) + " sign mismatches");

    const StructureInstance cube = testing::unit_cube_structure();
    Detail holed;
    holed.view(Axis::x).holes.push_back({{0.4, 0.4}, {0.4, 0.6}, {0.6, 0.6}, {0.6, 0.4}});
    holed.view(Axis::x) = normalized(holed.view(Axis::x));
    const std::vector<Detail> hd{holed};
    std::uniform_real_distribution<double> in_hole(0.4 + 1e-6, 0.6 - 1e-6), along(1e-6, 1.0 - 1e-6);
    int negative_in_hole = 0;
    for (int i = 0; i < 2000; ++i) negative_in_hole += sdf_value(cube, hd, {along(rng), in_hole(rng), in_hole(rng)}) <= 0.0;
    v.require(negative_in_hole == 0, std::to_string(negative_in_hole) + " hole points not positive");

    const auto t0 = std::chrono::steady_clock::now();
    GridOptions opt;
    opt.resolution = 64;
    const Mesh m = mesh_structure(s, full, opt);
    const double secs = seconds_since(t0);
    v.require(secs <= 20.0, "demo mesh took " + fmt("%.1f s", secs));
    v.require(m.triangles.size() > 100, "demo mesh has too few triangles");

    const SdfGrid g = build_grid(s, full, opt);
    const double h = std::max({g.voxel_size().x, g.voxel_size().y, g.voxel_size().z});
    const Mesh mc = marching_cubes(g);
    int far = 0;
    double worst_ratio = 0.0;
    for (const Vec3& p : mc.vertices) {
        // Field values are in the unit-cube units of the containing cuboid.
        double local_h = 0.0;
        for (std::size_t c = 0; c < s.size(); ++c)
            if (s.alive[c] && contains(s.frames[c], p, 1e-9))
                local_h = std::max(local_h, h / std::min({norm(s.frames[c].xb), norm(s.frames[c].yb),
                                                          norm(s.frames[c].zb)}));
        if (local_h == 0.0) {
            ++far;
            continue;
        }
        const double ratio = std::abs(field(p)) / local_h;
        worst_ratio = std::max(worst_ratio, ratio);
        far += ratio > 2.0;
    }
    v.require(far == 0, std::to_string(far) + " vertices farther than 2 voxels");
    return v.outcome(std::to_string(checked) + " points checked, hole positive, " + std::to_string(mc.vertices.size()) +
                     " vertices within " + fmt("%.2f", worst_ratio) + " voxels at R=64, mesh " + fmt("%.2f s", secs));
}

// ---------------------------------------------------------------------------

std::vector<Vec2> annulus(std::mt19937_64& rng, int n)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Vec2> pts;
    while (int(pts.size()) < n) {
        const Vec2 p{u(rng), u(rng)};
        const double r = std::sqrt(squared_distance(p, {0.5, 0.5}));
        if (r >= 0.2 && r <= 0.45) pts.push_back(p);
    }
    return pts;
}

Outcome detail_pipeline()
{
    Verdict v;
    std::mt19937_64 rng(35);
    double worst_iou = 1.0;
    for (int i = 0; i < 100; ++i) {
        const ViewPolygon p = testing::random_convex(rng, 0.05);
        const double q = iou(rasterize(p, 512), rasterize(trace(rasterize(p)), 512));
        worst_iou = std::min(worst_iou, q);
    }
    v.require(worst_iou >= 0.95, "raster round trip IoU " + fmt("%.4f", worst_iou));

    std::uniform_real_distribution<double> u(0.0, 1.0);
    int alpha_bad = 0;
    std::size_t largest = 0;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Vec2> pts;
        if (trial % 2 == 0) {
            pts = annulus(rng, 120 + 4 * trial);
        } else {
            for (int i = 0; i < 60 + 7 * trial; ++i) pts.push_back({u(rng), u(rng)});
        }
        largest = std::max(largest, pts.size());
        const double alpha = trial % 3 == 0 ? default_alpha(pts) : 1.0 / (0.06 + 0.01 * (trial % 5));
        const auto oracle = testing::brute_alpha_complex(pts, alpha);
        const ViewPolygon p = alpha_shape(pts, alpha);
        std::set<int> verts;
        std::set<std::pair<int, int>> edges;
        std::size_t edge_total = 0;
        bool unmatched = false;
        auto index_of = [&](Vec2 q) {
            for (std::size_t k = 0; k < pts.size(); ++k)
                if (std::abs(pts[k].u - q.u) < 1e-12 && std::abs(pts[k].v - q.v) < 1e-12) return int(k);
            return -1;
        };
        for (const auto* group : {&p.outer, &p.holes})
            for (const Ring& r : *group)
                for (std::size_t k = 0; k < r.size(); ++k) {
                    const int a = index_of(r[k]), b = index_of(r[(k + 1) % r.size()]);
                    unmatched |= a < 0 || b < 0;
                    verts.insert(a);
                    edges.insert({std::min(a, b), std::max(a, b)});
                    ++edge_total;
                }
        alpha_bad += unmatched || verts != oracle.vertices || edges != oracle.boundary ||
                     edge_total != oracle.boundary.size() || std::abs(area(p) - oracle.area) > 1e-9;
    }
    v.require(alpha_bad == 0, std::to_string(alpha_bad) + "/20 alpha shapes differ from the oracle");
    v.require(largest <= 200, "point sets exceed 200 points");

    int not_involution = 0;
    for (int i = 0; i < 50; ++i) {
        Detail d;
        for (auto& view : d.views) view = testing::random_convex(rng, 0.05);
        for (Plane pl : {Plane::yz, Plane::xz, Plane::xy}) not_involution += reflect_detail(reflect_detail(d, pl), pl) != d;
    }
    v.require(not_involution == 0, std::to_string(not_involution) + " reflections are not involutions");
    return v.outcome("worst IoU " + fmt("%.4f", worst_iou) + ", 20 alpha shapes match, 150 exact involutions");
}

// ---------------------------------------------------------------------------

Outcome expansion()
{
    Verdict v;
    // Hand-computed: points at local (-0.2, 0.5, 1.3) and (1.1, -0.1, 0.5).
    const StructureInstance s = structure_from_sticks({"a"}, {Stick{{0.2, -0.1, 0.4}, {0.9, 0.6, 1.3}, 0.5, 0.3}});
    const Frame& f = s.frames[0];
    PointCloud p;
    p.points = {f.apply({-0.2, 0.5, 1.3}), f.apply({1.1, -0.1, 0.5}), f.apply({0.5, 0.5, 0.5})};
    p.labels = {0, 0, 0};
    const Expansion e = expand(s, p);
    const auto& sc = e.report.cuboids[0].scale;
    const std::array<double, 6> want{0.2, 0.1, 0.1, 0.0, 0.0, 0.3};
    for (std::size_t k = 0; k < 6; ++k) v.require(std::abs(sc[k] - want[k]) <= 1e-12, "rescale " + std::to_string(k));
    const Frame& g = e.report.cuboids[0].frame;
    v.require(distance(g.ob, f.ob - 0.2 * f.xb - 0.1 * f.yb - 0.0 * f.zb) <= 1e-12, "new origin");
    v.require(distance(g.xb, 1.3 * f.xb) <= 1e-12, "new x basis");
    v.require(distance(g.yb, 1.1 * f.yb) <= 1e-12, "new y basis");
    v.require(distance(g.zb, 1.3 * f.zb) <= 1e-12, "new z basis");

    std::mt19937_64 rng(12);
    int outside = 0, negative = 0;
    std::size_t total = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto st = structure_from_sticks({"a", "b", "c"}, {testing::random_stick(rng), testing::random_stick(rng),
                                                                testing::random_stick(rng)});
        PointCloud cloud;
        for (int i = 0; i < 300; ++i) cloud.points.push_back(testing::random_vec(rng, -1.5, 1.5));
        const PointCloud labeled = label_points(st, cloud);
        const Expansion ex = expand(st, labeled);
        for (std::size_t j = 0; j < cloud.size(); ++j)
            outside += !contains(ex.structure.frames[std::size_t(labeled.labels[j])], cloud.points[j], 1e-9);
        for (const auto& c : ex.report.cuboids)
            for (double x : c.scale) negative += x < 0.0;
        total += cloud.size();
    }
    v.require(outside == 0, std::to_string(outside) + " labeled points outside after expansion");
    v.require(negative == 0, std::to_string(negative) + " negative rescale values");
    return v.outcome("hand-computed case exact, " + std::to_string(total) + " labeled points contained");
}

// ---------------------------------------------------------------------------

Outcome metrics()
{
    Verdict v;
    std::mt19937_64 rng(51);
    auto cloud = [&](std::size_t n) {
        PointCloud p;
        for (std::size_t i = 0; i < n; ++i) p.points.push_back(testing::random_vec(rng));
        return p;
    };
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const PointCloud a = cloud(50), b = cloud(50);
        v.require(symmetry_distance(a, a) == 0.0, "symmetry_distance(P, P) != 0");
        worst = std::max(worst, std::abs(chamfer(a, b) - testing::brute_chamfer(a.points, b.points)));
    }
    v.require(worst <= 1e-12, "chamfer differs from the quadratic oracle by " + fmt("%.2e", worst));

    const TemplateConfig t = demo_template();
    const ParameterVector a = random_sample(t, 1, 0.4), b = random_sample(t, 2, 0.4);
    v.require(interpolate_params(a, b, 0.0).values == a.values, "t = 0 endpoint");
    v.require(interpolate_params(a, b, 1.0).values == b.values, "t = 1 endpoint");
    std::vector<double> mse;
    for (int k = 0; k < 100; ++k) {
        const auto x = interpolate_params(a, b, k / 100.0), y = interpolate_params(a, b, (k + 1) / 100.0);
        double e = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) e += std::pow(x.values[i] - y.values[i], 2);
        mse.push_back(e / double(x.size()));
    }
    const auto [lo, hi] = std::minmax_element(mse.begin(), mse.end());
    v.require((*hi - *lo) <= 1e-9 * *hi, "per-step MSE varies: " + fmt("%.3e", *lo) + " .. " + fmt("%.3e", *hi));
    return v.outcome("chamfer max |diff| " + fmt("%.1e", worst) + ", per-step MSE spread " +
                     fmt("%.1e", (*hi - *lo) / *hi));
}

// ---------------------------------------------------------------------------

Outcome auto_template_round_trip()
{
    Verdict v;
    std::mt19937_64 rng(62);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto parts = testing::synthetic_chair(rng);
        const AutoTemplate at = auto_template(parts);
        const StructureInstance s = evaluate(at.config, default_params(at.config));
        for (const AnnotatedPart& part : parts) {
            const Stick want = stickify(part);
            const int c = at.config.cuboid_index(part.name);
            if (c < 0) {
                v.require(false, "missing cuboid " + part.name);
                continue;
            }
            const Stick& got = s.sticks[std::size_t(c)];
            worst = std::max({worst, distance(got.p1, want.p1), distance(got.p2, want.p2), std::abs(got.w - want.w),
                              std::abs(got.l - want.l)});
        }
        v.require(parse_template(at.document.dump()) == at.config, "emitted document does not re-parse losslessly");
        v.require(parse_template(template_to_json(at.config).dump()) == at.config, "serialized template differs");
    }
    v.require(worst <= 1e-6, "stick error " + fmt("%.2e", worst));
    return v.outcome("20 chairs, worst stick error " + fmt("%.1e", worst));
}

// ---------------------------------------------------------------------------

Outcome service_smoke()
{
    Verdict v;
    testing::TempDir dir("stickform-acceptance");
    testing::ServiceHarness h(dir.path());
    auto c = h.client();
    const TemplateConfig t = demo_template();
    const char* kJson = "application/json";

    auto ev = c.Post("/evaluate", json{{"template", "chair4"}}.dump(), kJson);
    v.require(ev && ev->status == 200, "evaluate status");
    if (ev && ev->status == 200) {
        const json j = json::parse(ev->body);
        bool frames = j["cuboids"].size() == t.cuboids.size();
        for (const json& cub : j["cuboids"]) frames &= cub.contains("frame") && cub["frame"].contains("origin");
        v.require(frames, "evaluate lacks frames for every cuboid");
    }

    const ParameterVector truth = random_sample(t, 3, 0.2);
    const PointCloud target = sample_structure(evaluate(t, truth), 1024, 4);
    const json fit_body = {{"template", "chair4"},
                           {"target", cloud_to_json(target)},
                           {"config", {{"iterations", 100}, {"points", 512}, {"rule", "adam"}}}};
    auto fr = c.Post("/fit", fit_body.dump(), kJson);
    v.require(fr && fr->status == 202, "fit status");
    if (fr && fr->status == 202) {
        const std::string id = json::parse(fr->body)["job"];
        json job;
        const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(120);
        while (std::chrono::steady_clock::now() < deadline) {
            job = testing::parse_or_null(c.Get("/jobs/" + id));
            if (job.value("status", "") != "queued" && job.value("status", "") != "running") break;
            std::this_thread::sleep_for(std::chrono::milliseconds(20));
        }
        v.require(job.value("status", "") == "done", "fit job ended as " + job.value("status", "?"));
        v.require(job.contains("loss_trace") && job["loss_trace"].size() == 100, "loss trace length");
    }

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> values(t.n_params());
    for (double& x : values) x = u(rng);
    auto put = c.Put("/annotations/acceptance_object", json{{"template", "chair4"}, {"values", values}}.dump(), kJson);
    v.require(put && put->status == 200, "annotation save status");
    auto get = c.Get("/annotations/acceptance_object");
    v.require(get && get->status == 200, "annotation load status");
    if (get && get->status == 200)
        v.require(json::parse(get->body)["values"].get<std::vector<double>>() == values,
                  "annotation values changed in the round trip");
    return v.outcome("evaluate, fit job to done, annotation round trip value-exact");
}

}  // namespace
}  // namespace stickform

int main()
{
    using namespace stickform;
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {"frame-math", frame_math},
        {"dsl-conformance", dsl_golden},
        {"gradient-correctness", gradient},
        {"synthetic-recovery", recovery},
        {"sdf-fidelity", sdf_fidelity},
        {"detail-pipeline", detail_pipeline},
        {"expansion", expansion},
        {"metrics", metrics},
        {"auto-template-round-trip", auto_template_round_trip},
        {"service-smoke", service_smoke},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %-26s %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", int(std::size(criteria)) - failed, std::size(criteria));
    return failed == 0 ? 0 : 1;
}
