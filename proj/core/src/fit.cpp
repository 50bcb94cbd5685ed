// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#include "stickform/fit.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <utility>

#include "stickform/autodiff.h"
#include "stickform/chamfer.h"

namespace stickform {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream)
{
    // splitmix64 finalizer over the combined value
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

SampleLayout sample_layout(const StructureInstance& s, std::size_t n, std::uint64_t seed)
{
    const std::vector<int> alive = alive_indices(s);
    if (alive.empty()) throw ValidationError("structure has no alive cuboids to sample");

    std::vector<double> area(alive.size());
    for (std::size_t i = 0; i < alive.size(); ++i) area[i] = surface_area(s.frames[std::size_t(alive[i])]);
    double total = std::accumulate(area.begin(), area.end(), 0.0);
    if (!(total > 0.0)) {
        std::fill(area.begin(), area.end(), 1.0);
        total = double(area.size());
    }

    std::vector<std::size_t> count(alive.size());
    std::vector<std::pair<double, std::size_t>> remainder(alive.size());
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < alive.size(); ++i) {
        const double quota = double(n) * area[i] / total;
        count[i] = std::size_t(std::floor(quota));
        assigned += count[i];
        remainder[i] = {quota - std::floor(quota), i};
    }
    std::stable_sort(remainder.begin(), remainder.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++count[remainder[k % remainder.size()].second];

    SampleLayout layout;
    layout.cuboid.reserve(n);
    layout.local.reserve(n);
    Rng rng(seed);
    for (std::size_t i = 0; i < alive.size(); ++i) {
        if (count[i] == 0) continue;
        for (const Vec3& u : sample_unit_surface(s.frames[std::size_t(alive[i])], count[i], rng)) {
            layout.cuboid.push_back(alive[i]);
            layout.local.push_back(u);
        }
    }
    return layout;
}

PointCloud apply_layout(const StructureInstance& s, const SampleLayout& layout)
{
    PointCloud pc;
    pc.points.reserve(layout.size());
    pc.labels = layout.cuboid;
    for (std::size_t i = 0; i < layout.size(); ++i)
        pc.points.push_back(s.frames[std::size_t(layout.cuboid[i])].apply(layout.local[i]));
    return pc;
}

PointCloud sample_structure(const StructureInstance& s, std::size_t n, std::uint64_t seed)
{
    return apply_layout(s, sample_layout(s, n, seed));
}

void FitConfig::validate() const
{
    if (iterations < 1) throw ValidationError("iterations must be at least 1");
    if (!(step_size > 0.0)) throw ValidationError("step_size must be positive");
    if (points_per_structure < 1) throw ValidationError("points_per_structure must be at least 1");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw ValidationError("momentum must be in [0, 1)");
    if (!(second_moment >= 0.0 && second_moment < 1.0)) throw ValidationError("second_moment must be in [0, 1)");
    if (!(final_step_fraction > 0.0 && final_step_fraction <= 1.0))
        throw ValidationError("final_step_fraction must be in (0, 1]");
    if (volume_threshold && *volume_threshold < 0.0) throw ValidationError("volume_threshold must be non-negative");
}

ChamferObjective::ChamferObjective(const TemplateConfig& t, PointCloud target, FitConfig cfg)
    : template_(t), target_(std::move(target)), cfg_(std::move(cfg))
{
    cfg_.validate();
    if (target_.empty()) throw ValidationError("target point cloud is empty");
    if (cfg_.volume_threshold) template_.volume_threshold = *cfg_.volume_threshold;
    target_tree_ = KdTree(target_.points);
}

namespace {

StructureInstance plain_structure(const TemplateConfig& t, const BasicEvaluation<ad::Var>& ev)
{
    StructureInstance s;
    const std::size_t n = ev.frames.size();
    s.names.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& fv = ev.frames[i];
        Frame f;
        for (int k = 0; k < 3; ++k) {
            f.xb[k] = fv.xb[k].value();
            f.yb[k] = fv.yb[k].value();
            f.zb[k] = fv.zb[k].value();
            f.ob[k] = fv.ob[k].value();
        }
        s.names.push_back(t.cuboids[i].name);
        s.frames.push_back(f);
        s.alive.push_back(volume(f) >= t.volume_threshold);
    }
    return s;
}

}  // namespace

LossGradient ChamferObjective::evaluate(std::span<const double> a, std::uint64_t seed) const
{
    const ParameterVector clamped = checked_params(template_, a);
    ad::Tape tape;
    std::vector<ad::Var> vars;
    vars.reserve(clamped.size());
    for (double v : clamped.values) vars.push_back(tape.variable(v));
    const auto ev = evaluate_generic<ad::Var>(template_, std::span<const ad::Var>(vars));

    const StructureInstance s = plain_structure(template_, ev);
    const SampleLayout layout = sample_layout(s, cfg_.points_per_structure, seed);
    const PointCloud samples = apply_layout(s, layout);
    const ChamferMatch m = chamfer_match(samples.points, target_.points, target_tree_);

    // dL/dpoint for every structure sample
    std::vector<Vec3> grad(samples.size());
    const double wp = 2.0 / double(samples.size());
    const double wq = 2.0 / double(target_.size());
    for (std::size_t j = 0; j < samples.size(); ++j)
        grad[j] += (samples.points[j] - target_.points[m.p_to_q[j]]) * wp;
    for (std::size_t k = 0; k < target_.size(); ++k) {
        const std::size_t j = m.q_to_p[k];
        grad[j] += (samples.points[j] - target_.points[k]) * wq;
    }

    // Chain through the fixed local coordinates onto the frame entries.
    std::vector<std::array<Vec3, 4>> frame_grad(s.size());
    for (std::size_t j = 0; j < samples.size(); ++j) {
        auto& g = frame_grad[std::size_t(layout.cuboid[j])];
        const Vec3& u = layout.local[j];
        g[0] += grad[j] * u.x;
        g[1] += grad[j] * u.y;
        g[2] += grad[j] * u.z;
        g[3] += grad[j];
    }
    std::vector<std::pair<ad::Var, double>> seeds;
    seeds.reserve(12 * s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!s.alive[i]) continue;
        const auto& f = ev.frames[i];
        const auto& g = frame_grad[i];
        for (int k = 0; k < 3; ++k) {
            seeds.emplace_back(f.xb[k], g[0][k]);
            seeds.emplace_back(f.yb[k], g[1][k]);
            seeds.emplace_back(f.zb[k], g[2][k]);
            seeds.emplace_back(f.ob[k], g[3][k]);
        }
    }
    const std::vector<double> adjoint = tape.backward(seeds);

    LossGradient out;
    out.loss = m.value;
    out.gradient.resize(vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i) {
        double g = adjoint[vars[i].index()];
        const double v = clamped.values[i];
        if ((v <= 0.0 && g > 0.0) || (v >= 1.0 && g < 0.0)) g = 0.0;
        out.gradient[i] = g;
    }
    return out;
}

double ChamferObjective::loss(std::span<const double> a, std::uint64_t seed) const
{
    const StructureInstance s = stickform::evaluate(template_, checked_params(template_, a));
    const PointCloud samples = sample_structure(s, cfg_.points_per_structure, seed);
    return chamfer_match(samples.points, target_.points, target_tree_).value;
}

LossGradient loss_and_grad(const TemplateConfig& t, const ParameterVector& a, const PointCloud& target,
                           const FitConfig& cfg)
{
    return ChamferObjective(t, target, cfg).evaluate(a.values, cfg.seed);
}

FitReport optimize(const TemplateConfig& t, const ParameterVector& init, const PointCloud& target,
                   const FitConfig& cfg, const FitCallback& callback)
{
    const auto start = std::chrono::steady_clock::now();
    const ChamferObjective objective(t, target, cfg);
    std::vector<double> a = checked_params(t, init.values).values;
    const std::size_t n = a.size();
    std::vector<double> first(n, 0.0), second(n, 0.0);

    FitReport report;
    report.loss_trace.reserve(std::size_t(cfg.iterations));
    report.best_loss = std::numeric_limits<double>::infinity();
    report.best_params = checked_params(t, a);
    for (int k = 0; k < cfg.iterations; ++k) {
        const LossGradient lg = objective.evaluate(a, mix_seed(cfg.seed, cfg.resample ? std::uint64_t(k) : 0));
        report.loss_trace.push_back(lg.loss);
        if (lg.loss < report.best_loss) {
            report.best_loss = lg.loss;
            report.best_params.values = a;
        }

        double step = cfg.step_size;
        if (cfg.iterations > 1 && cfg.final_step_fraction < 1.0) {
            const double progress = double(k) / double(cfg.iterations - 1);
            const double f = cfg.final_step_fraction;
            step *= f + (1.0 - f) * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double g = lg.gradient[i];
            double delta = 0.0;
            switch (cfg.rule) {
            case StepRule::gradient:
                delta = g;
                break;
            case StepRule::momentum:
                first[i] = cfg.momentum * first[i] + g;
                delta = first[i];
                break;
            case StepRule::adam: {
                first[i] = cfg.momentum * first[i] + (1.0 - cfg.momentum) * g;
                second[i] = cfg.second_moment * second[i] + (1.0 - cfg.second_moment) * g * g;
                const double mhat = first[i] / (1.0 - std::pow(cfg.momentum, k + 1));
                const double vhat = second[i] / (1.0 - std::pow(cfg.second_moment, k + 1));
                delta = mhat / (std::sqrt(vhat) + cfg.adam_epsilon);
                break;
            }
            }
            a[i] = std::clamp(a[i] - step * delta, 0.0, 1.0);
        }
        if (callback && !callback(FitProgress{k, lg.loss, a})) {
            report.cancelled = true;
            break;
        }
    }
    report.final_params = checked_params(t, a);
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

namespace {

struct AliveInverse {
    int index;
    FrameInverse inverse;
};

std::vector<AliveInverse> alive_inverses(const StructureInstance& s)
{
    std::vector<AliveInverse> out;
    for (int i : alive_indices(s)) out.push_back({i, FrameInverse(s.frames[std::size_t(i)])});
    if (out.empty()) throw ValidationError("structure has no alive cuboids");
    return out;
}

}  // namespace

PointCloud label_points(const StructureInstance& s, const PointCloud& p)
{
    const auto inverses = alive_inverses(s);
    PointCloud out;
    out.points = p.points;
    out.labels.resize(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
        int label = -1;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& [index, inv] : inverses) {
            const Vec3 u = inv.local(p.points[j]);
            if (u.x >= 0.0 && u.x <= 1.0 && u.y >= 0.0 && u.y <= 1.0 && u.z >= 0.0 && u.z <= 1.0) {
                label = index;
                break;
            }
            const double d = face_distance(inv.frame(), p.points[j]);
            if (d < best) {
                best = d;
                label = index;
            }
        }
        out.labels[j] = label;
    }
    return out;
}

Frame expanded_frame(const Frame& f, const std::array<double, 6>& s)
{
    Frame g;
    g.ob = f.ob - f.xb * s[0] - f.yb * s[2] - f.zb * s[4];
    g.xb = f.xb * (1.0 + s[0] + s[1]);
    g.yb = f.yb * (1.0 + s[2] + s[3]);
    g.zb = f.zb * (1.0 + s[4] + s[5]);
    return g;
}

Expansion expand(const StructureInstance& s, const PointCloud& labeled)
{
    if (labeled.labels.size() != labeled.points.size())
        throw ValidationError("expansion needs one label per point");
    const std::size_t n = s.size();
    std::vector<Vec3> lo(n, Vec3{0.0, 0.0, 0.0}), hi(n, Vec3{1.0, 1.0, 1.0});
    std::vector<std::size_t> counts(n, 0);
    std::vector<std::optional<FrameInverse>> inverses(n);
    for (std::size_t j = 0; j < labeled.size(); ++j) {
        const int label = labeled.labels[j];
        if (label < 0 || std::size_t(label) >= n) throw ValidationError("point label outside the structure");
        const std::size_t i = std::size_t(label);
        if (!inverses[i]) inverses[i].emplace(s.frames[i]);
        const Vec3 u = inverses[i]->local(labeled.points[j]);
        for (int k = 0; k < 3; ++k) {
            lo[i][k] = std::min(lo[i][k], u[k]);
            hi[i][k] = std::max(hi[i][k], u[k]);
        }
        ++counts[i];
    }

    Expansion out;
    out.structure = s;
    out.report.cuboids.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        ExpansionEntry& e = out.report.cuboids[i];
        e.points = counts[i];
        for (int k = 0; k < 3; ++k) {
            e.scale[std::size_t(2 * k)] = std::max(0.0, -lo[i][k]);
            e.scale[std::size_t(2 * k + 1)] = std::max(0.0, hi[i][k] - 1.0);
        }
        e.frame = expanded_frame(s.frames[i], e.scale);
        Frame& f = out.structure.frames[i];
        f = e.frame;
        Stick& st = out.structure.sticks.size() == n ? out.structure.sticks[i] : out.structure.sticks.emplace_back();
        st.p1 = f.ob + f.xb * 0.5 + f.yb * 0.5;
        st.p2 = st.p1 + f.zb;
        st.w = norm(f.xb);
        st.l = norm(f.yb);
        if (out.structure.keypoints.size() == n)
            out.structure.keypoints[i] = key_points(f);
        else
            out.structure.keypoints.push_back(key_points(f));
    }
    return out;
}

}  // namespace stickform
