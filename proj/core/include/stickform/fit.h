// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "stickform/cuboid.h"
#include "stickform/kdtree.h"
#include "stickform/template.h"

namespace stickform {

/// Mixes a seed with a stream index; used for per-iteration resampling.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Where each structure sample lives: the cuboid and its unit-cube
/// coordinate. Holding the layout fixed makes sampling differentiable in the
/// frames.
struct SampleLayout {
    std::vector<int> cuboid;
    std::vector<Vec3> local;

    std::size_t size() const { return local.size(); }
};

/// Splits `n` samples over the alive cuboids by surface area (largest
/// remainder) and draws unit-cube surface coordinates from one stream seeded
/// with `seed`. Throws if no cuboid is alive.
SampleLayout sample_layout(const StructureInstance& s, std::size_t n, std::uint64_t seed);

/// World points of a layout, labeled by cuboid.
PointCloud apply_layout(const StructureInstance& s, const SampleLayout& layout);

PointCloud sample_structure(const StructureInstance& s, std::size_t n, std::uint64_t seed);

enum class StepRule { gradient, momentum, adam };

struct FitConfig {
    int iterations = 1000;
    double step_size = 0.01;
    std::size_t points_per_structure = 2048;
    StepRule rule = StepRule::gradient;
    double momentum = 0.9;       ///< momentum and Adam first-moment decay
    double second_moment = 0.999;
    double adam_epsilon = 1e-8;
    double final_step_fraction = 1.0;  ///< cosine decay of the step to this fraction
    std::optional<double> volume_threshold;
    std::uint64_t seed = 0;
    bool resample = true;  ///< draw fresh samples every iteration; otherwise reuse the first stream

    void validate() const;
};

struct LossGradient {
    double loss = 0.0;
    std::vector<double> gradient;  ///< projected onto the feasible box
};

/// Chamfer loss of a template against a fixed target cloud, with its
/// gradient in the parameters. Nearest-neighbor matches and sample layouts are
/// constants of each evaluation.
class ChamferObjective {
  public:
    ChamferObjective(const TemplateConfig& t, PointCloud target, FitConfig cfg);

    LossGradient evaluate(std::span<const double> a, std::uint64_t seed) const;
    /// Loss only, with the same sampling as `evaluate`.
    double loss(std::span<const double> a, std::uint64_t seed) const;

    const TemplateConfig& config() const { return template_; }
    const PointCloud& target() const { return target_; }

  private:
    TemplateConfig template_;
    PointCloud target_;
    KdTree target_tree_;
    FitConfig cfg_;
};

LossGradient loss_and_grad(const TemplateConfig& t, const ParameterVector& a, const PointCloud& target,
                           const FitConfig& cfg);

struct FitProgress {
    int iteration = 0;
    double loss = 0.0;
    std::span<const double> values;
};

/// Return false to stop after the current iteration.
using FitCallback = std::function<bool(const FitProgress&)>;

struct FitReport {
    ParameterVector final_params;
    ParameterVector best_params;
    double best_loss = 0.0;
    std::vector<double> loss_trace;
    double wall_seconds = 0.0;
    bool cancelled = false;
};

FitReport optimize(const TemplateConfig& t, const ParameterVector& init, const PointCloud& target,
                   const FitConfig& cfg, const FitCallback& callback = {});

/// Labels every point with a containing alive cuboid (lowest index first) or,
/// failing that, the alive cuboid with the smallest face distance.
PointCloud label_points(const StructureInstance& s, const PointCloud& p);

struct ExpansionEntry {
    std::array<double, 6> scale{};  ///< s_x1, s_x2, s_y1, s_y2, s_z1, s_z2
    Frame frame;
    std::size_t points = 0;
};

struct ExpansionReport {
    std::vector<ExpansionEntry> cuboids;
};

struct Expansion {
    StructureInstance structure;
    ExpansionReport report;
};

/// Grows each cuboid along its local axes until it covers every point
/// labeled with it.
Expansion expand(const StructureInstance& s, const PointCloud& labeled);

/// Frame grown by the six rescale values.
Frame expanded_frame(const Frame& f, const std::array<double, 6>& scale);

}  // namespace stickform
