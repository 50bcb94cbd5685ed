// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include "common/annotations.h"
#include "common/service_harness.h"
#include "common/test_util.h"
#include "stickform/io.h"
#include "stickform/mesh.h"
#include "stickform/metrics.h"

namespace stickform {
namespace {

using nlohmann::json;

struct CliRun {
    int code = -1;
    std::string out;
};

CliRun run_cli(const std::string& args, const std::filesystem::path& dir)
{
    const auto out = dir / "stdout.txt";
    const std::string cmd = std::string("\"") + STICKFORM_CLI + "\" " + args + " > \"" + out.string() + "\" 2> \"" +
                            (dir / "stderr.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    CliRun r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = testing::read_file(out.string());
    return r;
}

class Cli : public ::testing::Test {
  protected:
    testing::TempDir dir{"stickform-cli"};
    std::string tpl = testing::demo_template_path();
    std::string path(const std::string& name) const { return (dir.path() / name).string(); }
};

TEST_F(Cli, EvalDefaultsPrintsFramesJson)
{
    const CliRun r = run_cli("eval -t " + tpl + " -p defaults --json", dir.path());
    ASSERT_EQ(r.code, 0);
    const json j = json::parse(r.out);
    const TemplateConfig t = parse_template(testing::read_file(tpl));
    ASSERT_EQ(j["cuboids"].size(), t.cuboids.size());
    EXPECT_TRUE(j["cuboids"][0].contains("frame"));
}

TEST_F(Cli, TemplateByName)
{
    EXPECT_EQ(run_cli("eval -t chair4.json -p defaults", dir.path()).code, 0);
}

TEST_F(Cli, UsageErrorsExitTwo)
{
    EXPECT_EQ(run_cli("eval -t " + tpl + " --no-such-flag", dir.path()).code, 2);
    EXPECT_EQ(run_cli("frobnicate", dir.path()).code, 2);
    EXPECT_EQ(run_cli("", dir.path()).code, 2);
    EXPECT_EQ(run_cli("mesh -t " + tpl + " --resolution 2", dir.path()).code, 2);
    EXPECT_EQ(run_cli("--help", dir.path()).code, 0);
}

TEST_F(Cli, PipelineErrorsExitOne)
{
    EXPECT_EQ(run_cli("eval -t " + path("missing.json"), dir.path()).code, 1);
    EXPECT_EQ(run_cli("eval -t " + tpl + " -p '[0.5]'", dir.path()).code, 1);
    std::ofstream(path("bad.xyz")) << "1 2\n";
    EXPECT_EQ(run_cli("fit -t " + tpl + " --pointcloud " + path("bad.xyz"), dir.path()).code, 1);
}

TEST_F(Cli, MeshWritesObjWithManyFaces)
{
    const CliRun r = run_cli("mesh -t " + tpl + " -p defaults --resolution 64 --out " + path("chair.obj"), dir.path());
    ASSERT_EQ(r.code, 0);
    ASSERT_TRUE(std::filesystem::exists(path("chair.obj")));
    EXPECT_GE(load_obj(path("chair.obj")).triangles.size(), 100u);
}

TEST_F(Cli, FitDetailsMetricsExpandPipeline)
{
    const TemplateConfig t = parse_template(testing::read_file(tpl));
    const PointCloud target = sample_structure(evaluate(t, random_sample(t, 11, 0.15)), 1024, 12);
    save_point_cloud(path("target.xyz"), target);

    CliRun r = run_cli("fit -t " + tpl + " --pointcloud " + path("target.xyz") +
                        " --iterations 40 --points 256 --seed 1 --out " + path("fit.json"),
                    dir.path());
    ASSERT_EQ(r.code, 0);
    const ParameterVector fitted = params_from_json(t, json::parse(testing::read_file(path("fit.json"))));
    EXPECT_EQ(fitted.size(), t.n_params());

    r = run_cli("details -t " + tpl + " -p " + path("fit.json") + " --pointcloud " + path("target.xyz") + " --out " +
                    path("details.json"),
                dir.path());
    ASSERT_EQ(r.code, 0);
    EXPECT_NO_THROW(details_from_json(t, json::parse(testing::read_file(path("details.json")))));

    r = run_cli("mesh -t " + tpl + " -p " + path("fit.json") + " --details " + path("details.json") +
                    " --resolution 32 --out " + path("detailed.obj"),
                dir.path());
    ASSERT_EQ(r.code, 0);

    r = run_cli("metrics -t " + tpl + " -p " + path("fit.json") + " --pointcloud " + path("target.xyz") +
                    " --samples 256 --resolution 32 --json",
                dir.path());
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(json::parse(r.out).contains("symmetry_distance"));

    r = run_cli("metrics -t " + tpl + " --pointcloud " + path("target.xyz") + " --samples 128 --resolution 24",
                dir.path());
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out.rfind("object,surface_cd,solid_cd,symmetry_distance,rooted,stable", 0), 0u);

    r = run_cli("expand -t " + tpl + " -p " + path("fit.json") + " --pointcloud " + path("target.xyz"), dir.path());
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(json::parse(r.out)["expansion"].size(), t.cuboids.size());
}

TEST_F(Cli, InterpSampleAndAutotemplate)
{
    const TemplateConfig t = parse_template(testing::read_file(tpl));
    const std::vector<double> ones(t.n_params(), 1.0);
    std::ofstream(path("ones.json")) << json{{"values", ones}}.dump();
    CliRun r = run_cli("interp -t " + tpl + " --to " + path("ones.json") + " --steps 3", dir.path());
    ASSERT_EQ(r.code, 0);
    const json steps = json::parse(r.out)["steps"];
    ASSERT_EQ(steps.size(), 3u);
    EXPECT_EQ(steps[2]["values"].get<std::vector<double>>(), ones);

    r = run_cli("sample -t " + tpl + " --seed 5 --spread 0", dir.path());
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(json::parse(r.out)["values"].get<std::vector<double>>(), default_params(t).values);

    std::mt19937_64 rng(2);
    json parts = json::array();
    for (const AnnotatedPart& p : testing::synthetic_chair(rng))
        parts.push_back({{"name", p.name},
                         {"center", {p.center.x, p.center.y, p.center.z}},
                         {"axes", {{p.axes[0].x, p.axes[0].y, p.axes[0].z},
                                   {p.axes[1].x, p.axes[1].y, p.axes[1].z},
                                   {p.axes[2].x, p.axes[2].y, p.axes[2].z}}}});
    std::ofstream(path("chair_annotation.json")) << json{{"parts", parts}}.dump();
    r = run_cli("autotemplate --annotation " + path("chair_annotation.json") + " --category chair --out " +
                    path("auto.json"),
                dir.path());
    ASSERT_EQ(r.code, 0);
    const TemplateConfig at = parse_template(testing::read_file(path("auto.json")));
    EXPECT_EQ(at.cuboids.size(), 6u);
    EXPECT_EQ(run_cli("eval -t " + path("auto.json") + " --json", dir.path()).code, 0);
}

TEST_F(Cli, ServeRequiresProject)
{
    const std::string cmd = "env -u STRUCT_TEMPLATE_PROJECT \"" + std::string(STICKFORM_CLI) + "\" serve > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    EXPECT_EQ(WEXITSTATUS(status), 1);
}

}  // namespace
}  // namespace stickform
