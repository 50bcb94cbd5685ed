// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include "common/annotations.h"
#include "common/service_harness.h"
#include "common/test_util.h"
#include "stickform/io.h"
#include "stickform/metrics.h"

namespace stickform {
namespace {

using nlohmann::json;
using testing::parse_or_null;

constexpr const char* kJson = "application/json";

TemplateConfig demo() { return parse_template(testing::read_file(testing::demo_template_path())); }

std::string xyz_text(const PointCloud& p)
{
    std::ostringstream out;
    write_xyz(out, p);
    return out.str();
}

PointCloud synthetic_target(std::uint64_t seed, std::size_t n = 1024)
{
    const TemplateConfig t = demo();
    return sample_structure(evaluate(t, random_sample(t, seed, 0.15)), n, seed + 100);
}

json wait_for_job(httplib::Client& c, const std::string& id, double timeout_s = 120.0)
{
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_s);
    json j;
    while (std::chrono::steady_clock::now() < deadline) {
        j = parse_or_null(c.Get("/jobs/" + id));
        const std::string st = j.value("status", "");
        if (st != "queued" && st != "running") return j;
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    return j;
}

class Service : public ::testing::Test {
  protected:
    testing::TempDir dir{"stickform-service"};
    testing::ServiceHarness harness{dir.path()};
    httplib::Client c = harness.client();
};

TEST_F(Service, HealthAndTemplateListing)
{
    auto r = c.Get("/health");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 200);
    const json list = parse_or_null(c.Get("/templates"));
    ASSERT_TRUE(list.contains("templates"));
    bool found = false;
    for (const json& t : list["templates"]) found |= t["name"] == "chair4";
    EXPECT_TRUE(found);
}

TEST_F(Service, TemplateDescriptionCarriesSlotMetadata)
{
    const TemplateConfig t = demo();
    auto r = c.Get("/templates/chair4");
    ASSERT_TRUE(r);
    ASSERT_EQ(r->status, 200);
    const json j = json::parse(r->body);
    EXPECT_EQ(j["defaults"].get<std::vector<double>>(), default_params(t).values);
    EXPECT_EQ(j["param_names"].get<std::vector<std::string>>(), t.param_names);
    ASSERT_EQ(j["parameters"].size(), t.n_params());
    for (const json& p : j["parameters"]) {
        if (p["kind"] != "range") continue;
        EXPECT_LE(p["min"].get<double>(), p["max"].get<double>());
    }
    EXPECT_EQ(template_from_json(j["document"]), t);
    EXPECT_EQ(c.Get("/templates/no_such_template")->status, 404);
}

TEST_F(Service, EvaluateDefaultsReturnsEveryCuboid)
{
    const TemplateConfig t = demo();
    auto r = c.Post("/evaluate", json{{"template", "chair4"}}.dump(), kJson);
    ASSERT_TRUE(r);
    ASSERT_EQ(r->status, 200);
    const json j = json::parse(r->body);
    ASSERT_EQ(j["cuboids"].size(), t.cuboids.size());
    const StructureInstance s = evaluate(t, default_params(t));
    for (std::size_t i = 0; i < s.size(); ++i) {
        const json& cub = j["cuboids"][i];
        EXPECT_EQ(cub["name"], t.cuboids[i].name);
        EXPECT_EQ(cub["alive"].get<bool>(), bool(s.alive[i]));
        EXPECT_EQ(cub["frame"]["origin"][0].get<double>(), s.frames[i].ob.x);
        EXPECT_EQ(cub["keypoints"].size(), s.keypoints[i].size());
    }
}

TEST_F(Service, EvaluateEchoesValuesExactly)
{
    const TemplateConfig t = demo();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(t.n_params());
    for (double& x : v) x = u(rng);
    const json body = {{"template", "chair4"}, {"values", v}};
    const json j = parse_or_null(c.Post("/evaluate", body.dump(), kJson));
    EXPECT_EQ(j["values"].get<std::vector<double>>(), v);
    EXPECT_EQ(j["values"].dump(), json(v).dump());
}

TEST_F(Service, EvaluateInlineTemplate)
{
    const json body = {{"template", template_to_json(demo())}, {"values", "defaults"}};
    auto r = c.Post("/evaluate", body.dump(), kJson);
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 200);
}

TEST_F(Service, ErrorStatusCodes)
{
    EXPECT_EQ(c.Post("/evaluate", "{not json", kJson)->status, 400);
    EXPECT_EQ(c.Post("/evaluate", "[1,2]", kJson)->status, 400);
    EXPECT_EQ(c.Post("/evaluate", json{{"values", json::array()}}.dump(), kJson)->status, 400);
    EXPECT_EQ(c.Post("/evaluate", json{{"template", "missing"}}.dump(), kJson)->status, 404);
    auto r = c.Post("/evaluate", json{{"template", "chair4"}, {"values", {0.5, 0.5}}}.dump(), kJson);
    EXPECT_EQ(r->status, 409);
    EXPECT_NE(json::parse(r->body)["error"].get<std::string>().find("values"), std::string::npos);
    EXPECT_EQ(c.Post("/evaluate", json{{"template", json{{"cuboids", 3}}}}.dump(), kJson)->status, 400);
    EXPECT_EQ(c.Get("/jobs/job-999")->status, 404);
    EXPECT_EQ(c.Delete("/jobs/job-999")->status, 404);
    EXPECT_EQ(c.Get("/annotations/nobody")->status, 404);
    EXPECT_EQ(c.Get("/pointclouds/pc-77")->status, 404);
}

TEST_F(Service, SolveRejectsRelationBoundSlots)
{
    const TemplateConfig t = demo();
    auto r = c.Post("/solve", json{{"template", "chair4"}, {"slots", {{"seat.w", 0.5}}}}.dump(), kJson);
    ASSERT_EQ(r->status, 200);
    const json j = json::parse(r->body);
    const int idx = *t.cuboids[0].slots[6].param_index();
    EXPECT_NEAR(j["values"][std::size_t(idx)].get<double>(), (0.5 - 0.3) / 0.3, 1e-12);
    double w = 0.0;
    for (const json& cub : j["cuboids"])
        if (cub["name"] == "seat") w = cub["stick"]["w"].get<double>();
    EXPECT_NEAR(w, 0.5, 1e-12);

    EXPECT_EQ(c.Post("/solve", json{{"template", "chair4"}, {"slots", {{"back.x1", 0.1}}}}.dump(), kJson)->status,
              409);
    EXPECT_EQ(c.Post("/solve", json{{"template", "chair4"}, {"slots", {{"seat.w", 5.0}}}}.dump(), kJson)->status,
              400);
    EXPECT_EQ(c.Post("/solve", json{{"template", "chair4"}, {"slots", {{"seat.q", 0.1}}}}.dump(), kJson)->status,
              400);
}

TEST_F(Service, PointCloudUploadAndFetch)
{
    const PointCloud p = synthetic_target(1, 64);
    auto r = c.Post("/pointclouds", xyz_text(p), "text/plain");
    ASSERT_EQ(r->status, 201);
    const json up = json::parse(r->body);
    EXPECT_EQ(up["points"], 64);
    const json got = parse_or_null(c.Get("/pointclouds/" + up["id"].get<std::string>()));
    ASSERT_EQ(got["points"].size(), 64u);
    EXPECT_EQ(got["points"][3][1].get<double>(), p.points[3].y);
    EXPECT_EQ(c.Post("/pointclouds", "1 2\n", "text/plain")->status, 400);
    EXPECT_EQ(c.Post("/pointclouds", "", "text/plain")->status, 400);
}

TEST_F(Service, FitJobRunsToDoneWithLossTrace)
{
    const PointCloud target = synthetic_target(2);
    const std::string id = json::parse(c.Post("/pointclouds", xyz_text(target), "text/plain")->body)["id"];
    const json body = {{"template", "chair4"},
                       {"target", id},
                       {"config", {{"iterations", 60}, {"points", 512}, {"rule", "adam"}, {"seed", 4}}}};
    auto r = c.Post("/fit", body.dump(), kJson);
    ASSERT_EQ(r->status, 202);
    const std::string job = json::parse(r->body)["job"];
    const json done = wait_for_job(c, job);
    ASSERT_EQ(done["status"], "done") << done.dump();
    ASSERT_EQ(done["loss_trace"].size(), 60u);
    EXPECT_LT(done["best_loss"].get<double>(), done["loss_trace"][0].get<double>());
    EXPECT_EQ(done["best_values"].size(), demo().n_params());
    EXPECT_EQ(done["report"]["best_values"], done["best_values"]);
}

TEST_F(Service, FitWithInlineTargetAndBadConfig)
{
    const PointCloud target = synthetic_target(3, 200);
    json body = {{"template", "chair4"}, {"target", cloud_to_json(target)}, {"config", {{"iterations", 3}}}};
    auto r = c.Post("/fit", body.dump(), kJson);
    ASSERT_EQ(r->status, 202);
    EXPECT_EQ(wait_for_job(c, json::parse(r->body)["job"])["status"], "done");

    body["config"] = {{"iterations", -1}};
    EXPECT_EQ(c.Post("/fit", body.dump(), kJson)->status, 400);
    body["config"] = {{"unknown_knob", 1}};
    EXPECT_EQ(c.Post("/fit", body.dump(), kJson)->status, 400);
    body["config"] = {{"iterations", 3}};
    body["init"] = {0.5};
    EXPECT_EQ(c.Post("/fit", body.dump(), kJson)->status, 409);
    body.erase("init");
    body["target"] = "pc-404";
    EXPECT_EQ(c.Post("/fit", body.dump(), kJson)->status, 404);
}

TEST_F(Service, CancelReportsBestSoFarAndEvaluateStaysResponsive)
{
    const PointCloud target = synthetic_target(4);
    const json body = {{"template", "chair4"},
                       {"target", cloud_to_json(target)},
                       {"config", {{"iterations", 1000000}, {"points", 512}}}};
    const std::string job = json::parse(c.Post("/fit", body.dump(), kJson)->body)["job"];

    json snap;
    for (int i = 0; i < 500; ++i) {
        snap = parse_or_null(c.Get("/jobs/" + job));
        if (snap["iteration"].get<int>() >= 3) break;
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ASSERT_EQ(snap["status"], "running");

    const auto t0 = std::chrono::steady_clock::now();
    auto r = c.Post("/evaluate", json{{"template", "chair4"}}.dump(), kJson);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ASSERT_EQ(r->status, 200);
    EXPECT_LT(seconds, 2.0);

    auto d = c.Delete("/jobs/" + job);
    ASSERT_EQ(d->status, 200);
    const json done = wait_for_job(c, job);
    EXPECT_EQ(done["status"], "cancelled");
    EXPECT_EQ(done["best_values"].size(), demo().n_params());
    const auto trace = done["loss_trace"].get<std::vector<double>>();
    ASSERT_FALSE(trace.empty());
    EXPECT_EQ(done["best_loss"].get<double>(), *std::min_element(trace.begin(), trace.end()));
    EXPECT_TRUE(done["report"]["cancelled"].get<bool>());

    // Finished jobs never move back.
    EXPECT_EQ(json::parse(c.Delete("/jobs/" + job)->body)["status"], "cancelled");
}

TEST_F(Service, MeshDetailsAndAnalysisEndpoints)
{
    auto m = c.Post("/mesh", json{{"template", "chair4"}, {"resolution", 48}}.dump(), kJson);
    ASSERT_EQ(m->status, 200);
    std::istringstream obj(m->body);
    const Mesh mesh = read_obj(obj);
    EXPECT_GE(mesh.triangles.size(), 100u);

    const PointCloud target = synthetic_target(5, 3000);
    const std::string id = json::parse(c.Post("/pointclouds", xyz_text(target), "text/plain")->body)["id"];
    auto d = c.Post("/details/extract", json{{"template", "chair4"}, {"target", id}}.dump(), kJson);
    ASSERT_EQ(d->status, 200);
    const json details = json::parse(d->body)["details"];
    EXPECT_FALSE(details.empty());
    auto m2 = c.Post("/mesh", json{{"template", "chair4"}, {"details", details}, {"resolution", 32}}.dump(), kJson);
    EXPECT_EQ(m2->status, 200);

    auto met = c.Post("/metrics", json{{"template", "chair4"}, {"target", id}, {"samples", 512}}.dump(), kJson);
    ASSERT_EQ(met->status, 200);
    EXPECT_TRUE(json::parse(met->body).contains("surface_cd"));

    const TemplateConfig t = demo();
    const std::vector<double> b(t.n_params(), 1.0);
    const json in = parse_or_null(
        c.Post("/interpolate", json{{"template", "chair4"}, {"b", b}, {"steps", 5}}.dump(), kJson));
    ASSERT_EQ(in["steps"].size(), 5u);
    EXPECT_EQ(in["steps"][0]["values"].get<std::vector<double>>(), default_params(t).values);
    EXPECT_EQ(in["steps"][4]["values"].get<std::vector<double>>(), b);

    const json s1 = parse_or_null(c.Post("/sample", json{{"template", "chair4"}, {"seed", 7}}.dump(), kJson));
    const json s2 = parse_or_null(c.Post("/sample", json{{"template", "chair4"}, {"seed", 7}}.dump(), kJson));
    EXPECT_EQ(s1, s2);

    auto e = c.Post("/expand", json{{"template", "chair4"}, {"target", id}}.dump(), kJson);
    ASSERT_EQ(e->status, 200);
    EXPECT_EQ(json::parse(e->body)["expansion"].size(), t.cuboids.size());
}

TEST_F(Service, AutoTemplateEndpoint)
{
    std::mt19937_64 rng(8);
    json parts = json::array();
    for (const AnnotatedPart& p : testing::synthetic_chair(rng))
        parts.push_back({{"name", p.name},
                         {"center", {p.center.x, p.center.y, p.center.z}},
                         {"axes", {{p.axes[0].x, p.axes[0].y, p.axes[0].z},
                                   {p.axes[1].x, p.axes[1].y, p.axes[1].z},
                                   {p.axes[2].x, p.axes[2].y, p.axes[2].z}}}});
    auto r = c.Post("/autotemplate", json{{"parts", parts}, {"category", "chair"}}.dump(), kJson);
    ASSERT_EQ(r->status, 200);
    const json j = json::parse(r->body);
    const TemplateConfig t = template_from_json(j["template"]);
    EXPECT_EQ(t.category, "chair");
    EXPECT_EQ(t.cuboids.size(), 6u);
    EXPECT_FALSE(j["applied"].empty());
    EXPECT_EQ(c.Post("/autotemplate", json{{"parts", {{{"name", "x"}}}}}.dump(), kJson)->status, 400);
}

TEST_F(Service, AnnotationRoundTripIsByteExact)
{
    const TemplateConfig t = demo();
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(t.n_params());
    for (double& x : v) x = u(rng);
    v[0] = 0.1;
    v[1] = 1.0 / 3.0;
    const json body = {{"template", "chair4"}, {"values", v}, {"provenance", "optimized"}};
    auto put = c.Put("/annotations/chair_0001", body.dump(), kJson);
    ASSERT_EQ(put->status, 200) << put->body;
    EXPECT_EQ(json::parse(put->body)["version"], 1);

    auto get = c.Get("/annotations/chair_0001");
    ASSERT_EQ(get->status, 200);
    const json rec = json::parse(get->body);
    EXPECT_EQ(rec["values"].get<std::vector<double>>(), v);
    EXPECT_EQ(rec["values"].dump(), json(v).dump());
    EXPECT_EQ(rec["provenance"], "optimized");
    EXPECT_EQ(rec["category"], "chair4");
    EXPECT_TRUE(rec.contains("created"));
    EXPECT_TRUE(rec.contains("updated"));

    const json on_disk = json::parse(testing::read_file((dir.path() / "annotations" / "chair_0001.json").string()));
    EXPECT_EQ(on_disk["values"].get<std::vector<double>>(), v);

    const json index = parse_or_null(c.Get("/annotations"));
    ASSERT_EQ(index["objects"].size(), 1u);
    EXPECT_EQ(index["objects"][0]["object"], "chair_0001");
}

TEST_F(Service, AnnotationWithDetails)
{
    const TemplateConfig t = demo();
    Detail d;
    d.views[2].outer = {Ring{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}};
    d.views[2].holes = {Ring{{0.25, 0.25}, {0.25, 0.75}, {0.75, 0.75}, {0.75, 0.25}}};
    const json body = {{"template", "chair4"},
                       {"values", default_params(t).values},
                       {"details", json::array({detail_to_json("back", d)})}};
    ASSERT_EQ(c.Put("/annotations/withdetail", body.dump(), kJson)->status, 200);
    const json rec = parse_or_null(c.Get("/annotations/withdetail"));
    EXPECT_EQ(details_from_json(t, rec["details"])[1], d);

    json bad = body;
    bad["details"][0]["cuboid"] = "armrest";
    auto r = c.Put("/annotations/withdetail", bad.dump(), kJson);
    EXPECT_EQ(r->status, 400);
    EXPECT_NE(r->body.find("details"), std::string::npos);
}

TEST_F(Service, AnnotationValidationNamesTheField)
{
    const TemplateConfig t = demo();
    json body = {{"template", "chair4"}, {"values", {0.5, 0.5}}};
    auto r = c.Put("/annotations/a1", body.dump(), kJson);
    EXPECT_EQ(r->status, 409);
    EXPECT_NE(r->body.find("values"), std::string::npos);

    body = {{"template", "stool"}, {"values", default_params(t).values}};
    r = c.Put("/annotations/a1", body.dump(), kJson);
    EXPECT_EQ(r->status, 400);
    EXPECT_NE(r->body.find("template"), std::string::npos);

    body = {{"template", "chair4"}, {"values", default_params(t).values}, {"provenance", "guessed"}};
    r = c.Put("/annotations/a1", body.dump(), kJson);
    EXPECT_EQ(r->status, 400);
    EXPECT_NE(r->body.find("provenance"), std::string::npos);

    std::vector<double> v = default_params(t).values;
    v[2] = 1.5;
    r = c.Put("/annotations/a1", json{{"template", "chair4"}, {"values", v}}.dump(), kJson);
    EXPECT_EQ(r->status, 400);
    EXPECT_NE(r->body.find("values[2]"), std::string::npos);

    EXPECT_EQ(c.Put("/annotations/bad$id", json{{"template", "chair4"}}.dump(), kJson)->status, 400);
    EXPECT_EQ(c.Put("/annotations/index", json{{"template", "chair4"}}.dump(), kJson)->status, 400);
    EXPECT_FALSE(std::filesystem::exists(dir.path() / "annotations" / "a1.json"));
}

TEST_F(Service, StaleVersionIsRejected)
{
    const TemplateConfig t = demo();
    json body = {{"template", "chair4"}, {"values", default_params(t).values}};
    ASSERT_EQ(json::parse(c.Put("/annotations/shared", body.dump(), kJson)->body)["version"], 1);
    body["version"] = 1;
    ASSERT_EQ(json::parse(c.Put("/annotations/shared", body.dump(), kJson)->body)["version"], 2);
    body["version"] = 1;
    auto r = c.Put("/annotations/shared", body.dump(), kJson);
    EXPECT_EQ(r->status, 409);
    EXPECT_NE(r->body.find("version"), std::string::npos);
    EXPECT_EQ(parse_or_null(c.Get("/annotations/shared"))["version"], 2);
}

TEST_F(Service, ConcurrentSavesOfDifferentObjectsAllPersist)
{
    const TemplateConfig t = demo();
    constexpr int kWriters = 8;
    std::vector<std::thread> threads;
    std::vector<int> status(kWriters, 0);
    for (int k = 0; k < kWriters; ++k) {
        threads.emplace_back([&, k] {
            httplib::Client cl = harness.client();
            std::vector<double> v = default_params(t).values;
            v[0] = double(k) / kWriters;
            const json body = {{"template", "chair4"}, {"values", v}};
            auto r = cl.Put("/annotations/obj_" + std::to_string(k), body.dump(), kJson);
            status[std::size_t(k)] = r ? r->status : -1;
        });
    }
    for (auto& th : threads) th.join();
    for (int s : status) EXPECT_EQ(s, 200);
    for (int k = 0; k < kWriters; ++k) {
        const json rec = parse_or_null(c.Get("/annotations/obj_" + std::to_string(k)));
        EXPECT_EQ(rec["values"][0].get<double>(), double(k) / kWriters);
    }
    EXPECT_EQ(parse_or_null(c.Get("/annotations"))["objects"].size(), std::size_t(kWriters));
    for (const auto& e : std::filesystem::directory_iterator(dir.path() / "annotations"))
        EXPECT_EQ(e.path().string().find(".tmp."), std::string::npos);
}

TEST_F(Service, CorruptRecordErrorNamesTheFile)
{
    const auto path = dir.path() / "annotations" / "broken.json";
    std::ofstream(path) << "{\"template\": \"chair4\", \"values\": [0.5,";
    auto r = c.Get("/annotations/broken");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 500);
    EXPECT_NE(r->body.find("broken.json"), std::string::npos);

    std::ofstream(path, std::ios::trunc) << json{{"template", "chair4"}, {"values", {0.5}}}.dump();
    r = c.Get("/annotations/broken");
    EXPECT_EQ(r->status, 500);
    EXPECT_NE(r->body.find("broken.json"), std::string::npos);
    EXPECT_NE(r->body.find("values"), std::string::npos);
}

TEST(ServiceStore, RecordsSurviveRestart)
{
    testing::TempDir dir("stickform-restart");
    const TemplateConfig t = demo();
    std::string cloud_id;
    {
        testing::ServiceHarness h(dir.path());
        auto c = h.client();
        ASSERT_EQ(c.Put("/annotations/keep", json{{"template", "chair4"}, {"values", default_params(t).values}}.dump(),
                        kJson)
                      ->status,
                  200);
        cloud_id = json::parse(c.Post("/pointclouds", "0 0 0\n1 1 1\n", "text/plain")->body)["id"];
    }
    testing::ServiceHarness h(dir.path());
    auto c = h.client();
    EXPECT_EQ(parse_or_null(c.Get("/annotations/keep"))["values"].get<std::vector<double>>(), default_params(t).values);
    EXPECT_EQ(parse_or_null(c.Get("/pointclouds/" + cloud_id))["points"].size(), 2u);
    const std::string next = json::parse(c.Post("/pointclouds", "0 0 0\n", "text/plain")->body)["id"];
    EXPECT_NE(next, cloud_id);
}

TEST(ServiceUi, StaticBundleIsServed)
{
    testing::TempDir dir("stickform-ui");
    testing::ServiceHarness h(dir.path(), true);
    auto c = h.client();
    auto r = c.Get("/ui/index.html");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 200);
    EXPECT_NE(r->body.find("app.js"), std::string::npos);
    auto js = c.Get("/ui/app.js");
    ASSERT_TRUE(js);
    EXPECT_EQ(js->status, 200);
    for (const char* route : {"/evaluate", "/fit", "/jobs/", "/annotations/", "/pointclouds", "/templates"})
        EXPECT_NE(js->body.find(route), std::string::npos) << route;
}

}  // namespace
}  // namespace stickform
