// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#include "stickform/service/workbench.h"

#include <httplib.h>

#include <sstream>

#include "stickform/auto_template.h"
#include "stickform/detail.h"
#include "stickform/io.h"
#include "stickform/marching_cubes.h"
#include "stickform/metrics.h"
#include "stickform/service/errors.h"

namespace stickform::service {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kSlotNames[8] = {"x1", "y1", "z1", "x2", "y2", "z2", "w", "l"};

std::vector<fs::path> template_search_path(const WorkbenchConfig& c)
{
    std::vector<fs::path> dirs = c.template_dirs;
    dirs.push_back(c.project_dir / "templates");
    return dirs;
}

template <class T>
T field(const json& body, const char* key, T fallback)
{
    if (!body.contains(key) || body[key].is_null()) return fallback;
    try {
        return body[key].get<T>();
    } catch (const json::exception&) {
        throw ValidationError(std::string(key) + ": wrong type");
    }
}

void require_object(const json& body)
{
    if (!body.is_object()) throw ValidationError("body: expected a JSON object");
}

int slot_index(const std::string& name)
{
    for (int k = 0; k < 8; ++k)
        if (name == kSlotNames[k]) return k;
    return -1;
}

}  // namespace

Workbench::Workbench(WorkbenchConfig config)
    : config_(std::move(config)),
      templates_(template_search_path(config_)),
      store_(config_.project_dir, templates_),
      jobs_(config_.fit_workers)
{
}

TemplateConfig Workbench::resolve_template(const json& body) const
{
    require_object(body);
    if (!body.contains("template")) throw ValidationError("template: missing");
    const json& t = body["template"];
    if (t.is_string()) return templates_.get(t.get<std::string>());
    if (t.is_object()) {
        try {
            return template_from_json(t);
        } catch (const Error& e) {
            throw ValidationError(std::string("template: ") + e.what());
        }
    }
    throw ValidationError("template: expected a name or a template document");
}

ParameterVector Workbench::resolve_values(const TemplateConfig& t, const json& body, const char* key) const
{
    if (!body.contains(key) || body[key].is_null() || body[key] == "defaults") return default_params(t);
    try {
        return checked_params(t, params_from_json(t, json{{"values", body[key]}}).values);
    } catch (const LengthMismatchError& e) {
        throw LengthMismatchError(std::string(key) + ": " + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError(std::string(key) + ": " + e.what());
    }
}

PointCloud Workbench::resolve_cloud(const json& body, const char* key) const
{
    if (!body.contains(key)) throw ValidationError(std::string(key) + ": missing");
    const json& v = body[key];
    if (v.is_string()) return store_.pointcloud(v.get<std::string>());
    try {
        return cloud_from_json(v);
    } catch (const ValidationError& e) {
        throw ValidationError(std::string(key) + ": " + e.what());
    }
}

json Workbench::list_templates() const
{
    json out = json::array();
    for (const std::string& name : templates_.names()) {
        const TemplateConfig t = templates_.get(name);
        out.push_back({{"name", name},
                       {"category", t.category},
                       {"cuboids", t.cuboids.size()},
                       {"parameters", t.n_params()}});
    }
    return {{"templates", out}};
}

json Workbench::describe_template(const std::string& name) const
{
    const TemplateConfig t = templates_.get(name);
    const ParameterVector defaults = default_params(t);
    json params = json::array();
    for (std::size_t c = 0; c < t.cuboids.size(); ++c) {
        for (int k = 0; k < 8; ++k) {
            const SlotSpec& s = t.cuboids[c].slots[std::size_t(k)];
            const auto idx = s.param_index();
            if (!idx) continue;
            json p = {{"index", *idx},
                      {"name", t.param_names[std::size_t(*idx)]},
                      {"cuboid", t.cuboids[c].name},
                      {"slot", kSlotNames[k]},
                      {"default", defaults.values[std::size_t(*idx)]}};
            if (s.range) {
                p["kind"] = "range";
                p["min"] = s.c();
                p["max"] = s.c() + s.r();
                p["default_slot"] = s.range->def + s.constant;
            } else {
                p["kind"] = "line";
            }
            p["relation_bound"] = s.relate.has_value() || s.line.has_value() || s.copy.has_value();
            params.push_back(p);
        }
    }
    std::sort(params.begin(), params.end(),
              [](const json& a, const json& b) { return a["index"].get<int>() < b["index"].get<int>(); });
    return {{"name", name},
            {"category", t.category},
            {"document", template_to_json(t)},
            {"param_names", t.param_names},
            {"defaults", defaults.values},
            {"parameters", params}};
}

json Workbench::evaluate(const json& body) const
{
    const TemplateConfig t = resolve_template(body);
    const ParameterVector a = resolve_values(t, body, "values");
    json out = structure_to_json(stickform::evaluate(t, a));
    out["values"] = a.values;
    out["param_names"] = t.param_names;
    return out;
}

json Workbench::solve_slots(const json& body) const
{
    const TemplateConfig t = resolve_template(body);
    ParameterVector a = resolve_values(t, body, "values");
    const json slots = field<json>(body, "slots", json::object());
    if (!slots.is_object()) throw ValidationError("slots: expected {\"cuboid.slot\": value}");
    for (const auto& [key, v] : slots.items()) {
        const auto dot = key.find('.');
        const int c = dot == std::string::npos ? -1 : t.cuboid_index(key.substr(0, dot));
        const int k = dot == std::string::npos ? -1 : slot_index(key.substr(dot + 1));
        if (c < 0 || k < 0) throw ValidationError("slots." + key + ": unknown slot");
        if (!v.is_number()) throw ValidationError("slots." + key + ": expected a number");
        const SlotSpec& s = t.cuboids[std::size_t(c)].slots[std::size_t(k)];
        if (!s.range || s.relate || s.line || s.copy)
            throw ConflictError("slots." + key + ": slot is bound by a relation and cannot be set directly");
        const double x = (v.get<double>() - s.c()) / s.r();
        if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("slots." + key + ": value outside the slot range");
        a.values[std::size_t(s.range->param)] = x;
    }
    json out = structure_to_json(stickform::evaluate(t, a));
    out["values"] = a.values;
    return out;
}

json Workbench::start_fit(const json& body)
{
    FitRequest req;
    req.config = resolve_template(body);
    req.init = resolve_values(req.config, body, "init");
    req.target = resolve_cloud(body, "target");
    req.fit = fit_config_from_json(field<json>(body, "config", json()));
    const std::string id = jobs_.submit(std::move(req));
    return {{"job", id}, {"status", to_string(jobs_.status(id))}};
}

json Workbench::extract_details(const json& body) const
{
    const TemplateConfig t = resolve_template(body);
    const StructureInstance s = stickform::evaluate(t, resolve_values(t, body, "values"));
    const PointCloud target = resolve_cloud(body, "target");
    DetailOptions opt;
    if (body.contains("alpha") && !body["alpha"].is_null()) opt.alpha = field<double>(body, "alpha", 0.0);
    opt.min_points = field<std::size_t>(body, "min_points", opt.min_points);
    return {{"details", details_to_json(s, stickform::extract_details(s, target, opt))}};
}

std::string Workbench::mesh(const json& body) const
{
    const TemplateConfig t = resolve_template(body);
    const StructureInstance s = stickform::evaluate(t, resolve_values(t, body, "values"));
    const std::vector<Detail> details =
        body.contains("details") ? details_from_json(t, body["details"]) : std::vector<Detail>(t.cuboids.size());
    GridOptions opt;
    opt.resolution = field<int>(body, "resolution", 64);
    if (opt.resolution < 8 || opt.resolution > 512) throw ValidationError("resolution: expected 8..512");
    std::ostringstream out;
    write_obj(out, mesh_structure(s, details, opt));
    return out.str();
}

json Workbench::metrics(const json& body) const
{
    const TemplateConfig t = resolve_template(body);
    const StructureInstance s = stickform::evaluate(t, resolve_values(t, body, "values"));
    const std::vector<Detail> details =
        body.contains("details") ? details_from_json(t, body["details"]) : std::vector<Detail>(t.cuboids.size());
    const PointCloud target = resolve_cloud(body, "target");
    std::optional<PointCloud> solid;
    if (body.contains("target_solid")) solid = resolve_cloud(body, "target_solid");
    MetricsOptions opt;
    opt.samples = field<std::size_t>(body, "samples", opt.samples);
    opt.seed = field<std::uint64_t>(body, "seed", opt.seed);
    opt.resolution = field<int>(body, "resolution", opt.resolution);
    return to_json(compute_metrics(s, details, target, solid ? &*solid : nullptr, opt));
}

json Workbench::interpolate(const json& body) const
{
    const TemplateConfig t = resolve_template(body);
    const ParameterVector a = resolve_values(t, body, "a");
    const ParameterVector b = resolve_values(t, body, "b");
    json ts = json::array();
    if (body.contains("steps")) {
        const int steps = field<int>(body, "steps", 0);
        if (steps < 2 || steps > 10000) throw ValidationError("steps: expected 2..10000");
        for (int i = 0; i < steps; ++i) ts.push_back(double(i) / double(steps - 1));
    } else {
        ts.push_back(field<double>(body, "t", 0.5));
    }
    json frames = json::array();
    for (const json& tj : ts) {
        const ParameterVector p = interpolate_params(a, b, tj.get<double>());
        frames.push_back({{"t", tj}, {"values", p.values}});
    }
    return {{"steps", frames}};
}

json Workbench::sample(const json& body) const
{
    const TemplateConfig t = resolve_template(body);
    const auto seed = field<std::uint64_t>(body, "seed", 0);
    const double spread = field<double>(body, "spread", 0.2);
    const int count = field<int>(body, "count", 1);
    if (count < 1 || count > 10000) throw ValidationError("count: expected 1..10000");
    json out = json::array();
    for (int i = 0; i < count; ++i) out.push_back(random_sample(t, seed + std::uint64_t(i), spread).values);
    return {{"samples", out}};
}

json Workbench::expand(const json& body) const
{
    const TemplateConfig t = resolve_template(body);
    const StructureInstance s = stickform::evaluate(t, resolve_values(t, body, "values"));
    const PointCloud target = resolve_cloud(body, "target");
    return expansion_to_json(stickform::expand(s, label_points(s, target)));
}

json Workbench::auto_template(const json& body) const
{
    AutoTemplateOptions opt;
    opt.category = field<std::string>(body, "category", opt.category);
    opt.free_range_fraction = field<double>(body, "free_range_fraction", opt.free_range_fraction);
    const AutoTemplate at = stickform::auto_template(annotation_from_json(body), opt);
    json applied = json::array();
    for (const RelationFinding& f : at.applied) {
        static const char* kinds[] = {"self_symmetry", "pair_symmetry", "joint"};
        applied.push_back({{"kind", kinds[int(f.kind)]}, {"part", f.part}, {"other", f.other}, {"residual", f.residual}});
    }
    return {{"template", at.document}, {"applied", applied}};
}

json Workbench::upload_pointcloud(const std::string& xyz_text)
{
    std::istringstream in(xyz_text);
    const PointCloud p = read_xyz(in);
    const std::string id = store_.add_pointcloud(p);
    return {{"id", id}, {"points", p.points.size()}};
}

int status_for(const std::exception& e)
{
    if (dynamic_cast<const NotFoundError*>(&e)) return 404;
    if (dynamic_cast<const ConflictError*>(&e)) return 409;
    if (dynamic_cast<const LengthMismatchError*>(&e)) return 409;
    if (dynamic_cast<const ValidationError*>(&e)) return 400;
    if (dynamic_cast<const TemplateError*>(&e)) return 400;
    if (dynamic_cast<const json::exception*>(&e)) return 400;
    return 500;
}

namespace {

void send_json(httplib::Response& res, const json& body, int status = 200)
{
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const std::exception& e)
{
    const int status = status_for(e);
    send_json(res, {{"error", e.what()}, {"status", status}}, status);
}

json parse_body(const httplib::Request& req)
{
    if (req.body.empty()) return json::object();
    try {
        return json::parse(req.body);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("body: malformed JSON: ") + e.what());
    }
}

template <class F>
httplib::Server::Handler guarded(F f)
{
    return [f](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const std::exception& e) {
            send_error(res, e);
        }
    };
}

}  // namespace

void Workbench::install(httplib::Server& server)
{
    server.Get("/health", [](const httplib::Request&, httplib::Response& res) { send_json(res, {{"status", "ok"}}); });
    server.Get("/templates", guarded([this](const auto&, auto& res) { send_json(res, list_templates()); }));
    server.Get(R"(/templates/([^/]+))",
               guarded([this](const auto& req, auto& res) { send_json(res, describe_template(req.matches[1])); }));

    auto post_json = [&](const char* path, json (Workbench::*fn)(const json&) const) {
        server.Post(path, guarded([this, fn](const auto& req, auto& res) { send_json(res, (this->*fn)(parse_body(req))); }));
    };
    post_json("/evaluate", &Workbench::evaluate);
    post_json("/solve", &Workbench::solve_slots);
    post_json("/details/extract", &Workbench::extract_details);
    post_json("/metrics", &Workbench::metrics);
    post_json("/interpolate", &Workbench::interpolate);
    post_json("/sample", &Workbench::sample);
    post_json("/expand", &Workbench::expand);
    post_json("/autotemplate", &Workbench::auto_template);

    server.Post("/mesh", guarded([this](const auto& req, auto& res) {
        res.set_content(mesh(parse_body(req)), "model/obj");
    }));
    server.Post("/fit", guarded([this](const auto& req, auto& res) { send_json(res, start_fit(parse_body(req)), 202); }));
    server.Get("/jobs", guarded([this](const auto&, auto& res) { send_json(res, {{"jobs", jobs_.ids()}}); }));
    server.Get(R"(/jobs/([^/]+))",
               guarded([this](const auto& req, auto& res) { send_json(res, jobs_.snapshot(req.matches[1])); }));
    server.Delete(R"(/jobs/([^/]+))",
                  guarded([this](const auto& req, auto& res) { send_json(res, jobs_.cancel(req.matches[1])); }));

    server.Post("/pointclouds", guarded([this](const auto& req, auto& res) {
        send_json(res, upload_pointcloud(req.body), 201);
    }));
    server.Get(R"(/pointclouds/([^/]+))", guarded([this](const auto& req, auto& res) {
        const std::string id = req.matches[1];
        send_json(res, {{"id", id}, {"points", cloud_to_json(store_.pointcloud(id))}});
    }));

    server.Get("/annotations", guarded([this](const auto&, auto& res) { send_json(res, store_.index()); }));
    server.Get(R"(/annotations/([^/]+))",
               guarded([this](const auto& req, auto& res) { send_json(res, store_.load_annotation(req.matches[1])); }));
    server.Put(R"(/annotations/([^/]+))", guarded([this](const auto& req, auto& res) {
        send_json(res, store_.save_annotation(req.matches[1], parse_body(req)));
    }));

    if (config_.ui_dir && fs::is_directory(*config_.ui_dir)) {
        server.set_mount_point("/ui", config_.ui_dir->string());
        server.Get("/", [](const httplib::Request&, httplib::Response& res) { res.set_redirect("/ui/index.html"); });
    }
}

void serve(Workbench& workbench, const std::string& host, int port)
{
    httplib::Server server;
    workbench.install(server);
    if (!server.listen(host, port)) throw Error("cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace stickform::service
