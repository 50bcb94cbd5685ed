// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "stickform/auto_template.h"
#include "stickform/io.h"
#include "stickform/marching_cubes.h"
#include "stickform/metrics.h"
#include "stickform/service/workbench.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace stickform;

namespace {

struct Options {
    std::string template_arg;
    std::string params = "defaults";
    std::string pointcloud;
    std::string out;
    std::string details;
    int resolution = 64;
    int iterations = 1000;
    std::uint64_t seed = 0;
    bool json_output = false;

    // fit
    double step = 0.01;
    std::string rule = "adam";
    std::size_t points = 2048;
    double final_step_fraction = 0.1;
    // interp
    std::string to_params;
    int steps = 11;
    // sample
    double spread = 0.2;
    int count = 1;
    // metrics
    std::string solid;
    std::size_t samples = 4096;
    // autotemplate
    std::string annotation;
    std::string category = "auto";
    // serve
    std::string project;
    std::string host = "127.0.0.1";
    int port = 8080;
    std::vector<std::string> template_dirs;
    std::string ui_dir;
    std::size_t workers = 1;
};

std::vector<fs::path> default_template_dirs()
{
    std::vector<fs::path> dirs;
#ifdef STICKFORM_TEMPLATE_DIR
    dirs.emplace_back(STICKFORM_TEMPLATE_DIR);
#endif
    if (const char* p = std::getenv(service::kProjectEnv)) dirs.push_back(fs::path(p) / "templates");
    return dirs;
}

TemplateConfig load_template(const std::string& arg)
{
    if (arg.empty()) throw ValidationError("--template is required");
    if (fs::exists(arg)) return parse_template(read_text_file(arg));
    for (const fs::path& dir : default_template_dirs()) {
        fs::path p = dir / arg;
        if (p.extension() != ".json") p += ".json";
        if (fs::exists(p)) return parse_template(read_text_file(p));
    }
    throw ValidationError("template not found: " + arg);
}

ParameterVector load_params(const TemplateConfig& t, const std::string& arg)
{
    if (arg.empty() || arg == "defaults") return default_params(t);
    json j;
    try {
        j = json::parse(fs::exists(arg) ? read_text_file(arg) : arg);
    } catch (const json::parse_error& e) {
        throw ValidationError("--params: " + std::string(e.what()));
    }
    if (j.is_array()) j = json{{"values", j}};
    return checked_params(t, params_from_json(t, j).values);
}

PointCloud load_cloud(const std::string& path)
{
    if (path.empty()) throw ValidationError("--pointcloud is required");
    return load_point_cloud(path);
}

std::vector<Detail> load_details(const TemplateConfig& t, const std::string& path)
{
    if (path.empty()) return std::vector<Detail>(t.cuboids.size());
    return details_from_json(t, json::parse(read_text_file(path)));
}

void emit(const Options& o, const std::string& text)
{
    if (o.out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
    } else {
        write_file_atomic(o.out, text.back() == '\n' ? text : text + "\n");
    }
}

void emit_json(const Options& o, const json& j) { emit(o, j.dump(2)); }

std::string structure_table(const StructureInstance& s)
{
    std::ostringstream out;
    out << std::setprecision(6) << std::fixed;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Stick& st = s.sticks[i];
        out << std::left << std::setw(14) << s.names[i] << (s.alive[i] ? "alive " : "dead  ") << "p1 (" << st.p1.x
            << ", " << st.p1.y << ", " << st.p1.z << ")  p2 (" << st.p2.x << ", " << st.p2.y << ", " << st.p2.z
            << ")  w " << st.w << "  l " << st.l << '\n';
    }
    return out.str();
}

int run_eval(const Options& o)
{
    const TemplateConfig t = load_template(o.template_arg);
    const ParameterVector a = load_params(t, o.params);
    const StructureInstance s = evaluate(t, a);
    if (o.json_output || !o.out.empty()) {
        json j = structure_to_json(s);
        j["values"] = a.values;
        emit_json(o, j);
    } else {
        emit(o, structure_table(s));
    }
    return 0;
}

int run_fit(const Options& o)
{
    const TemplateConfig t = load_template(o.template_arg);
    const ParameterVector init = load_params(t, o.params);
    const PointCloud target = load_cloud(o.pointcloud);
    FitConfig cfg;
    cfg.iterations = o.iterations;
    cfg.seed = o.seed;
    cfg.step_size = o.step;
    cfg.rule = step_rule_from_string(o.rule);
    cfg.points_per_structure = o.points;
    cfg.final_step_fraction = o.final_step_fraction;
    const FitReport r = optimize(t, init, target, cfg);
    if (o.json_output) {
        json j = fit_report_to_json(r);
        j["category"] = t.category;
        j["values"] = r.best_params.values;
        emit_json(o, j);
    } else if (!o.out.empty()) {
        emit_json(o, params_to_json(t, r.best_params));
        std::cerr << "best loss " << r.best_loss << " after " << r.loss_trace.size() << " iterations\n";
    } else {
        std::cout << "best loss " << r.best_loss << " after " << r.loss_trace.size() << " iterations ("
                  << r.wall_seconds << " s)\n"
                  << params_to_json(t, r.best_params).dump() << '\n';
    }
    return 0;
}

int run_details(const Options& o)
{
    const TemplateConfig t = load_template(o.template_arg);
    const StructureInstance s = evaluate(t, load_params(t, o.params));
    emit_json(o, json{{"details", details_to_json(s, extract_details(s, load_cloud(o.pointcloud)))}});
    return 0;
}

int run_mesh(const Options& o)
{
    const TemplateConfig t = load_template(o.template_arg);
    const StructureInstance s = evaluate(t, load_params(t, o.params));
    GridOptions g;
    g.resolution = o.resolution;
    const Mesh m = mesh_structure(s, load_details(t, o.details), g);
    std::ostringstream text;
    write_obj(text, m);
    emit(o, text.str());
    if (o.json_output)
        std::cerr << json{{"vertices", m.vertices.size()}, {"triangles", m.triangles.size()}}.dump() << '\n';
    return 0;
}

int run_metrics(const Options& o)
{
    const TemplateConfig t = load_template(o.template_arg);
    const StructureInstance s = evaluate(t, load_params(t, o.params));
    const PointCloud target = load_cloud(o.pointcloud);
    std::optional<PointCloud> solid;
    if (!o.solid.empty()) solid = load_point_cloud(o.solid);
    MetricsOptions m;
    m.samples = o.samples;
    m.seed = o.seed;
    m.resolution = o.resolution;
    const MetricsReport r = compute_metrics(s, load_details(t, o.details), target, solid ? &*solid : nullptr, m);
    if (o.json_output) {
        emit_json(o, to_json(r));
    } else {
        std::ostringstream csv;
        write_metrics_csv(csv, {{fs::path(o.pointcloud).stem().string(), r}});
        emit(o, csv.str());
    }
    return 0;
}

int run_interp(const Options& o)
{
    const TemplateConfig t = load_template(o.template_arg);
    const ParameterVector a = load_params(t, o.params);
    const ParameterVector b = load_params(t, o.to_params);
    if (o.steps < 2) throw ValidationError("--steps must be at least 2");
    json out = json::array();
    for (int i = 0; i < o.steps; ++i) {
        const double ti = double(i) / double(o.steps - 1);
        out.push_back({{"t", ti}, {"values", interpolate_params(a, b, ti).values}});
    }
    emit_json(o, json{{"category", t.category}, {"steps", out}});
    return 0;
}

int run_expand(const Options& o)
{
    const TemplateConfig t = load_template(o.template_arg);
    const StructureInstance s = evaluate(t, load_params(t, o.params));
    emit_json(o, expansion_to_json(expand(s, label_points(s, load_cloud(o.pointcloud)))));
    return 0;
}

int run_sample(const Options& o)
{
    const TemplateConfig t = load_template(o.template_arg);
    if (o.count < 1) throw ValidationError("--count must be positive");
    json out = json::array();
    for (int i = 0; i < o.count; ++i) out.push_back(random_sample(t, o.seed + std::uint64_t(i), o.spread).values);
    if (o.count == 1)
        emit_json(o, json{{"category", t.category}, {"values", out[0]}});
    else
        emit_json(o, json{{"category", t.category}, {"samples", out}});
    return 0;
}

int run_autotemplate(const Options& o)
{
    if (o.annotation.empty()) throw ValidationError("--annotation is required");
    AutoTemplateOptions opt;
    opt.category = o.category;
    const AutoTemplate at = auto_template(parse_annotation(read_text_file(o.annotation)), opt);
    emit_json(o, at.document);
    if (!o.out.empty())
        std::cerr << at.config.cuboids.size() << " cuboids, " << at.config.n_params() << " parameters, "
                  << at.applied.size() << " relations\n";
    return 0;
}

int run_serve(const Options& o)
{
    service::WorkbenchConfig cfg;
    std::string project = o.project;
    if (project.empty())
        if (const char* env = std::getenv(service::kProjectEnv)) project = env;
    if (project.empty()) throw ValidationError("--project or " + std::string(service::kProjectEnv) + " is required");
    cfg.project_dir = project;
#ifdef STICKFORM_TEMPLATE_DIR
    cfg.template_dirs.emplace_back(STICKFORM_TEMPLATE_DIR);
#endif
    for (const auto& d : o.template_dirs) cfg.template_dirs.emplace_back(d);
    if (!o.ui_dir.empty()) {
        cfg.ui_dir = fs::path(o.ui_dir);
    } else {
#ifdef STICKFORM_UI_DIR
        cfg.ui_dir = fs::path(STICKFORM_UI_DIR);
#endif
    }
    cfg.fit_workers = o.workers;
    service::Workbench wb(cfg);
    std::cerr << "serving " << project << " on http://" << o.host << ":" << o.port << '\n';
    service::serve(wb, o.host, o.port);
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"stickform: cuboid templates, fitting, details and meshes"};
    app.require_subcommand(1);
    Options o;

    auto add_template = [&](CLI::App* c) { c->add_option("-t,--template", o.template_arg, "template file or name")->required(); };
    auto add_params = [&](CLI::App* c) {
        c->add_option("-p,--params", o.params, "\"defaults\", a params JSON file or an inline JSON list");
    };
    auto add_common = [&](CLI::App* c) {
        c->add_option("-o,--out", o.out, "output file (stdout when absent)");
        c->add_flag("--json", o.json_output, "machine-readable JSON output");
    };

    auto* eval = app.add_subcommand("eval", "evaluate a template");
    add_template(eval);
    add_params(eval);
    add_common(eval);

    auto* fit = app.add_subcommand("fit", "fit parameters to a point cloud");
    add_template(fit);
    add_params(fit);
    add_common(fit);
    fit->add_option("--pointcloud", o.pointcloud, "target cloud (.xyz or .bin)")->required();
    fit->add_option("--iterations", o.iterations)->check(CLI::PositiveNumber);
    fit->add_option("--seed", o.seed);
    fit->add_option("--step", o.step)->check(CLI::PositiveNumber);
    fit->add_option("--rule", o.rule)->check(CLI::IsMember({"gradient", "momentum", "adam"}));
    fit->add_option("--points", o.points, "samples per structure")->check(CLI::PositiveNumber);
    fit->add_option("--final-step-fraction", o.final_step_fraction)->check(CLI::Range(1e-6, 1.0));

    auto* details = app.add_subcommand("details", "extract three-view details");
    add_template(details);
    add_params(details);
    add_common(details);
    details->add_option("--pointcloud", o.pointcloud)->required();

    auto* mesh = app.add_subcommand("mesh", "recover a mesh as OBJ");
    add_template(mesh);
    add_params(mesh);
    add_common(mesh);
    mesh->add_option("--details", o.details, "details JSON");
    mesh->add_option("--resolution", o.resolution)->check(CLI::Range(8, 512));

    auto* metrics = app.add_subcommand("metrics", "reconstruction and plausibility metrics");
    add_template(metrics);
    add_params(metrics);
    add_common(metrics);
    metrics->add_option("--pointcloud", o.pointcloud, "target surface points")->required();
    metrics->add_option("--solid", o.solid, "target solid points");
    metrics->add_option("--details", o.details);
    metrics->add_option("--samples", o.samples)->check(CLI::PositiveNumber);
    metrics->add_option("--seed", o.seed);
    metrics->add_option("--resolution", o.resolution)->check(CLI::Range(8, 512));

    auto* interp = app.add_subcommand("interp", "interpolate two parameter vectors");
    add_template(interp);
    add_params(interp);
    add_common(interp);
    interp->add_option("--to", o.to_params, "second parameter vector")->required();
    interp->add_option("--steps", o.steps);

    auto* expand_cmd = app.add_subcommand("expand", "grow cuboids to cover labeled points");
    add_template(expand_cmd);
    add_params(expand_cmd);
    add_common(expand_cmd);
    expand_cmd->add_option("--pointcloud", o.pointcloud)->required();

    auto* sample = app.add_subcommand("sample", "random parameter vectors around the defaults");
    add_template(sample);
    add_common(sample);
    sample->add_option("--seed", o.seed);
    sample->add_option("--spread", o.spread)->check(CLI::Range(0.0, 1.0));
    sample->add_option("--count", o.count);

    auto* autotemplate = app.add_subcommand("autotemplate", "template from an annotated object");
    add_common(autotemplate);
    autotemplate->add_option("--annotation", o.annotation, "annotation JSON")->required();
    autotemplate->add_option("--category", o.category);

    auto* serve = app.add_subcommand("serve", "run the HTTP service");
    serve->add_option("--project", o.project, "project directory (default: $STRUCT_TEMPLATE_PROJECT)");
    serve->add_option("--host", o.host);
    serve->add_option("--port", o.port)->check(CLI::Range(0, 65535));
    serve->add_option("--templates", o.template_dirs, "extra template directories");
    serve->add_option("--ui", o.ui_dir, "static UI directory");
    serve->add_option("--workers", o.workers, "fit worker threads")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*eval) return run_eval(o);
        if (*fit) return run_fit(o);
        if (*details) return run_details(o);
        if (*mesh) return run_mesh(o);
        if (*metrics) return run_metrics(o);
        if (*interp) return run_interp(o);
        if (*expand_cmd) return run_expand(o);
        if (*sample) return run_sample(o);
        if (*autotemplate) return run_autotemplate(o);
        if (*serve) return run_serve(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
