// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#include "stickform/service/project_store.h"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "stickform/io.h"
#include "stickform/service/errors.h"

namespace stickform::service {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string strip_json_suffix(const std::string& name)
{
    constexpr std::string_view suffix = ".json";
    if (name.size() > suffix.size() && name.ends_with(suffix)) return name.substr(0, name.size() - suffix.size());
    return name;
}

const char* const kProvenances[] = {"optimized", "hand-edited", "mixed"};

}  // namespace

TemplateRegistry::TemplateRegistry(const std::vector<fs::path>& dirs)
{
    for (const fs::path& dir : dirs) {
        std::error_code ec;
        if (!fs::is_directory(dir, ec)) continue;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
            try {
                add(entry.path().stem().string(), parse_template(read_text_file(entry.path())));
            } catch (const Error& e) {
                throw TemplateError(entry.path().string() + ": " + e.what());
            }
        }
    }
}

void TemplateRegistry::add(const std::string& name, TemplateConfig t)
{
    std::unique_lock lock(mutex_);
    templates_[name] = std::move(t);
}

TemplateConfig TemplateRegistry::get(const std::string& name) const
{
    std::shared_lock lock(mutex_);
    auto it = templates_.find(strip_json_suffix(name));
    if (it == templates_.end()) throw NotFoundError("unknown template '" + name + "'");
    return it->second;
}

bool TemplateRegistry::contains(const std::string& name) const
{
    std::shared_lock lock(mutex_);
    return templates_.contains(strip_json_suffix(name));
}

std::vector<std::string> TemplateRegistry::names() const
{
    std::shared_lock lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [name, t] : templates_) out.push_back(name);
    return out;
}

bool valid_object_id(const std::string& id)
{
    if (id.empty() || id.size() > 128 || id.front() == '.') return false;
    for (char c : id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                        c == '-' || c == '.';
        if (!ok) return false;
    }
    return id != "index";
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

ProjectStore::ProjectStore(fs::path root, const TemplateRegistry& templates)
    : root_(std::move(root)), templates_(templates)
{
    fs::create_directories(root_ / "annotations");
    fs::create_directories(root_ / "pointclouds");
    for (const auto& entry : fs::directory_iterator(root_ / "pointclouds")) {
        const std::string stem = entry.path().stem().string();
        if (stem.starts_with("pc-")) {
            try {
                next_cloud_ = std::max<std::uint64_t>(next_cloud_, std::stoull(stem.substr(3)) + 1);
            } catch (const std::exception&) {
            }
        }
    }
}

fs::path ProjectStore::annotation_path(const std::string& object) const
{
    if (!valid_object_id(object)) throw ValidationError("object: invalid id '" + object + "'");
    return root_ / "annotations" / (object + ".json");
}

json ProjectStore::validate_record(const std::string& object, const json& record, const std::string& where) const
{
    auto fail = [&](const std::string& msg) { throw ValidationError(where + msg); };
    if (!record.is_object()) fail("expected a JSON object");
    if (!record.contains("template") || !record["template"].is_string()) fail("template: expected a template name");
    const std::string name = record["template"].get<std::string>();
    if (!templates_.contains(name)) fail("template: unknown template '" + name + "'");
    const TemplateConfig t = templates_.get(name);

    ParameterVector a;
    try {
        a = params_from_json(t, record);
    } catch (const LengthMismatchError& e) {
        throw LengthMismatchError(where + e.what());
    } catch (const ValidationError& e) {
        fail(e.what());
    }
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(a.values[i] >= 0.0 && a.values[i] <= 1.0))
            fail("values[" + std::to_string(i) + "]: outside [0, 1]");

    json out;
    out["object"] = object;
    out["template"] = name;
    out["category"] = t.category;
    out["values"] = record["values"];
    if (record.contains("details") && !record["details"].is_null()) {
        try {
            details_from_json(t, record["details"]);
        } catch (const Error& e) {
            fail(e.what());
        }
        out["details"] = record["details"];
    } else {
        out["details"] = json::array();
    }
    std::string provenance = "hand-edited";
    if (record.contains("provenance")) {
        if (!record["provenance"].is_string()) fail("provenance: expected a string");
        provenance = record["provenance"].get<std::string>();
        if (std::find(std::begin(kProvenances), std::end(kProvenances), provenance) == std::end(kProvenances))
            fail("provenance: expected optimized, hand-edited or mixed");
    }
    out["provenance"] = provenance;
    for (const char* key : {"version", "created", "updated"})
        if (record.contains(key)) out[key] = record[key];
    return out;
}

json ProjectStore::save_annotation(const std::string& object, const json& body)
{
    const fs::path path = annotation_path(object);
    json record = validate_record(object, body, "");
    if (record.contains("version") && !record["version"].is_number_integer())
        throw ValidationError("version: expected an integer");

    std::lock_guard lock(write_mutex_);
    std::int64_t stored_version = 0;
    std::string created = utc_timestamp();
    std::error_code ec;
    if (fs::exists(path, ec)) {
        try {
            const json old = json::parse(read_text_file(path));
            stored_version = old.value("version", std::int64_t{0});
            created = old.value("created", created);
        } catch (const json::exception&) {
            // An unreadable record is replaced by the new one.
        }
    }
    if (record.contains("version") && record["version"].get<std::int64_t>() != stored_version)
        throw ConflictError("version: record '" + object + "' is at version " + std::to_string(stored_version) +
                            ", request was based on version " +
                            std::to_string(record["version"].get<std::int64_t>()));
    record["version"] = stored_version + 1;
    record["created"] = created;
    record["updated"] = utc_timestamp();
    write_file_atomic(path, record.dump(2) + "\n");
    write_index_locked();
    return record;
}

json ProjectStore::load_annotation(const std::string& object) const
{
    const fs::path path = annotation_path(object);
    std::error_code ec;
    if (!fs::exists(path, ec)) throw NotFoundError("unknown annotation '" + object + "'");
    const std::string where = path.string() + ": ";
    json record;
    try {
        record = json::parse(read_text_file(path));
    } catch (const std::exception& e) {
        throw StoreError(where + e.what());
    }
    try {
        return validate_record(object, record, where);
    } catch (const Error& e) {
        throw StoreError(e.what());
    }
}

void ProjectStore::write_index_locked() const
{
    json objects = json::array();
    for (const auto& entry : fs::directory_iterator(root_ / "annotations")) {
        const fs::path& p = entry.path();
        if (p.extension() != ".json" || p.stem() == "index") continue;
        json item = {{"object", p.stem().string()}};
        try {
            const json r = json::parse(read_text_file(p));
            for (const char* key : {"template", "provenance", "version", "updated"})
                if (r.contains(key)) item[key] = r[key];
        } catch (const std::exception&) {
            item["error"] = "unreadable";
        }
        objects.push_back(item);
    }
    std::sort(objects.begin(), objects.end(),
              [](const json& a, const json& b) { return a["object"].get<std::string>() < b["object"].get<std::string>(); });
    write_file_atomic(root_ / "annotations" / "index.json", json{{"objects", objects}}.dump(2) + "\n");
}

json ProjectStore::index() const
{
    std::lock_guard lock(write_mutex_);
    const fs::path path = root_ / "annotations" / "index.json";
    std::error_code ec;
    if (!fs::exists(path, ec)) write_index_locked();
    try {
        return json::parse(read_text_file(path));
    } catch (const std::exception& e) {
        throw StoreError(path.string() + ": " + e.what());
    }
}

std::string ProjectStore::add_pointcloud(const PointCloud& p)
{
    if (p.points.empty()) throw ValidationError("point cloud: no points");
    std::lock_guard lock(cloud_mutex_);
    const std::string id = "pc-" + std::to_string(next_cloud_++);
    std::ostringstream text;
    write_xyz(text, p);
    write_file_atomic(root_ / "pointclouds" / (id + ".xyz"), text.str());
    clouds_[id] = p;
    return id;
}

PointCloud ProjectStore::pointcloud(const std::string& id) const
{
    {
        std::lock_guard lock(cloud_mutex_);
        auto it = clouds_.find(id);
        if (it != clouds_.end()) return it->second;
    }
    if (!valid_object_id(id)) throw NotFoundError("unknown point cloud '" + id + "'");
    const fs::path path = root_ / "pointclouds" / (id + ".xyz");
    std::error_code ec;
    if (!fs::exists(path, ec)) throw NotFoundError("unknown point cloud '" + id + "'");
    try {
        return load_point_cloud(path);
    } catch (const Error& e) {
        throw StoreError(path.string() + ": " + e.what());
    }
}

}  // namespace stickform::service
