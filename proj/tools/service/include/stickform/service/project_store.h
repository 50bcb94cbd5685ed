// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stickform/cuboid.h"
#include "stickform/template.h"

namespace stickform::service {

/// Named templates: every *.json in the search directories, keyed by file
/// stem. Later directories win on name clashes.
class TemplateRegistry {
  public:
    TemplateRegistry() = default;
    explicit TemplateRegistry(const std::vector<std::filesystem::path>& dirs);

    void add(const std::string& name, TemplateConfig t);
    /// Throws NotFoundError. Accepts the name with or without ".json".
    TemplateConfig get(const std::string& name) const;
    bool contains(const std::string& name) const;
    std::vector<std::string> names() const;

  private:
    mutable std::shared_mutex mutex_;
    std::map<std::string, TemplateConfig> templates_;
};

bool valid_object_id(const std::string& id);

/// Current time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

/// Annotation records under <root>/annotations/<object>.json plus an index at
/// <root>/annotations/index.json, and uploaded clouds under
/// <root>/pointclouds/<id>.xyz. Every file is replaced atomically.
class ProjectStore {
  public:
    ProjectStore(std::filesystem::path root, const TemplateRegistry& templates);

    const std::filesystem::path& root() const { return root_; }

    /// Validates `body` and writes the record. A "version" in the body must
    /// equal the stored version (ConflictError otherwise); the stored version
    /// then increments. Returns the stored record.
    nlohmann::json save_annotation(const std::string& object, const nlohmann::json& body);
    /// Reads and validates the stored record; StoreError names the file.
    nlohmann::json load_annotation(const std::string& object) const;
    nlohmann::json index() const;

    std::string add_pointcloud(const PointCloud& p);
    PointCloud pointcloud(const std::string& id) const;

  private:
    std::filesystem::path annotation_path(const std::string& object) const;
    nlohmann::json validate_record(const std::string& object, const nlohmann::json& record,
                                   const std::string& where) const;
    void write_index_locked() const;

    std::filesystem::path root_;
    const TemplateRegistry& templates_;
    mutable std::mutex write_mutex_;
    mutable std::mutex cloud_mutex_;
    std::map<std::string, PointCloud> clouds_;
    std::uint64_t next_cloud_ = 1;
};

}  // namespace stickform::service
