// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stickform/service/job_manager.h"
#include "stickform/service/project_store.h"

namespace httplib {
class Server;
}

namespace stickform::service {

inline constexpr const char* kProjectEnv = "STRUCT_TEMPLATE_PROJECT";

struct WorkbenchConfig {
    std::filesystem::path project_dir;
    std::vector<std::filesystem::path> template_dirs;  ///< project templates/ is appended
    std::optional<std::filesystem::path> ui_dir;
    std::size_t fit_workers = 1;
};

/// The HTTP API. Request handlers take and return JSON and are callable
/// without a server; `install` binds them to routes.
class Workbench {
  public:
    explicit Workbench(WorkbenchConfig config);

    const TemplateRegistry& templates() const { return templates_; }
    ProjectStore& store() { return store_; }
    JobManager& jobs() { return jobs_; }

    nlohmann::json list_templates() const;
    nlohmann::json describe_template(const std::string& name) const;
    nlohmann::json evaluate(const nlohmann::json& body) const;
    nlohmann::json solve_slots(const nlohmann::json& body) const;
    nlohmann::json start_fit(const nlohmann::json& body);
    nlohmann::json extract_details(const nlohmann::json& body) const;
    std::string mesh(const nlohmann::json& body) const;
    nlohmann::json metrics(const nlohmann::json& body) const;
    nlohmann::json interpolate(const nlohmann::json& body) const;
    nlohmann::json sample(const nlohmann::json& body) const;
    nlohmann::json expand(const nlohmann::json& body) const;
    nlohmann::json auto_template(const nlohmann::json& body) const;
    nlohmann::json upload_pointcloud(const std::string& xyz_text);

    void install(httplib::Server& server);

  private:
    /// "template" as a registry name or an inline document.
    TemplateConfig resolve_template(const nlohmann::json& body) const;
    /// "values": absent or "defaults" gives the defaults.
    ParameterVector resolve_values(const TemplateConfig& t, const nlohmann::json& body, const char* key) const;
    /// "target": a point cloud id or an inline list of points.
    PointCloud resolve_cloud(const nlohmann::json& body, const char* key) const;

    WorkbenchConfig config_;
    TemplateRegistry templates_;
    ProjectStore store_;
    JobManager jobs_;
};

/// HTTP status for an exception raised by a handler.
int status_for(const std::exception& e);

/// Blocks serving on host:port until the server is stopped.
void serve(Workbench& workbench, const std::string& host, int port);

}  // namespace stickform::service
