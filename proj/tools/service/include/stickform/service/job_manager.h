// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "stickform/fit.h"
#include "stickform/template.h"

namespace stickform::service {

enum class JobStatus { queued, running, done, failed, cancelled };

std::string to_string(JobStatus s);

struct FitRequest {
    TemplateConfig config;
    ParameterVector init;
    PointCloud target;
    FitConfig fit;
};

/// Fit jobs run on a fixed pool of worker threads. Each job owns its request
/// and a snapshot of its progress; cancellation takes effect at the next
/// iteration boundary.
class JobManager {
  public:
    explicit JobManager(std::size_t workers = 1);
    ~JobManager();
    JobManager(const JobManager&) = delete;
    JobManager& operator=(const JobManager&) = delete;

    std::string submit(FitRequest request);
    /// Throws NotFoundError.
    nlohmann::json snapshot(const std::string& id) const;
    /// Requests cancellation and returns the snapshot at that moment. Jobs that
    /// already finished are left as they are.
    nlohmann::json cancel(const std::string& id);
    JobStatus status(const std::string& id) const;
    std::vector<std::string> ids() const;

  private:
    struct Job {
        std::string id;
        FitRequest request;
        std::atomic<bool> cancel_requested{false};

        mutable std::mutex mutex;
        JobStatus status = JobStatus::queued;
        int iteration = 0;
        std::vector<double> loss_trace;
        std::vector<double> current;
        std::vector<double> best;
        double best_loss = 0.0;
        bool has_best = false;
        std::optional<FitReport> report;
        std::string error;
        std::string created;
        std::string finished;
    };

    std::shared_ptr<Job> find(const std::string& id) const;
    void worker_loop(std::stop_token stop);
    void run(Job& job);
    static nlohmann::json describe(const Job& job);

    mutable std::mutex mutex_;
    std::condition_variable_any wake_;
    std::map<std::string, std::shared_ptr<Job>> jobs_;
    std::deque<std::shared_ptr<Job>> queue_;
    std::uint64_t next_id_ = 1;
    std::vector<std::jthread> workers_;
};

}  // namespace stickform::service
