// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#include "stickform/service/job_manager.h"

#include "stickform/io.h"
#include "stickform/service/errors.h"
#include "stickform/service/project_store.h"

namespace stickform::service {

using nlohmann::json;

std::string to_string(JobStatus s)
{
    switch (s) {
    case JobStatus::queued: return "queued";
    case JobStatus::running: return "running";
    case JobStatus::done: return "done";
    case JobStatus::failed: return "failed";
    case JobStatus::cancelled: return "cancelled";
    }
    return "unknown";
}

JobManager::JobManager(std::size_t workers)
{
    workers = std::max<std::size_t>(workers, 1);
    for (std::size_t i = 0; i < workers; ++i)
        workers_.emplace_back([this](std::stop_token stop) { worker_loop(stop); });
}

JobManager::~JobManager()
{
    {
        std::lock_guard lock(mutex_);
        for (auto& [id, job] : jobs_) job->cancel_requested = true;
    }
    for (auto& w : workers_) w.request_stop();
    wake_.notify_all();
    workers_.clear();
}

std::string JobManager::submit(FitRequest request)
{
    request.fit.validate();
    if (request.init.size() != request.config.n_params())
        throw LengthMismatchError("init: expected " + std::to_string(request.config.n_params()) + " parameters, got " +
                                  std::to_string(request.init.size()));
    if (request.target.points.empty()) throw ValidationError("target: no points");
    auto job = std::make_shared<Job>();
    job->request = std::move(request);
    job->current = checked_params(job->request.config, job->request.init.values).values;
    job->created = utc_timestamp();
    {
        std::lock_guard lock(mutex_);
        job->id = "job-" + std::to_string(next_id_++);
        jobs_[job->id] = job;
        queue_.push_back(job);
    }
    wake_.notify_one();
    return job->id;
}

std::shared_ptr<JobManager::Job> JobManager::find(const std::string& id) const
{
    std::lock_guard lock(mutex_);
    auto it = jobs_.find(id);
    if (it == jobs_.end()) throw NotFoundError("unknown job '" + id + "'");
    return it->second;
}

json JobManager::describe(const Job& job)
{
    std::lock_guard lock(job.mutex);
    json out = {{"id", job.id},
                {"status", to_string(job.status)},
                {"iteration", job.iteration},
                {"iterations", job.request.fit.iterations},
                {"loss_trace", job.loss_trace},
                {"current_values", job.current},
                {"created", job.created}};
    if (job.has_best) {
        out["best_loss"] = job.best_loss;
        out["best_values"] = job.best;
    } else {
        out["best_values"] = job.request.init.values;
    }
    if (job.report) out["report"] = fit_report_to_json(*job.report);
    if (!job.error.empty()) out["error"] = job.error;
    if (!job.finished.empty()) out["finished"] = job.finished;
    return out;
}

json JobManager::snapshot(const std::string& id) const { return describe(*find(id)); }

JobStatus JobManager::status(const std::string& id) const
{
    auto job = find(id);
    std::lock_guard lock(job->mutex);
    return job->status;
}

std::vector<std::string> JobManager::ids() const
{
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [id, job] : jobs_) out.push_back(id);
    return out;
}

json JobManager::cancel(const std::string& id)
{
    auto job = find(id);
    job->cancel_requested = true;
    {
        std::lock_guard lock(job->mutex);
        if (job->status == JobStatus::queued) {
            job->status = JobStatus::cancelled;
            job->finished = utc_timestamp();
        }
    }
    return describe(*job);
}

void JobManager::worker_loop(std::stop_token stop)
{
    while (true) {
        std::shared_ptr<Job> job;
        {
            std::unique_lock lock(mutex_);
            if (!wake_.wait(lock, stop, [this] { return !queue_.empty(); })) return;
            job = queue_.front();
            queue_.pop_front();
        }
        run(*job);
    }
}

void JobManager::run(Job& job)
{
    {
        std::lock_guard lock(job.mutex);
        if (job.status != JobStatus::queued) return;
        job.status = JobStatus::running;
    }
    const FitCallback progress = [&job](const FitProgress& p) {
        std::lock_guard lock(job.mutex);
        job.iteration = p.iteration + 1;
        job.loss_trace.push_back(p.loss);
        // p.loss belongs to the values before this step.
        if (!job.has_best || p.loss < job.best_loss) {
            job.has_best = true;
            job.best_loss = p.loss;
            job.best = job.current;
        }
        job.current.assign(p.values.begin(), p.values.end());
        return !job.cancel_requested.load();
    };
    try {
        FitReport report = optimize(job.request.config, job.request.init, job.request.target, job.request.fit, progress);
        std::lock_guard lock(job.mutex);
        job.best = report.best_params.values;
        job.best_loss = report.best_loss;
        job.has_best = true;
        job.loss_trace = report.loss_trace;
        job.status = report.cancelled ? JobStatus::cancelled : JobStatus::done;
        job.report = std::move(report);
        job.finished = utc_timestamp();
    } catch (const std::exception& e) {
        std::lock_guard lock(job.mutex);
        job.status = JobStatus::failed;
        job.error = e.what();
        job.finished = utc_timestamp();
    }
}

}  // namespace stickform::service
