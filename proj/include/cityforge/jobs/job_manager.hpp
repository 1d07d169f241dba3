/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#pragma once

#include <cityforge/broker/broker.hpp>
#include <cityforge/jobs/job.hpp>
#include <cityforge/warehouse/warehouse.hpp>

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

namespace cityforge::jobs {

struct JobManagerOptions {
    /// Jobs are persisted under `<dataDir>/jobs` when set.
    std::optional<std::filesystem::path> dataDir;
    /// Broker callbacks go to `<callbackBase><jobId>`.
    std::string callbackBase = "http://127.0.0.1:8080/notify/";
    /// Tag name annotated by anomaly jobs; must exist in the job's domain.
    std::string anomalyTagName = "anomalous";
    /// Tag name anomaly training samples may carry.
    std::string normalTagName = "normal";
};

/// Owns annotation jobs: lifecycle, executors, subscriptions and result forwarding.
///
/// Each job has its own mutex, so updates for one job run in arrival order while different
/// jobs proceed in parallel. The job table lock is never held while calling the warehouse.
class JobManager {
  public:
    using ResultListener = std::function<void(const AnnotationResult&)>;

    JobManager(warehouse::KnowledgeWarehouse& warehouse, broker::SubscriptionService& subscriptions, JobManagerOptions options = {});
    ~JobManager();
    JobManager(const JobManager&) = delete;
    JobManager& operator=(const JobManager&) = delete;

    AnnotationJob createJob(const JobSpec& spec);
    AnnotationJob trainJob(std::int64_t id, std::span<const executors::TrainingSample> samples);
    AnnotationJob startJob(std::int64_t id);
    AnnotationJob stopJob(std::int64_t id);
    /// Unsubscribes if running; annotations already stored are kept.
    void deleteJob(std::int64_t id);
    AnnotationJob job(std::int64_t id) const;
    std::vector<AnnotationJob> jobs() const;

    /// Broker callback path. Updates reaching a job that is no longer running are ignored.
    std::vector<AnnotationResult> handleNotification(std::int64_t id, const Json& body);
    /// Per-job ingest endpoint, same processing as the broker path.
    std::vector<AnnotationResult> manualIngest(const std::string& token, const Json& body);
    /// One reading. Returns a result when an annotation was stored.
    std::optional<AnnotationResult> handleUpdate(std::int64_t id, const std::string& assetUrn, const std::string& attribute,
                                                 const Scalar& value, Instant timestamp,
                                                 const std::optional<Location>& location = std::nullopt);

    /// Resubscribes jobs persisted as running. Call once the notification endpoint is reachable.
    void resumeRunningJobs();
    void setResultListener(ResultListener listener);
    /// Persists counters and online model state.
    void flush();

  private:
    struct Runtime {
        std::mutex mutex;
        AnnotationJob record;
        std::unique_ptr<executors::Executor> executor;
        bool deleted = false;
    };

    std::shared_ptr<Runtime> runtime(std::int64_t id) const;
    std::vector<AnnotationResult> process(const std::shared_ptr<Runtime>& job, const Json& body, bool requireRunning);
    std::optional<AnnotationResult> evaluateLocked(Runtime& job, const std::string& assetUrn, const std::string& attribute,
                                                   const Scalar& value, Instant timestamp, const std::optional<Location>& location);
    void persistLocked(const Runtime& job) const;
    void load();
    std::string anomalyTagFor(const std::string& domainUrn) const;
    std::vector<executors::TrainingSample> checkSamples(const AnnotationJob& job, std::span<const executors::TrainingSample> samples) const;
    void retainDomain(const std::string& domainUrn);
    void releaseDomain(const std::string& domainUrn);

    warehouse::KnowledgeWarehouse& warehouse_;
    broker::SubscriptionService& subscriptions_;
    JobManagerOptions options_;

    mutable std::shared_mutex tableMutex_;
    std::map<std::int64_t, std::shared_ptr<Runtime>> jobs_;
    std::map<std::string, std::int64_t> byToken_;
    std::int64_t nextId_ = 1;

    mutable std::mutex domainMutex_;
    std::map<std::string, std::size_t> domainUse_;

    mutable std::mutex listenerMutex_;
    ResultListener listener_;
};

}// namespace cityforge::jobs
