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
#include <cityforge/broker/wire.hpp>
#include <cityforge/common/error.hpp>
#include <cityforge/common/text.hpp>
#include <cityforge/jobs/job_manager.hpp>

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace cityforge::jobs {

using executors::ExecutorKind;
using executors::TrainingSample;

namespace {

Json readJsonFile(const std::filesystem::path& path) {
    std::ifstream in(path);
    return Json::parse(in);
}

void writeJsonFile(const std::filesystem::path& path, const Json& json) {
    const auto temp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out(temp, std::ios::trunc);
        out << json.dump(2) << '\n';
        require(out.good(), ErrorKind::Unavailable, "cannot write " + temp.string());
    }
    std::filesystem::rename(temp, path);
}

}// namespace

JobManager::JobManager(warehouse::KnowledgeWarehouse& warehouse, broker::SubscriptionService& subscriptions, JobManagerOptions options)
    : warehouse_(warehouse), subscriptions_(subscriptions), options_(std::move(options)) {
    if (options_.dataDir) {
        std::filesystem::create_directories(*options_.dataDir / "jobs");
        load();
    }
    warehouse_.setDomainReferenceCheck([this](const std::string& urn) {
        std::lock_guard lock(domainMutex_);
        const auto it = domainUse_.find(urn);
        return it != domainUse_.end() && it->second > 0;
    });
}

JobManager::~JobManager() {
    warehouse_.setDomainReferenceCheck({});
    try {
        flush();
    } catch (const std::exception& e) {
        spdlog::error("persisting jobs failed: {}", e.what());
    }
}

void JobManager::load() {
    const auto dir = *options_.dataDir / "jobs";
    if (const auto sequence = dir / "sequence"; std::filesystem::exists(sequence)) {
        nextId_ = readJsonFile(sequence).get<std::int64_t>();
    }
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") {
            continue;
        }
        try {
            const Json stored = readJsonFile(entry.path());
            auto job = std::make_shared<Runtime>();
            job->record = jobFromJson(stored.at("job"));
            if (stored.contains("model") && !stored.at("model").is_null()) {
                job->executor = executors::restoreExecutor(stored.at("model"));
            } else if (job->record.status != JobStatus::Created) {
                spdlog::warn("job {} has no stored model; resetting to created", job->record.id);
                job->record.status = JobStatus::Created;
            }
            job->record.subscriptionId.reset();
            nextId_ = std::max(nextId_, job->record.id + 1);
            byToken_[job->record.ingestToken] = job->record.id;
            retainDomain(job->record.spec.tagDomain);
            jobs_[job->record.id] = std::move(job);
        } catch (const std::exception& e) {
            spdlog::error("skipping unreadable job file {}: {}", entry.path().string(), e.what());
        }
    }
}

void JobManager::persistLocked(const Runtime& job) const {
    if (!options_.dataDir || job.deleted) {
        return;
    }
    Json stored{{"job", toJson(job.record)}, {"model", job.executor ? job.executor->toJson() : Json(nullptr)}};
    writeJsonFile(*options_.dataDir / "jobs" / (std::to_string(job.record.id) + ".json"), stored);
}

void JobManager::flush() {
    std::vector<std::shared_ptr<Runtime>> all;
    {
        std::shared_lock lock(tableMutex_);
        for (const auto& [id, job] : jobs_) {
            all.push_back(job);
        }
    }
    for (const auto& job : all) {
        std::lock_guard lock(job->mutex);
        persistLocked(*job);
    }
}

void JobManager::retainDomain(const std::string& domainUrn) {
    std::lock_guard lock(domainMutex_);
    ++domainUse_[domainUrn];
}

void JobManager::releaseDomain(const std::string& domainUrn) {
    std::lock_guard lock(domainMutex_);
    if (auto it = domainUse_.find(domainUrn); it != domainUse_.end() && --it->second == 0) {
        domainUse_.erase(it);
    }
}

std::string JobManager::anomalyTagFor(const std::string& domainUrn) const { return domainUrn + ":" + options_.anomalyTagName; }

std::shared_ptr<JobManager::Runtime> JobManager::runtime(std::int64_t id) const {
    std::shared_lock lock(tableMutex_);
    const auto it = jobs_.find(id);
    require(it != jobs_.end(), ErrorKind::NotFound, "no job " + std::to_string(id));
    return it->second;
}

AnnotationJob JobManager::createJob(const JobSpec& spec) {
    require(!spec.attribute.empty(), ErrorKind::Validation, "attribute must not be empty");
    require(spec.executorParams.kind == spec.kind, ErrorKind::Validation, "executor parameters do not match the job kind");
    spec.executorParams.validate();
    broker::QueryMatcher{spec.query};
    require(warehouse_.hasDomain(spec.tagDomain), ErrorKind::Validation, "tag domain '" + spec.tagDomain + "' does not exist");
    const auto tags = warehouse_.tags(spec.tagDomain);
    require(!tags.empty(), ErrorKind::Validation, "tag domain '" + spec.tagDomain + "' has no tags");
    if (spec.kind == ExecutorKind::AnomalyDetection) {
        const auto anomalyTag = anomalyTagFor(spec.tagDomain);
        const bool present = std::any_of(tags.begin(), tags.end(), [&](const auto& t) { return t.urn == anomalyTag; });
        require(present, ErrorKind::Validation, "anomaly jobs need the tag '" + anomalyTag + "' in their domain");
    }

    auto job = std::make_shared<Runtime>();
    job->record.spec = spec;
    job->record.createdAt = job->record.updatedAt = now();
    job->record.ingestToken = randomToken();
    retainDomain(spec.tagDomain);
    std::lock_guard jobLock(job->mutex);
    {
        std::unique_lock lock(tableMutex_);
        job->record.id = nextId_++;
        if (options_.dataDir) {
            writeJsonFile(*options_.dataDir / "jobs" / "sequence", Json(nextId_));
        }
        byToken_[job->record.ingestToken] = job->record.id;
        jobs_[job->record.id] = job;
    }
    persistLocked(*job);
    spdlog::info("created {} job {} on '{}'", executors::toString(spec.kind), job->record.id, spec.attribute);
    return job->record;
}

std::vector<TrainingSample> JobManager::checkSamples(const AnnotationJob& job, std::span<const TrainingSample> samples) const {
    require(!samples.empty(), ErrorKind::Validation, "training data must not be empty");
    const std::string& domain = job.spec.tagDomain;
    std::vector<TrainingSample> resolved;
    for (const auto& sample : samples) {
        require(std::isfinite(sample.value), ErrorKind::Validation, "training values must be finite");
        std::string tag = sample.tag;
        if (!tag.empty() && tag.find(':') == std::string::npos) {
            tag = domain + ":" + tag;
        }
        if (job.spec.kind == ExecutorKind::AnomalyDetection) {
            require(tag.empty() || tag == domain + ":" + options_.normalTagName, ErrorKind::Validation,
                    "anomaly training samples may only carry the '" + options_.normalTagName + "' tag");
        } else {
            require(!tag.empty(), ErrorKind::Validation, "classification samples need a tag");
            require(tag.starts_with(domain + ":"), ErrorKind::Validation, "tag '" + tag + "' is outside domain '" + domain + "'");
            try {
                warehouse_.tag(tag);
            } catch (const Error&) {
                fail(ErrorKind::Validation, "tag '" + tag + "' does not exist in domain '" + domain + "'");
            }
        }
        resolved.push_back({tag, sample.value});
    }
    if (job.spec.kind == ExecutorKind::AnomalyDetection) {
        require(resolved.size() >= 2, ErrorKind::Validation, "anomaly training needs at least 2 samples");
    }
    return resolved;
}

AnnotationJob JobManager::trainJob(std::int64_t id, std::span<const TrainingSample> samples) {
    const auto job = runtime(id);
    std::lock_guard lock(job->mutex);
    require(!job->deleted, ErrorKind::NotFound, "no job " + std::to_string(id));
    const auto status = job->record.status;
    require(status == JobStatus::Created || status == JobStatus::Stopped, ErrorKind::State,
            "job " + std::to_string(id) + " is " + std::string(toString(status)) + "; training needs created or stopped");
    const auto resolved = checkSamples(job->record, samples);
    auto executor = executors::trainExecutor(job->record.spec.executorParams, resolved, anomalyTagFor(job->record.spec.tagDomain));
    job->executor = std::move(executor);
    job->record.status = JobStatus::Trained;
    job->record.trainingSize = resolved.size();
    job->record.updatedAt = now();
    persistLocked(*job);
    return job->record;
}

AnnotationJob JobManager::startJob(std::int64_t id) {
    const auto job = runtime(id);
    std::lock_guard lock(job->mutex);
    require(!job->deleted, ErrorKind::NotFound, "no job " + std::to_string(id));
    const auto status = job->record.status;
    require((status == JobStatus::Trained || status == JobStatus::Stopped) && job->executor, ErrorKind::State,
            "job " + std::to_string(id) + " is " + std::string(toString(status)) + "; only trained or stopped jobs start");
    const auto subscription = subscriptions_.subscribe(job->record.spec.query, options_.callbackBase + std::to_string(id));
    job->record.subscriptionId = subscription.id;
    job->record.status = JobStatus::Running;
    job->record.updatedAt = now();
    persistLocked(*job);
    return job->record;
}

AnnotationJob JobManager::stopJob(std::int64_t id) {
    const auto job = runtime(id);
    std::lock_guard lock(job->mutex);
    require(!job->deleted, ErrorKind::NotFound, "no job " + std::to_string(id));
    require(job->record.status == JobStatus::Running, ErrorKind::State,
            "job " + std::to_string(id) + " is " + std::string(toString(job->record.status)) + ", not running");
    if (job->record.subscriptionId) {
        try {
            subscriptions_.unsubscribe(*job->record.subscriptionId);
        } catch (const Error& e) {
            spdlog::warn("job {}: {}", id, e.what());
        }
    }
    job->record.subscriptionId.reset();
    job->record.status = JobStatus::Stopped;
    job->record.updatedAt = now();
    persistLocked(*job);
    return job->record;
}

void JobManager::deleteJob(std::int64_t id) {
    const auto job = runtime(id);
    {
        std::lock_guard lock(job->mutex);
        require(!job->deleted, ErrorKind::NotFound, "no job " + std::to_string(id));
        if (job->record.subscriptionId) {
            try {
                subscriptions_.unsubscribe(*job->record.subscriptionId);
            } catch (const Error& e) {
                spdlog::warn("job {}: {}", id, e.what());
            }
        }
        job->deleted = true;
        if (options_.dataDir) {
            std::filesystem::remove(*options_.dataDir / "jobs" / (std::to_string(id) + ".json"));
        }
    }
    {
        std::unique_lock lock(tableMutex_);
        byToken_.erase(job->record.ingestToken);
        jobs_.erase(id);
    }
    releaseDomain(job->record.spec.tagDomain);
}

AnnotationJob JobManager::job(std::int64_t id) const {
    const auto job = runtime(id);
    std::lock_guard lock(job->mutex);
    return job->record;
}

std::vector<AnnotationJob> JobManager::jobs() const {
    std::vector<std::shared_ptr<Runtime>> all;
    {
        std::shared_lock lock(tableMutex_);
        for (const auto& [id, job] : jobs_) {
            all.push_back(job);
        }
    }
    std::vector<AnnotationJob> out;
    for (const auto& job : all) {
        std::lock_guard lock(job->mutex);
        if (!job->deleted) {
            out.push_back(job->record);
        }
    }
    return out;
}

std::optional<AnnotationResult> JobManager::evaluateLocked(Runtime& job, const std::string& assetUrn, const std::string& attribute,
                                                           const Scalar& value, Instant timestamp,
                                                           const std::optional<Location>& location) {
    auto& counters = job.record.counters;
    if (attribute != job.record.spec.attribute) {
        ++counters.skipped;
        return std::nullopt;
    }
    const auto number = asNumber(value);
    if (!number) {
        ++counters.skipped;
        spdlog::warn("job {}: non-numeric '{}' from {} skipped", job.record.id, attribute, assetUrn);
        return std::nullopt;
    }
    require(job.executor != nullptr, ErrorKind::State, "job " + std::to_string(job.record.id) + " has no trained model");
    const double x = *number;
    const auto evaluation = job.executor->evaluate(x);
    ++counters.processed;
    if (!evaluation.annotate) {
        return std::nullopt;
    }
    warehouse::AnnotationDraft draft;
    draft.assetUrn = assetUrn;
    draft.tagUrn = evaluation.tag;
    draft.annotator = warehouse::Annotator::machine(job.record.id);
    draft.note = evaluation.note;
    draft.timestamp = timestamp;
    draft.location = location;
    try {
        warehouse_.annotate(draft);
    } catch (const Error& e) {
        ++counters.annotationFailures;
        spdlog::warn("job {}: annotation of {} not stored: {}", job.record.id, assetUrn, e.what());
        return std::nullopt;
    }
    ++counters.annotated;
    AnnotationResult result{job.record.id, assetUrn, attribute, x, evaluation.tag, evaluation.note, now()};
    ResultListener listener;
    {
        std::lock_guard lock(listenerMutex_);
        listener = listener_;
    }
    if (listener) {
        listener(result);
    }
    return result;
}

std::optional<AnnotationResult> JobManager::handleUpdate(std::int64_t id, const std::string& assetUrn, const std::string& attribute,
                                                         const Scalar& value, Instant timestamp, const std::optional<Location>& location) {
    requireUrn(assetUrn, "asset");
    const auto job = runtime(id);
    std::lock_guard lock(job->mutex);
    require(!job->deleted && job->record.status == JobStatus::Running, ErrorKind::State, "job " + std::to_string(id) + " is not running");
    return evaluateLocked(*job, assetUrn, attribute, value, timestamp, location);
}

std::vector<AnnotationResult> JobManager::process(const std::shared_ptr<Runtime>& job, const Json& body, bool requireRunning) {
    const auto notification = broker::wire::parseNotification(body, now());
    for (const auto& entity : notification.data) {
        requireUrn(entity.id, "entity id");
    }
    std::lock_guard lock(job->mutex);
    const bool running = !job->deleted && job->record.status == JobStatus::Running;
    if (!running) {
        require(!requireRunning, ErrorKind::State, "job " + std::to_string(job->record.id) + " is not running");
        return {};
    }
    std::vector<AnnotationResult> results;
    const auto& attribute = job->record.spec.attribute;
    for (const auto& entity : notification.data) {
        const auto it = entity.attributes.find(attribute);
        if (it == entity.attributes.end()) {
            ++job->record.counters.skipped;
            continue;
        }
        if (auto result = evaluateLocked(*job, entity.id, attribute, it->second.value, it->second.timestamp, it->second.location)) {
            results.push_back(std::move(*result));
        }
    }
    return results;
}

std::vector<AnnotationResult> JobManager::handleNotification(std::int64_t id, const Json& body) {
    return process(runtime(id), body, false);
}

std::vector<AnnotationResult> JobManager::manualIngest(const std::string& token, const Json& body) {
    std::shared_ptr<Runtime> job;
    {
        std::shared_lock lock(tableMutex_);
        const auto it = byToken_.find(token);
        require(it != byToken_.end(), ErrorKind::Authorization, "unknown ingest token");
        job = jobs_.at(it->second);
    }
    return process(job, body, true);
}

void JobManager::resumeRunningJobs() {
    std::vector<std::shared_ptr<Runtime>> all;
    {
        std::shared_lock lock(tableMutex_);
        for (const auto& [id, job] : jobs_) {
            all.push_back(job);
        }
    }
    for (const auto& job : all) {
        std::lock_guard lock(job->mutex);
        if (job->deleted || job->record.status != JobStatus::Running || job->record.subscriptionId) {
            continue;
        }
        const auto subscription = subscriptions_.subscribe(job->record.spec.query, options_.callbackBase + std::to_string(job->record.id));
        job->record.subscriptionId = subscription.id;
        persistLocked(*job);
        spdlog::info("job {} resubscribed as {}", job->record.id, subscription.id);
    }
}

void JobManager::setResultListener(ResultListener listener) {
    std::lock_guard lock(listenerMutex_);
    listener_ = std::move(listener);
}

}// namespace cityforge::jobs
