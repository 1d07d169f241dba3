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

#include <cityforge/broker/context.hpp>
#include <cityforge/common/time.hpp>
#include <cityforge/common/value.hpp>
#include <cityforge/executors/executor.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cityforge::jobs {

enum class JobStatus { Created, Trained, Running, Stopped };

std::string_view toString(JobStatus status);
JobStatus jobStatusFromString(std::string_view text);

/// What a client supplies when creating a job.
struct JobSpec {
    executors::ExecutorKind kind = executors::ExecutorKind::Classification;
    broker::ContextQuery query;
    std::string attribute;
    std::string tagDomain;
    executors::ExecutorConfig executorParams;

    static JobSpec fromJson(const Json& json);
};

struct JobCounters {
    std::uint64_t processed = 0;
    std::uint64_t skipped = 0;
    std::uint64_t annotated = 0;
    std::uint64_t annotationFailures = 0;
};

struct AnnotationJob {
    std::int64_t id = 0;
    JobSpec spec;
    JobStatus status = JobStatus::Created;
    std::string ingestToken;
    Instant createdAt;
    Instant updatedAt;
    std::optional<std::string> subscriptionId;
    std::size_t trainingSize = 0;
    JobCounters counters;
};

Json toJson(const JobSpec& spec);
Json toJson(const AnnotationJob& job);
AnnotationJob jobFromJson(const Json& json);

struct AnnotationResult {
    std::int64_t jobId = 0;
    std::string assetUrn;
    std::string attribute;
    double inputValue = 0.0;
    std::string tag;
    Scalar note;
    Instant producedAt;
};

Json toJson(const AnnotationResult& result);

/// Accepts `[{"tag": ..., "value": ...}]`; anomaly samples may omit the tag.
std::vector<executors::TrainingSample> samplesFromJson(const Json& json);

}// namespace cityforge::jobs
