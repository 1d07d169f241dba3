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
#include <cityforge/jobs/job.hpp>

#include <cmath>

namespace cityforge::jobs {

std::string_view toString(JobStatus status) {
    switch (status) {
        case JobStatus::Created: return "created";
        case JobStatus::Trained: return "trained";
        case JobStatus::Running: return "running";
        case JobStatus::Stopped: return "stopped";
    }
    return "created";
}

JobStatus jobStatusFromString(std::string_view text) {
    for (const auto status : {JobStatus::Created, JobStatus::Trained, JobStatus::Running, JobStatus::Stopped}) {
        if (toString(status) == text) {
            return status;
        }
    }
    fail(ErrorKind::Validation, "unknown job status '" + std::string(text) + "'");
}

JobSpec JobSpec::fromJson(const Json& json) {
    require(json.is_object(), ErrorKind::Validation, "job must be a JSON object");
    JobSpec spec;
    spec.kind = executors::executorKindFromString(stringField(json, "kind"));
    if (json.contains("query")) {
        spec.query = broker::wire::queryFromJson(json.at("query"));
    }
    spec.attribute = stringField(json, "attribute");
    spec.tagDomain = stringField(json, "tagDomain");
    spec.executorParams = executors::ExecutorConfig::fromJson(json.value("executorParams", Json::object()), spec.kind);
    spec.executorParams.validate();
    require(!spec.attribute.empty(), ErrorKind::Validation, "attribute must not be empty");
    return spec;
}

Json toJson(const JobSpec& spec) {
    return Json{{"kind", std::string(executors::toString(spec.kind))},
                {"query", broker::wire::toJson(spec.query)},
                {"attribute", spec.attribute},
                {"tagDomain", spec.tagDomain},
                {"executorParams", spec.executorParams.toJson()}};
}

Json toJson(const AnnotationJob& job) {
    Json out = toJson(job.spec);
    out["id"] = job.id;
    out["status"] = std::string(toString(job.status));
    out["ingestToken"] = job.ingestToken;
    out["ingestPath"] = "/ingest/" + job.ingestToken;
    out["createdAt"] = formatInstant(job.createdAt);
    out["updatedAt"] = formatInstant(job.updatedAt);
    out["subscriptionId"] = job.subscriptionId ? Json(*job.subscriptionId) : Json(nullptr);
    out["trainingSize"] = job.trainingSize;
    out["processed"] = job.counters.processed;
    out["skipped"] = job.counters.skipped;
    out["annotated"] = job.counters.annotated;
    out["annotationFailures"] = job.counters.annotationFailures;
    return out;
}

AnnotationJob jobFromJson(const Json& json) {
    AnnotationJob job;
    job.spec = JobSpec::fromJson(json);
    job.id = json.at("id").get<std::int64_t>();
    job.status = jobStatusFromString(stringField(json, "status"));
    job.ingestToken = stringField(json, "ingestToken");
    job.createdAt = parseInstant(stringField(json, "createdAt"));
    job.updatedAt = parseInstant(stringField(json, "updatedAt"));
    job.trainingSize = json.value("trainingSize", std::size_t{0});
    job.counters.processed = json.value("processed", std::uint64_t{0});
    job.counters.skipped = json.value("skipped", std::uint64_t{0});
    job.counters.annotated = json.value("annotated", std::uint64_t{0});
    job.counters.annotationFailures = json.value("annotationFailures", std::uint64_t{0});
    return job;
}

Json toJson(const AnnotationResult& result) {
    return Json{{"jobId", result.jobId},
                {"assetUrn", result.assetUrn},
                {"attribute", result.attribute},
                {"inputValue", result.inputValue},
                {"tag", result.tag},
                {"note", cityforge::toJson(result.note)},
                {"producedAt", formatInstant(result.producedAt)}};
}

std::vector<executors::TrainingSample> samplesFromJson(const Json& json) {
    require(json.is_array(), ErrorKind::Validation, "training data must be an array of {tag, value}");
    std::vector<executors::TrainingSample> samples;
    for (const auto& item : json) {
        require(item.is_object(), ErrorKind::Validation, "training sample must be an object");
        const auto tag = optionalString(item, "tag");
        require(item.contains("value") && item.at("value").is_number(), ErrorKind::Validation, "training value must be a number");
        const double value = item.at("value").get<double>();
        require(std::isfinite(value), ErrorKind::Validation, "training value must be finite");
        samples.push_back({tag.value_or(""), value});
    }
    return samples;
}

}// namespace cityforge::jobs
