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
#include <cityforge/common/error.hpp>
#include <cityforge/executors/executor.hpp>

#include <vector>

namespace cityforge::executors {

std::string_view toString(ExecutorKind kind) {
    return kind == ExecutorKind::Classification ? "classification" : "anomalyDetection";
}

ExecutorKind executorKindFromString(std::string_view text) {
    if (text == "classification") {
        return ExecutorKind::Classification;
    }
    if (text == "anomalyDetection" || text == "anomaly") {
        return ExecutorKind::AnomalyDetection;
    }
    fail(ErrorKind::Validation, "unknown job kind '" + std::string(text) + "'");
}

AnomalyConfig ExecutorConfig::anomalyConfig() const {
    AnomalyConfig config;
    config.zThreshold = zThreshold.value_or(config.zThreshold);
    config.flatlineWindow = flatlineWindow.value_or(config.flatlineWindow);
    config.flatlineEpsilon = flatlineEpsilon.value_or(config.flatlineEpsilon);
    config.onlineAdaptation = onlineAdaptation;
    return config;
}

void ExecutorConfig::validate() const { anomalyConfig().validate(); }

Json ExecutorConfig::toJson() const {
    Json out{{"kind", std::string(toString(kind))}, {"onlineAdaptation", onlineAdaptation}};
    if (zThreshold) {
        out["zThreshold"] = *zThreshold;
    }
    if (flatlineWindow) {
        out["flatlineWindow"] = *flatlineWindow;
    }
    if (flatlineEpsilon) {
        out["flatlineEpsilon"] = *flatlineEpsilon;
    }
    return out;
}

ExecutorConfig ExecutorConfig::fromJson(const Json& json, ExecutorKind kind) {
    ExecutorConfig config;
    config.kind = kind;
    if (json.is_null()) {
        return config;
    }
    require(json.is_object(), ErrorKind::Protocol, "executorParams must be an object");
    if (auto declared = optionalString(json, "kind")) {
        require(executorKindFromString(*declared) == kind, ErrorKind::Validation, "executorParams.kind disagrees with job kind");
    }
    if (json.contains("zThreshold")) {
        config.zThreshold = numberField(json, "zThreshold");
    }
    if (json.contains("flatlineWindow")) {
        const Json& window = json.at("flatlineWindow");
        require(window.is_number_integer() && window.get<long long>() >= 0, ErrorKind::Validation,
                "flatlineWindow must be a non-negative integer");
        config.flatlineWindow = window.get<std::size_t>();
    }
    if (json.contains("flatlineEpsilon")) {
        config.flatlineEpsilon = numberField(json, "flatlineEpsilon");
    }
    if (json.contains("onlineAdaptation")) {
        require(json.at("onlineAdaptation").is_boolean(), ErrorKind::Protocol, "onlineAdaptation must be a boolean");
        config.onlineAdaptation = json.at("onlineAdaptation").get<bool>();
    }
    config.validate();
    return config;
}

Evaluation ClassificationExecutor::evaluate(double x) {
    const auto result = model_.classify(x);
    return Evaluation{true, result.tag, result.confidence, AnomalyReason::None};
}

Json ClassificationExecutor::toJson() const {
    Json out = model_.toJson();
    out["kind"] = std::string(toString(kind()));
    return out;
}

Evaluation AnomalyExecutor::evaluate(double x) {
    const auto result = model_.score(x);
    return Evaluation{result.anomalous, anomalyTag_, result.score, result.reason};
}

Json AnomalyExecutor::toJson() const {
    Json out = model_.toJson();
    out["kind"] = std::string(toString(kind()));
    out["anomalyTag"] = anomalyTag_;
    return out;
}

std::unique_ptr<Executor> trainExecutor(const ExecutorConfig& config, std::span<const TrainingSample> samples,
                                        const std::string& anomalyTag) {
    if (config.kind == ExecutorKind::Classification) {
        return std::make_unique<ClassificationExecutor>(ClassifierModel::train(samples));
    }
    require(!anomalyTag.empty(), ErrorKind::Validation, "anomaly executor needs an anomaly tag");
    std::vector<double> values;
    values.reserve(samples.size());
    for (const auto& sample : samples) {
        values.push_back(sample.value);
    }
    return std::make_unique<AnomalyExecutor>(AnomalyModel::train(values, config.anomalyConfig()), anomalyTag);
}

std::unique_ptr<Executor> restoreExecutor(const Json& json) {
    const auto kind = executorKindFromString(stringField(json, "kind"));
    if (kind == ExecutorKind::Classification) {
        return std::make_unique<ClassificationExecutor>(ClassifierModel::fromJson(json));
    }
    return std::make_unique<AnomalyExecutor>(AnomalyModel::fromJson(json), stringField(json, "anomalyTag"));
}

}// namespace cityforge::executors
