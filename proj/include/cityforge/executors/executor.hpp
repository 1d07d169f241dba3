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

#include <cityforge/executors/anomaly.hpp>
#include <cityforge/executors/classifier.hpp>

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace cityforge::executors {

enum class ExecutorKind { Classification, AnomalyDetection };

std::string_view toString(ExecutorKind kind);
ExecutorKind executorKindFromString(std::string_view text);

/// Per-job executor parameters; anomaly overrides are ignored by classifiers.
struct ExecutorConfig {
    ExecutorKind kind = ExecutorKind::Classification;
    std::optional<double> zThreshold;
    std::optional<std::size_t> flatlineWindow;
    std::optional<double> flatlineEpsilon;
    bool onlineAdaptation = false;

    AnomalyConfig anomalyConfig() const;
    void validate() const;

    Json toJson() const;
    static ExecutorConfig fromJson(const Json& json, ExecutorKind kind);
};

/// What an executor concluded about one reading.
struct Evaluation {
    bool annotate = false;
    std::string tag;
    /// Classification confidence or abnormality score.
    double note = 0.0;
    AnomalyReason reason = AnomalyReason::None;
};

/// Online algorithm owned by one job. Not thread-safe; the job serializes calls.
class Executor {
  public:
    virtual ~Executor() = default;
    virtual ExecutorKind kind() const = 0;
    virtual Evaluation evaluate(double x) = 0;
    virtual Json toJson() const = 0;
};

class ClassificationExecutor final : public Executor {
  public:
    explicit ClassificationExecutor(ClassifierModel model) : model_(std::move(model)) {}
    ExecutorKind kind() const override { return ExecutorKind::Classification; }
    Evaluation evaluate(double x) override;
    Json toJson() const override;
    const ClassifierModel& model() const { return model_; }

  private:
    ClassifierModel model_;
};

class AnomalyExecutor final : public Executor {
  public:
    AnomalyExecutor(AnomalyModel model, std::string anomalyTag) : model_(std::move(model)), anomalyTag_(std::move(anomalyTag)) {}
    ExecutorKind kind() const override { return ExecutorKind::AnomalyDetection; }
    Evaluation evaluate(double x) override;
    Json toJson() const override;
    const AnomalyModel& model() const { return model_; }

  private:
    AnomalyModel model_;
    std::string anomalyTag_;
};

/// Builds a trained executor. `anomalyTag` is the tag anomaly executors annotate with.
std::unique_ptr<Executor> trainExecutor(const ExecutorConfig& config, std::span<const TrainingSample> samples,
                                        const std::string& anomalyTag = {});

/// Inverse of Executor::toJson.
std::unique_ptr<Executor> restoreExecutor(const Json& json);

}// namespace cityforge::executors
