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

#include <cityforge/common/value.hpp>

#include <cstddef>
#include <deque>
#include <span>
#include <string_view>

namespace cityforge::executors {

struct AnomalyConfig {
    double zThreshold = 3.0;
    std::size_t flatlineWindow = 12;
    double flatlineEpsilon = 1e-12;
    bool onlineAdaptation = false;

    /// zThreshold > 0, flatlineWindow >= 2, flatlineEpsilon >= 0.
    void validate() const;
};

enum class AnomalyReason { None, ZScore, Flatline };

std::string_view toString(AnomalyReason reason);

struct AnomalyScore {
    double score = 0.0;
    bool anomalous = false;
    AnomalyReason reason = AnomalyReason::None;
};

/// Z-score against training statistics plus a flatline check over the most recent readings.
class AnomalyModel {
  public:
    /// Population mean and standard deviation of at least two finite samples.
    static AnomalyModel train(std::span<const double> samples, AnomalyConfig config = {});

    /// Stateful: appends x to the recent window, and with online adaptation folds
    /// non-anomalous x into the statistics.
    AnomalyScore score(double x);

    double mean() const { return mean_; }
    double stdDev() const;
    std::size_t count() const { return count_; }
    const AnomalyConfig& config() const { return config_; }
    const std::deque<double>& recentValues() const { return recent_; }

    Json toJson() const;
    static AnomalyModel fromJson(const Json& json);

  private:
    AnomalyConfig config_;
    std::size_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;// sum of squared deviations from mean_
    std::deque<double> recent_;
};

}// namespace cityforge::executors
