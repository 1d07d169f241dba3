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
#include <cityforge/executors/anomaly.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace cityforge::executors {

void AnomalyConfig::validate() const {
    require(std::isfinite(zThreshold) && zThreshold > 0.0, ErrorKind::Validation, "zThreshold must be > 0");
    require(flatlineWindow >= 2, ErrorKind::Validation, "flatlineWindow must be >= 2");
    require(std::isfinite(flatlineEpsilon) && flatlineEpsilon >= 0.0, ErrorKind::Validation, "flatlineEpsilon must be >= 0");
}

std::string_view toString(AnomalyReason reason) {
    switch (reason) {
        case AnomalyReason::None: return "none";
        case AnomalyReason::ZScore: return "zscore";
        case AnomalyReason::Flatline: return "flatline";
    }
    return "none";
}

AnomalyModel AnomalyModel::train(std::span<const double> samples, AnomalyConfig config) {
    config.validate();
    require(samples.size() >= 2, ErrorKind::Validation, "anomaly training needs at least two samples");
    double sum = 0.0;
    for (double v : samples) {
        require(std::isfinite(v), ErrorKind::Validation, "training value must be finite");
        sum += v;
    }
    AnomalyModel model;
    model.config_ = config;
    model.count_ = samples.size();
    model.mean_ = sum / static_cast<double>(samples.size());
    for (double v : samples) {
        model.m2_ += (v - model.mean_) * (v - model.mean_);
    }
    return model;
}

double AnomalyModel::stdDev() const { return std::sqrt(m2_ / static_cast<double>(count_)); }

AnomalyScore AnomalyModel::score(double x) {
    require(std::isfinite(x), ErrorKind::Validation, "cannot score a non-finite value");
    AnomalyScore result;
    const double sd = stdDev();
    if (sd > 0.0) {
        result.score = std::abs(x - mean_) / sd;
    } else {
        result.score = x == mean_ ? 0.0 : std::numeric_limits<double>::max();
    }
    if (result.score > config_.zThreshold) {
        result.anomalous = true;
        result.reason = AnomalyReason::ZScore;
    }

    recent_.push_back(x);
    if (recent_.size() > config_.flatlineWindow) {
        recent_.pop_front();
    }
    if (recent_.size() == config_.flatlineWindow) {
        const auto [lo, hi] = std::minmax_element(recent_.begin(), recent_.end());
        if (*hi - *lo <= config_.flatlineEpsilon) {
            result.anomalous = true;
            result.reason = AnomalyReason::Flatline;
        }
    }

    if (config_.onlineAdaptation && !result.anomalous) {
        // Welford update.
        ++count_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(count_);
        m2_ += delta * (x - mean_);
    }
    return result;
}

Json AnomalyModel::toJson() const {
    return Json{{"mean", mean_},
                {"stdDev", stdDev()},
                {"m2", m2_},
                {"count", count_},
                {"zThreshold", config_.zThreshold},
                {"flatlineWindow", config_.flatlineWindow},
                {"flatlineEpsilon", config_.flatlineEpsilon},
                {"onlineAdaptation", config_.onlineAdaptation}};
}

AnomalyModel AnomalyModel::fromJson(const Json& json) {
    AnomalyModel model;
    model.config_.zThreshold = numberField(json, "zThreshold");
    model.config_.flatlineWindow = json.at("flatlineWindow").get<std::size_t>();
    model.config_.flatlineEpsilon = numberField(json, "flatlineEpsilon");
    model.config_.onlineAdaptation = json.value("onlineAdaptation", false);
    model.config_.validate();
    model.count_ = json.at("count").get<std::size_t>();
    model.mean_ = numberField(json, "mean");
    model.m2_ = numberField(json, "m2");
    require(model.count_ >= 2, ErrorKind::Validation, "stored anomaly model has fewer than two samples");
    return model;
}

}// namespace cityforge::executors
