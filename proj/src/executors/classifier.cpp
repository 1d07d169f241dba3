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
#include <cityforge/executors/classifier.hpp>

#include <cmath>
#include <limits>

namespace cityforge::executors {

ClassifierModel ClassifierModel::train(std::span<const TrainingSample> samples) {
    require(!samples.empty(), ErrorKind::Validation, "classifier needs at least one training sample");
    std::map<std::string, std::pair<double, std::size_t>> sums;
    for (const auto& sample : samples) {
        require(!sample.tag.empty(), ErrorKind::Validation, "training sample without a tag");
        require(std::isfinite(sample.value), ErrorKind::Validation, "training value must be finite");
        auto& [sum, count] = sums[sample.tag];
        sum += sample.value;
        ++count;
    }
    std::map<std::string, Centroid> centroids;
    for (const auto& [tag, acc] : sums) {
        centroids.emplace(tag, Centroid{acc.first / static_cast<double>(acc.second), acc.second});
    }
    return fromCentroids(std::move(centroids));
}

ClassifierModel ClassifierModel::fromCentroids(std::map<std::string, Centroid> centroids) {
    require(!centroids.empty(), ErrorKind::Validation, "classifier needs at least one centroid");
    for (const auto& [tag, centroid] : centroids) {
        require(std::isfinite(centroid.value) && centroid.sampleCount > 0, ErrorKind::Validation,
                "invalid centroid for '" + tag + "'");
    }
    ClassifierModel model;
    model.centroids_ = std::move(centroids);
    return model;
}

Classification ClassifierModel::classify(double x) const {
    require(std::isfinite(x), ErrorKind::Validation, "cannot classify a non-finite value");
    const std::string* bestTag = nullptr;
    double bestCentroid = 0.0;
    double d1 = std::numeric_limits<double>::infinity();
    double d2 = std::numeric_limits<double>::infinity();
    // Tags iterate in ascending order, so on a full tie the first tag seen is kept.
    for (const auto& [tag, centroid] : centroids_) {
        const double d = std::abs(x - centroid.value);
        const bool better = d < d1 || (d == d1 && centroid.value > bestCentroid);
        if (better) {
            d2 = d1;
            d1 = d;
            bestTag = &tag;
            bestCentroid = centroid.value;
        } else if (d < d2) {
            d2 = d;
        }
    }
    Classification result{*bestTag, 1.0};
    if (centroids_.size() > 1 && d1 + d2 > 0.0) {
        result.confidence = d2 / (d1 + d2);
    }
    return result;
}

Json ClassifierModel::toJson() const {
    Json centroids = Json::object();
    for (const auto& [tag, centroid] : centroids_) {
        centroids[tag] = Json{{"centroid", centroid.value}, {"sampleCount", centroid.sampleCount}};
    }
    return Json{{"centroids", centroids}};
}

ClassifierModel ClassifierModel::fromJson(const Json& json) {
    std::map<std::string, Centroid> centroids;
    for (const auto& [tag, entry] : field(json, "centroids").items()) {
        centroids.emplace(tag, Centroid{numberField(entry, "centroid"), entry.at("sampleCount").get<std::size_t>()});
    }
    return fromCentroids(std::move(centroids));
}

}// namespace cityforge::executors
