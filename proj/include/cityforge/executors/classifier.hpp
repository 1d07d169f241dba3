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
#include <map>
#include <span>
#include <string>

namespace cityforge::executors {

struct TrainingSample {
    std::string tag;
    double value = 0.0;
};

struct Centroid {
    double value = 0.0;
    std::size_t sampleCount = 0;
};

struct Classification {
    std::string tag;
    /// d2 / (d1 + d2) over the two nearest centroids; 1 with a single centroid or d1 = d2 = 0.
    double confidence = 1.0;
};

/// One-dimensional nearest-centroid classifier.
class ClassifierModel {
  public:
    /// One centroid per distinct tag, at the mean of that tag's values.
    static ClassifierModel train(std::span<const TrainingSample> samples);
    static ClassifierModel fromCentroids(std::map<std::string, Centroid> centroids);

    /// Nearest centroid; equal distances go to the greater centroid value, then the smaller tag.
    Classification classify(double x) const;

    const std::map<std::string, Centroid>& centroids() const { return centroids_; }

    Json toJson() const;
    static ClassifierModel fromJson(const Json& json);

  private:
    std::map<std::string, Centroid> centroids_;
};

}// namespace cityforge::executors
