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

#include <cityforge/analytics/series.hpp>
#include <cityforge/simulator/config.hpp>

#include <filesystem>
#include <map>
#include <vector>

namespace cityforge::simulator {

struct Dataset {
    std::map<StreamId, std::vector<analytics::Reading>> streams;
    std::vector<FaultSpec> faults;
};

/// Pure function of the config.
Dataset generate(const CityConfig& config);

/// Noise-free parking availability in spots, before rounding.
double expectedParking(const CityConfig& config, Instant t);

/// Writes `<stream>.csv` per stream and `faults.json`.
void writeDataset(const Dataset& dataset, const std::filesystem::path& directory);

}// namespace cityforge::simulator
