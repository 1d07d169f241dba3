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

#include <cstddef>
#include <filesystem>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace cityforge::simulator {

/// Destination of replayed readings.
class UpdateSink {
  public:
    virtual ~UpdateSink() = default;
    /// Throws Error(Unavailable) when the destination is unreachable; other errors count per row.
    virtual void send(const analytics::Reading& reading) = 0;
};

/// Posts `/v2/entities/{id}/attrs` on a broker over one keep-alive connection.
std::unique_ptr<UpdateSink> makeBrokerSink(const std::string& brokerUrl);

struct ReplayOptions {
    /// Time compression; infinity sends as fast as possible.
    double speed = std::numeric_limits<double>::infinity();
};

struct ReplayReport {
    std::size_t sent = 0;
    std::size_t skipped = 0;
    std::size_t errors = 0;
    bool aborted = false;
    std::string message;
};

/// All `*.csv` files, merged by timestamp; ties keep file-name then row order.
std::vector<analytics::Reading> loadReplayRows(const std::vector<std::filesystem::path>& files, std::size_t& malformed);
std::vector<std::filesystem::path> datasetFiles(const std::filesystem::path& directory);

ReplayReport replay(const std::vector<std::filesystem::path>& files, UpdateSink& sink, const ReplayOptions& options = {});

}// namespace cityforge::simulator
