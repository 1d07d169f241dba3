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
#include <cityforge/common/text.hpp>
#include <cityforge/common/url.hpp>
#include <cityforge/common/value.hpp>
#include <cityforge/simulator/replay.hpp>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <thread>

namespace cityforge::simulator {

namespace {

class BrokerSink final : public UpdateSink {
  public:
    explicit BrokerSink(const std::string& brokerUrl) : target_(Url::parse(brokerUrl)), client_(target_.origin()) {
        client_.set_keep_alive(true);
        client_.set_tcp_nodelay(true);
        client_.set_connection_timeout(2, 0);
        client_.set_read_timeout(10, 0);
        while (!target_.path.empty() && target_.path.back() == '/') {
            target_.path.pop_back();
        }
    }

    void send(const analytics::Reading& reading) override {
        std::string path = target_.path + "/v2/entities/" + percentEncode(reading.assetUrn) + "/attrs";
        const auto segments = split(reading.assetUrn, ':');
        if (segments.size() >= 4) {
            path += "?type=" + percentEncode(segments[segments.size() - 2]);
        }
        const Json body{{reading.attribute, Json{{"value", reading.value}, {"metadata", Json{{"timestamp", formatInstant(reading.timestamp)}}}}}};
        const auto response = client_.Post(path, body.dump(), "application/json");
        if (!response) {
            fail(ErrorKind::Unavailable, "broker unreachable: " + httplib::to_string(response.error()));
        }
        require(response->status >= 200 && response->status < 300, ErrorKind::Protocol,
                "broker answered " + std::to_string(response->status) + ": " + response->body);
    }

  private:
    Url target_;
    httplib::Client client_;
};

}// namespace

std::unique_ptr<UpdateSink> makeBrokerSink(const std::string& brokerUrl) { return std::make_unique<BrokerSink>(brokerUrl); }

std::vector<std::filesystem::path> datasetFiles(const std::filesystem::path& directory) {
    require(std::filesystem::is_directory(directory), ErrorKind::Validation, "not a directory: " + directory.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(directory)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

std::vector<analytics::Reading> loadReplayRows(const std::vector<std::filesystem::path>& files, std::size_t& malformed) {
    std::vector<analytics::Reading> rows;
    for (const auto& file : files) {
        std::ifstream in(file);
        require(in.good(), ErrorKind::Validation, "cannot read " + file.string());
        auto parsed = analytics::readCsv(in);
        malformed += parsed.malformed;
        rows.insert(rows.end(), std::make_move_iterator(parsed.rows.begin()), std::make_move_iterator(parsed.rows.end()));
    }
    std::stable_sort(rows.begin(), rows.end(), [](const auto& l, const auto& r) { return l.timestamp < r.timestamp; });
    return rows;
}

ReplayReport replay(const std::vector<std::filesystem::path>& files, UpdateSink& sink, const ReplayOptions& options) {
    require(options.speed > 0.0, ErrorKind::Validation, "speed must be > 0");
    ReplayReport report;
    const auto rows = loadReplayRows(files, report.skipped);
    const bool paced = std::isfinite(options.speed);
    const auto wallStart = std::chrono::steady_clock::now();
    for (const auto& row : rows) {
        if (paced) {
            const auto offset = std::chrono::duration<double>(row.timestamp - rows.front().timestamp) / options.speed;
            std::this_thread::sleep_until(wallStart + std::chrono::duration_cast<std::chrono::steady_clock::duration>(offset));
        }
        try {
            sink.send(row);
            ++report.sent;
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Unavailable) {
                report.aborted = true;
                report.message = e.what();
                spdlog::error("replay aborted after {} rows: {}", report.sent, e.what());
                break;
            }
            ++report.errors;
            spdlog::warn("replay row for {} rejected: {}", row.assetUrn, e.what());
        }
    }
    return report;
}

}// namespace cityforge::simulator
