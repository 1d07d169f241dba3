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

#include <cityforge/common/transport.hpp>
#include <cityforge/warehouse/warehouse.hpp>

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

namespace cityforge::warehouse {

struct PublisherStats {
    std::size_t pushes = 0;
    std::size_t failures = 0;
};

/// Pushes the discovery export to a webhook after annotation changes, at most once per debounce interval.
class DiscoveryPublisher {
  public:
    DiscoveryPublisher(KnowledgeWarehouse& warehouse, std::shared_ptr<Transport> transport, std::string url,
                       std::chrono::milliseconds debounce = std::chrono::milliseconds(1000));
    ~DiscoveryPublisher();
    DiscoveryPublisher(const DiscoveryPublisher&) = delete;
    DiscoveryPublisher& operator=(const DiscoveryPublisher&) = delete;

    void markDirty();
    /// Blocks until no push is pending.
    void flush();
    PublisherStats stats() const;

  private:
    void run();

    KnowledgeWarehouse& warehouse_;
    std::shared_ptr<Transport> transport_;
    std::string url_;
    std::chrono::milliseconds debounce_;

    mutable std::mutex mutex_;
    std::condition_variable wake_;
    std::condition_variable idle_;
    bool dirty_ = false;
    bool pushing_ = false;
    bool stopping_ = false;
    std::chrono::steady_clock::time_point lastPush_{};
    PublisherStats stats_;
    std::thread worker_;
};

}// namespace cityforge::warehouse
