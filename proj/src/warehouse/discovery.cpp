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
#include <cityforge/warehouse/discovery.hpp>

#include <spdlog/spdlog.h>

namespace cityforge::warehouse {

DiscoveryPublisher::DiscoveryPublisher(KnowledgeWarehouse& warehouse, std::shared_ptr<Transport> transport, std::string url,
                                       std::chrono::milliseconds debounce)
    : warehouse_(warehouse), transport_(std::move(transport)), url_(std::move(url)), debounce_(debounce), worker_([this] { run(); }) {}

DiscoveryPublisher::~DiscoveryPublisher() {
    {
        std::lock_guard lock(mutex_);
        stopping_ = true;
    }
    wake_.notify_all();
    worker_.join();
}

void DiscoveryPublisher::markDirty() {
    {
        std::lock_guard lock(mutex_);
        dirty_ = true;
    }
    wake_.notify_all();
}

void DiscoveryPublisher::flush() {
    std::unique_lock lock(mutex_);
    idle_.wait(lock, [this] { return (!dirty_ && !pushing_) || stopping_; });
}

PublisherStats DiscoveryPublisher::stats() const {
    std::lock_guard lock(mutex_);
    return stats_;
}

void DiscoveryPublisher::run() {
    std::unique_lock lock(mutex_);
    while (true) {
        wake_.wait(lock, [this] { return dirty_ || stopping_; });
        if (stopping_) {
            break;
        }
        const auto due = lastPush_ + debounce_;
        if (wake_.wait_until(lock, due, [this] { return stopping_; })) {
            break;
        }
        dirty_ = false;
        pushing_ = true;
        lock.unlock();
        const std::string body = toJson(warehouse_.discoveryExport()).dump();
        const auto response = transport_->post(url_, body);
        lock.lock();
        pushing_ = false;
        lastPush_ = std::chrono::steady_clock::now();
        ++stats_.pushes;
        if (!response.ok()) {
            ++stats_.failures;
            spdlog::warn("discovery push to {} failed: {}", url_, response.status == 0 ? response.error : std::to_string(response.status));
        }
        if (!dirty_) {
            idle_.notify_all();
        }
    }
    idle_.notify_all();
}

}// namespace cityforge::warehouse
