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

#include <cityforge/broker/context.hpp>
#include <cityforge/common/transport.hpp>
#include <cityforge/common/task_pool.hpp>

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

namespace cityforge::broker {

struct BrokerOptions {
    /// Delay before each retry; the size is the retry budget.
    std::vector<std::chrono::milliseconds> retryDelays{std::chrono::milliseconds(200), std::chrono::milliseconds(1000)};
    std::size_t deliveryWorkers = 4;
};

struct DeliveryResult {
    bool delivered = false;
    int attempts = 0;
    int lastStatus = 0;
};

struct DeliveryStats {
    std::uint64_t delivered = 0;
    std::uint64_t failed = 0;
    std::uint64_t attempts = 0;
};

/// Subscription side of the broker, the only part annotation jobs depend on.
class SubscriptionService {
  public:
    virtual ~SubscriptionService() = default;
    virtual Subscription subscribe(const ContextQuery& query, const std::string& callbackUrl) = 0;
    virtual void unsubscribe(const std::string& id) = 0;
};

/// Latest-value context store with query-filtered webhook subscriptions.
///
/// Updates are serialized; matching happens under the same lock as subscription changes, and
/// notifications are queued on a per-subscription strand so ingest never waits on a callback.
class Broker final : public SubscriptionService {
  public:
    using UpdateListener = std::function<void(const std::string& id, const std::string& type, const AttributeMap& attrs)>;

    explicit Broker(std::shared_ptr<Transport> transport, BrokerOptions options = {});
    ~Broker() override;

    /// Returns the entity's version after the update (1 for the first update).
    std::uint64_t updateEntity(const std::string& id, const std::optional<std::string>& type, AttributeMap attrs);

    /// Matching entities in ascending id order, projected to `query.attrs` when given.
    std::vector<ContextEntity> queryEntities(const ContextQuery& query) const;
    std::optional<ContextEntity> entity(const std::string& id) const;

    Subscription subscribe(const ContextQuery& query, const std::string& callbackUrl) override;
    void unsubscribe(const std::string& id) override;
    std::vector<Subscription> subscriptions() const;

    /// One POST plus the configured retries. Never throws.
    DeliveryResult deliver(const Subscription& subscription, const std::string& payload);

    DeliveryStats stats() const;

    /// Called synchronously after each accepted update (history sink).
    void addUpdateListener(UpdateListener listener);

    /// Blocks until queued notifications have been delivered or dropped.
    void waitIdle();

  private:
    struct ActiveSubscription {
        Subscription subscription;
        QueryMatcher matcher;
        std::shared_ptr<Strand> strand;
        std::shared_ptr<std::atomic<bool>> live;
    };

    std::shared_ptr<Transport> transport_;
    BrokerOptions options_;

    mutable std::shared_mutex mutex_;
    std::map<std::string, ContextEntity> entities_;
    std::map<std::string, ActiveSubscription> subscriptions_;
    std::vector<UpdateListener> listeners_;
    std::uint64_t nextSubscription_ = 1;

    std::atomic<std::uint64_t> delivered_{0};
    std::atomic<std::uint64_t> failed_{0};
    std::atomic<std::uint64_t> attempts_{0};

    // Declared last so queued deliveries drain before the members they use are destroyed.
    TaskPool pool_;
};

}// namespace cityforge::broker
