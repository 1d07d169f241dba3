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
#include <cityforge/broker/broker.hpp>
#include <cityforge/broker/wire.hpp>
#include <cityforge/common/error.hpp>
#include <cityforge/common/text.hpp>
#include <cityforge/common/url.hpp>

#include <spdlog/spdlog.h>

#include <cmath>
#include <mutex>
#include <thread>

namespace cityforge::broker {

Broker::Broker(std::shared_ptr<Transport> transport, BrokerOptions options)
    : transport_(std::move(transport)), options_(std::move(options)), pool_(options_.deliveryWorkers) {}

Broker::~Broker() { pool_.waitIdle(); }

std::uint64_t Broker::updateEntity(const std::string& id, const std::optional<std::string>& type, AttributeMap attrs) {
    requireUrn(id, "entity id");
    require(!attrs.empty(), ErrorKind::Validation, "update carries no attributes");
    for (const auto& [name, value] : attrs) {
        if (const auto number = asNumber(value.value)) {
            require(std::isfinite(*number), ErrorKind::Validation, "attribute '" + name + "' is not finite");
        }
        if (value.location) {
            value.location->validate();
        }
    }

    std::vector<UpdateListener> listeners;
    std::string entityType;
    std::uint64_t version = 0;
    {
        std::unique_lock lock(mutex_);
        auto [it, inserted] = entities_.try_emplace(id);
        ContextEntity& entity = it->second;
        if (inserted) {
            entity.id = id;
            entity.type = type.value_or("Thing");
        } else if (type && !type->empty() && *type != entity.type) {
            fail(ErrorKind::Conflict, "entity '" + id + "' has type '" + entity.type + "', not '" + *type + "'");
        }
        for (const auto& [name, value] : attrs) {
            entity.attributes[name] = value;
            if (value.location) {
                entity.location = value.location;
            }
        }
        version = ++entity.version;
        entityType = entity.type;

        for (auto& [subId, active] : subscriptions_) {
            if (!active.matcher.matchesUpdate(entity, attrs)) {
                continue;
            }
            auto payload = wire::notificationJson(subId, id, entityType, attrs).dump();
            active.strand->post([this, subscription = active.subscription, live = active.live, payload = std::move(payload)] {
                if (live->load()) {
                    deliver(subscription, payload);
                }
            });
        }
        listeners = listeners_;
    }
    for (const auto& listener : listeners) {
        listener(id, entityType, attrs);
    }
    return version;
}

std::vector<ContextEntity> Broker::queryEntities(const ContextQuery& query) const {
    const QueryMatcher matcher(query);
    std::vector<ContextEntity> out;
    std::shared_lock lock(mutex_);
    for (const auto& [id, entity] : entities_) {
        if (!matcher.matches(entity)) {
            continue;
        }
        ContextEntity copy = entity;
        if (query.attrs) {
            std::erase_if(copy.attributes, [&](const auto& kv) { return !query.attrs->contains(kv.first); });
        }
        out.push_back(std::move(copy));
    }
    return out;
}

std::optional<ContextEntity> Broker::entity(const std::string& id) const {
    std::shared_lock lock(mutex_);
    const auto it = entities_.find(id);
    if (it == entities_.end()) {
        return std::nullopt;
    }
    return it->second;
}

Subscription Broker::subscribe(const ContextQuery& query, const std::string& callbackUrl) {
    Url::parse(callbackUrl);
    QueryMatcher matcher(query);
    std::unique_lock lock(mutex_);
    Subscription subscription{"sub-" + std::to_string(nextSubscription_++), query, callbackUrl, now()};
    subscriptions_.emplace(subscription.id, ActiveSubscription{subscription, std::move(matcher), pool_.makeStrand(),
                                                               std::make_shared<std::atomic<bool>>(true)});
    spdlog::debug("subscription {} -> {}", subscription.id, callbackUrl);
    return subscription;
}

void Broker::unsubscribe(const std::string& id) {
    std::unique_lock lock(mutex_);
    const auto it = subscriptions_.find(id);
    require(it != subscriptions_.end(), ErrorKind::NotFound, "no subscription '" + id + "'");
    it->second.live->store(false);
    subscriptions_.erase(it);
}

std::vector<Subscription> Broker::subscriptions() const {
    std::shared_lock lock(mutex_);
    std::vector<Subscription> out;
    for (const auto& [id, active] : subscriptions_) {
        out.push_back(active.subscription);
    }
    return out;
}

DeliveryResult Broker::deliver(const Subscription& subscription, const std::string& payload) {
    DeliveryResult result;
    const std::size_t maxAttempts = 1 + options_.retryDelays.size();
    for (std::size_t attempt = 0; attempt < maxAttempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(options_.retryDelays[attempt - 1]);
        }
        ++result.attempts;
        ++attempts_;
        TransportResponse response;
        try {
            response = transport_->post(subscription.callbackUrl, payload);
        } catch (const std::exception& e) {
            response = TransportResponse{0, e.what()};
        }
        result.lastStatus = response.status;
        if (response.ok()) {
            result.delivered = true;
            ++delivered_;
            return result;
        }
    }
    ++failed_;
    spdlog::warn("dropping notification for {} after {} attempts (last status {})", subscription.id, result.attempts,
                 result.lastStatus);
    return result;
}

DeliveryStats Broker::stats() const { return DeliveryStats{delivered_.load(), failed_.load(), attempts_.load()}; }

void Broker::addUpdateListener(UpdateListener listener) {
    std::unique_lock lock(mutex_);
    listeners_.push_back(std::move(listener));
}

void Broker::waitIdle() { pool_.waitIdle(); }

}// namespace cityforge::broker
