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

#include <optional>
#include <string>
#include <vector>

// JSON shapes shared by the broker HTTP API, notifications and the per-job ingest endpoint.
namespace cityforge::broker::wire {

Json toJson(const AttributeValue& value);

/// `{"<attr>": {"value": v, "metadata": {"timestamp": ..., "location": {...}}}}`.
/// Missing timestamps are set to `receivedAt`.
AttributeMap parseAttributes(const Json& body, Instant receivedAt);

/// Entity with its attributes inlined next to `id` and `type`.
Json toJson(const ContextEntity& entity, const std::optional<std::set<std::string>>& projection = std::nullopt);
Json entityJson(const std::string& id, const std::string& type, const AttributeMap& attrs);

Json toJson(const ContextQuery& query);
ContextQuery queryFromJson(const Json& json);

struct NotifiedEntity {
    std::string id;
    std::string type;
    AttributeMap attributes;
};

struct Notification {
    std::optional<std::string> subscriptionId;
    std::vector<NotifiedEntity> data;
};

Json notificationJson(const std::string& subscriptionId, const std::string& entityId, const std::string& entityType,
                      const AttributeMap& attrs);

/// Throws Error(Protocol) when the body is not notification-shaped.
Notification parseNotification(const Json& body, Instant receivedAt);

}// namespace cityforge::broker::wire
