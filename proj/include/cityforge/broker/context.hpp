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

#include <cityforge/common/geo.hpp>
#include <cityforge/common/time.hpp>
#include <cityforge/common/value.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

namespace cityforge::broker {

struct AttributeValue {
    Scalar value;
    Instant timestamp;
    std::optional<Location> location;
};

using AttributeMap = std::map<std::string, AttributeValue>;

struct ContextEntity {
    std::string id;
    std::string type;
    AttributeMap attributes;
    std::uint64_t version = 0;
    /// Most recent location carried by any attribute update.
    std::optional<Location> location;
};

struct ContextQuery {
    std::optional<std::string> idPattern;
    std::optional<std::string> entityType;
    std::optional<std::set<std::string>> attrs;
    std::optional<BoundingBox> bbox;

    bool operator==(const ContextQuery&) const = default;
};

/// A ContextQuery with its id pattern compiled; construction validates the query.
class QueryMatcher {
  public:
    explicit QueryMatcher(ContextQuery query);

    const ContextQuery& query() const { return query_; }

    /// Read-side match: attribute filter requires at least one listed attribute on the entity.
    bool matches(const ContextEntity& entity) const;

    /// Update-side match against post-update state; the attribute filter applies to the updated names
    /// and bbox uses the update's location, falling back to the entity's last known location.
    bool matchesUpdate(const ContextEntity& entity, const AttributeMap& update) const;

  private:
    bool matchesIdentity(const ContextEntity& entity) const;

    ContextQuery query_;
    std::optional<std::regex> pattern_;
};

struct Subscription {
    std::string id;
    ContextQuery query;
    std::string callbackUrl;
    Instant createdAt;
};

}// namespace cityforge::broker
