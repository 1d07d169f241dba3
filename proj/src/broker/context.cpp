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
#include <cityforge/broker/context.hpp>
#include <cityforge/common/error.hpp>

namespace cityforge::broker {

QueryMatcher::QueryMatcher(ContextQuery query) : query_(std::move(query)) {
    if (query_.idPattern) {
        try {
            pattern_.emplace(*query_.idPattern, std::regex::ECMAScript);
        } catch (const std::regex_error& e) {
            fail(ErrorKind::Validation, "invalid idPattern '" + *query_.idPattern + "': " + e.what());
        }
    }
    if (query_.bbox) {
        query_.bbox->validate();
    }
}

bool QueryMatcher::matchesIdentity(const ContextEntity& entity) const {
    if (pattern_ && !std::regex_match(entity.id, *pattern_)) {
        return false;
    }
    return !query_.entityType || *query_.entityType == entity.type;
}

bool QueryMatcher::matches(const ContextEntity& entity) const {
    if (!matchesIdentity(entity)) {
        return false;
    }
    if (query_.attrs) {
        bool any = false;
        for (const auto& name : *query_.attrs) {
            any = any || entity.attributes.contains(name);
        }
        if (!any) {
            return false;
        }
    }
    return !query_.bbox || (entity.location && query_.bbox->contains(*entity.location));
}

bool QueryMatcher::matchesUpdate(const ContextEntity& entity, const AttributeMap& update) const {
    if (!matchesIdentity(entity)) {
        return false;
    }
    if (query_.attrs) {
        bool any = false;
        for (const auto& [name, value] : update) {
            any = any || query_.attrs->contains(name);
        }
        if (!any) {
            return false;
        }
    }
    if (query_.bbox) {
        std::optional<Location> where;
        for (const auto& [name, value] : update) {
            if (value.location) {
                where = value.location;
            }
        }
        if (!where) {
            where = entity.location;
        }
        return where && query_.bbox->contains(*where);
    }
    return true;
}

}// namespace cityforge::broker
