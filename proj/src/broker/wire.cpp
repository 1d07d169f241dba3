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
#include <cityforge/broker/wire.hpp>
#include <cityforge/common/error.hpp>
#include <cityforge/common/text.hpp>

namespace cityforge::broker::wire {

namespace {

bool isReserved(const std::string& key) { return key == "id" || key == "type"; }

}// namespace

Json toJson(const AttributeValue& value) {
    Json metadata{{"timestamp", formatInstant(value.timestamp)}};
    if (value.location) {
        metadata["location"] = cityforge::toJson(*value.location);
    }
    return Json{{"value", cityforge::toJson(value.value)}, {"metadata", metadata}};
}

AttributeMap parseAttributes(const Json& body, Instant receivedAt) {
    require(body.is_object(), ErrorKind::Protocol, "attribute body must be a JSON object");
    AttributeMap attrs;
    for (const auto& [name, entry] : body.items()) {
        if (isReserved(name)) {
            continue;
        }
        require(!name.empty(), ErrorKind::Protocol, "attribute name must not be empty");
        require(entry.is_object(), ErrorKind::Protocol, "attribute '" + name + "' must be an object with a value");
        AttributeValue value{scalarFromJson(field(entry, "value")), receivedAt, std::nullopt};
        if (entry.contains("metadata")) {
            const Json& metadata = entry.at("metadata");
            require(metadata.is_object(), ErrorKind::Protocol, "metadata must be an object");
            if (auto ts = optionalString(metadata, "timestamp")) {
                try {
                    value.timestamp = parseInstant(*ts);
                } catch (const Error& e) {
                    fail(ErrorKind::Protocol, e.what());
                }
            }
            if (metadata.contains("location") && !metadata.at("location").is_null()) {
                try {
                    value.location = locationFromJson(metadata.at("location"));
                } catch (const Error& e) {
                    fail(ErrorKind::Protocol, e.what());
                }
            }
        }
        attrs.emplace(name, std::move(value));
    }
    return attrs;
}

Json entityJson(const std::string& id, const std::string& type, const AttributeMap& attrs) {
    Json out{{"id", id}, {"type", type}};
    for (const auto& [name, value] : attrs) {
        out[name] = toJson(value);
    }
    return out;
}

Json toJson(const ContextEntity& entity, const std::optional<std::set<std::string>>& projection) {
    Json out{{"id", entity.id}, {"type", entity.type}};
    for (const auto& [name, value] : entity.attributes) {
        if (!projection || projection->contains(name)) {
            out[name] = toJson(value);
        }
    }
    return out;
}

Json toJson(const ContextQuery& query) {
    Json out = Json::object();
    if (query.idPattern) {
        out["idPattern"] = *query.idPattern;
    }
    if (query.entityType) {
        out["type"] = *query.entityType;
    }
    if (query.attrs) {
        out["attrs"] = Json(std::vector<std::string>(query.attrs->begin(), query.attrs->end()));
    }
    if (query.bbox) {
        const auto& b = *query.bbox;
        out["bbox"] = Json{{"latMin", b.latMin}, {"lonMin", b.lonMin}, {"latMax", b.latMax}, {"lonMax", b.lonMax}};
    }
    return out;
}

ContextQuery queryFromJson(const Json& json) {
    ContextQuery query;
    if (json.is_null()) {
        return query;
    }
    require(json.is_object(), ErrorKind::Protocol, "query must be an object");
    query.idPattern = optionalString(json, "idPattern");
    query.entityType = optionalString(json, "type");
    if (!query.entityType) {
        query.entityType = optionalString(json, "entityType");
    }
    if (json.contains("attrs") && !json.at("attrs").is_null()) {
        const Json& attrs = json.at("attrs");
        std::set<std::string> names;
        if (attrs.is_string()) {
            for (auto& name : split(attrs.get<std::string>(), ',')) {
                names.insert(std::string(trim(name)));
            }
        } else {
            require(attrs.is_array(), ErrorKind::Protocol, "attrs must be an array of names");
            for (const auto& name : attrs) {
                require(name.is_string(), ErrorKind::Protocol, "attrs must be an array of names");
                names.insert(name.get<std::string>());
            }
        }
        query.attrs = std::move(names);
    }
    if (json.contains("bbox") && !json.at("bbox").is_null()) {
        const Json& b = json.at("bbox");
        BoundingBox box;
        if (b.is_string()) {
            box = BoundingBox::parse(b.get<std::string>());
        } else if (b.is_array()) {
            require(b.size() == 4, ErrorKind::Protocol, "bbox array needs four numbers");
            box = BoundingBox{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
        } else {
            box = BoundingBox{numberField(b, "latMin"), numberField(b, "lonMin"), numberField(b, "latMax"), numberField(b, "lonMax")};
        }
        box.validate();
        query.bbox = box;
    }
    return query;
}

Json notificationJson(const std::string& subscriptionId, const std::string& entityId, const std::string& entityType,
                      const AttributeMap& attrs) {
    return Json{{"subscriptionId", subscriptionId}, {"data", Json::array({entityJson(entityId, entityType, attrs)})}};
}

Notification parseNotification(const Json& body, Instant receivedAt) {
    require(body.is_object(), ErrorKind::Protocol, "notification must be a JSON object");
    Notification notification;
    notification.subscriptionId = optionalString(body, "subscriptionId");
    const Json& data = field(body, "data");
    require(data.is_array(), ErrorKind::Protocol, "notification data must be an array");
    for (const auto& item : data) {
        NotifiedEntity entity;
        entity.id = stringField(item, "id");
        entity.type = optionalString(item, "type").value_or("");
        entity.attributes = parseAttributes(item, receivedAt);
        notification.data.push_back(std::move(entity));
    }
    return notification;
}

}// namespace cityforge::broker::wire
