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
#include <cityforge/common/value.hpp>

#include <cmath>

namespace cityforge {

Json toJson(const Scalar& value) {
    return std::visit([](const auto& v) { return Json(v); }, value);
}

Scalar scalarFromJson(const Json& json) {
    if (json.is_number()) {
        const double v = json.get<double>();
        require(std::isfinite(v), ErrorKind::Protocol, "numeric value must be finite");
        return v;
    }
    if (json.is_string()) {
        return json.get<std::string>();
    }
    fail(ErrorKind::Protocol, "value must be a number or a string");
}

Json toJson(const Location& location) { return Json{{"lat", location.lat}, {"lon", location.lon}}; }

Location locationFromJson(const Json& json) {
    require(json.is_object(), ErrorKind::Protocol, "location must be an object");
    Location location{numberField(json, "lat"), numberField(json, "lon")};
    location.validate();
    return location;
}

const Json& field(const Json& object, const char* name) {
    require(object.is_object(), ErrorKind::Protocol, std::string("expected an object holding '") + name + "'");
    const auto it = object.find(name);
    require(it != object.end(), ErrorKind::Protocol, std::string("missing field '") + name + "'");
    return *it;
}

std::string stringField(const Json& object, const char* name) {
    const Json& value = field(object, name);
    require(value.is_string(), ErrorKind::Protocol, std::string("field '") + name + "' must be a string");
    return value.get<std::string>();
}

std::optional<std::string> optionalString(const Json& object, const char* name) {
    if (!object.is_object() || !object.contains(name) || object.at(name).is_null()) {
        return std::nullopt;
    }
    return stringField(object, name);
}

double numberField(const Json& object, const char* name) {
    const Json& value = field(object, name);
    require(value.is_number(), ErrorKind::Protocol, std::string("field '") + name + "' must be a number");
    return value.get<double>();
}

Json parseJson(const std::string& body) {
    try {
        return Json::parse(body);
    } catch (const Json::parse_error& e) {
        fail(ErrorKind::Protocol, std::string("malformed JSON: ") + e.what());
    }
}

}// namespace cityforge
