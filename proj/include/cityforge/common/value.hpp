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

#include <json.hpp>

#include <optional>
#include <string>
#include <variant>

namespace cityforge {

using Json = nlohmann::json;

/// Attribute values and annotation notes are either numeric or text.
using Scalar = std::variant<double, std::string>;

inline bool isNumber(const Scalar& v) { return std::holds_alternative<double>(v); }
inline std::optional<double> asNumber(const Scalar& v) {
    if (const auto* d = std::get_if<double>(&v)) {
        return *d;
    }
    return std::nullopt;
}

Json toJson(const Scalar& value);
/// Throws Error(Protocol) for anything other than a finite number or a string.
Scalar scalarFromJson(const Json& json);

Json toJson(const Location& location);
Location locationFromJson(const Json& json);

/// Typed field access with Error(Protocol) on absence or type mismatch.
const Json& field(const Json& object, const char* name);
std::string stringField(const Json& object, const char* name);
std::optional<std::string> optionalString(const Json& object, const char* name);
double numberField(const Json& object, const char* name);

/// Parses a request body; malformed JSON becomes Error(Protocol).
Json parseJson(const std::string& body);

}// namespace cityforge
