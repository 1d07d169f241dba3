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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cityforge {

std::vector<std::string> split(std::string_view text, char separator);
std::string join(const std::vector<std::string>& parts, std::string_view separator);
std::string_view trim(std::string_view text);

/// Strict: the whole string must be a finite decimal number. Throws Error(Validation).
double parseDouble(std::string_view text);
std::int64_t parseInteger(std::string_view text);

/// `urn:<nid>:<nss>` with a non-empty namespace id and specific string, no whitespace.
bool isUrn(std::string_view text);
void requireUrn(std::string_view text, std::string_view what);

/// 128 random bits as 32 lowercase hex characters.
std::string randomToken();

/// Shortest decimal text that parses back to the same double.
std::string formatNumber(double value);

}// namespace cityforge
