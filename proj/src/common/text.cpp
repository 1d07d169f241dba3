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
#include <cityforge/common/text.hpp>

#include <charconv>
#include <cmath>
#include <random>
#include <regex>

namespace cityforge {

std::vector<std::string> split(std::string_view text, char separator) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(separator, start);
        parts.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return parts;
}

std::string join(const std::vector<std::string>& parts, std::string_view separator) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) {
            out += separator;
        }
        out += parts[i];
    }
    return out;
}

std::string_view trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = text.find_last_not_of(" \t\r\n");
    return text.substr(first, last - first + 1);
}

double parseDouble(std::string_view text) {
    text = trim(text);
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    if (begin != end && *begin == '+') {
        ++begin;
    }
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || text.empty() || !std::isfinite(value)) {
        fail(ErrorKind::Validation, "not a finite number: '" + std::string(text) + "'");
    }
    return value;
}

std::int64_t parseInteger(std::string_view text) {
    text = trim(text);
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        fail(ErrorKind::Validation, "not an integer: '" + std::string(text) + "'");
    }
    return value;
}

bool isUrn(std::string_view text) {
    static const std::regex pattern(R"(^urn:[A-Za-z0-9][A-Za-z0-9-]{0,31}:[^\s]+$)", std::regex::icase);
    return std::regex_match(text.begin(), text.end(), pattern);
}

void requireUrn(std::string_view text, std::string_view what) {
    require(isUrn(text), ErrorKind::Validation, std::string(what) + " is not a URN: '" + std::string(text) + "'");
}

std::string randomToken() {
    static thread_local std::random_device device;
    static constexpr char kHex[] = "0123456789abcdef";
    std::string token;
    token.reserve(32);
    for (int word = 0; word < 4; ++word) {
        std::uint32_t bits = device();
        for (int nibble = 0; nibble < 8; ++nibble) {
            token.push_back(kHex[bits & 0xFU]);
            bits >>= 4U;
        }
    }
    return token;
}

std::string formatNumber(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, ptr);
}

}// namespace cityforge
