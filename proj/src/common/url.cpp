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
#include <cityforge/common/url.hpp>

#include <cctype>
#include <regex>

namespace cityforge {

std::string Url::origin() const { return scheme + "://" + host + ":" + std::to_string(port); }

Url Url::parse(std::string_view text) {
    static const std::regex pattern(R"(^(https?)://([A-Za-z0-9._-]+|\[[0-9A-Fa-f:.]+\])(?::([0-9]{1,5}))?(/[^\s#]*)?$)");
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_match(text.begin(), text.end(), m, pattern)) {
        fail(ErrorKind::Validation, "invalid URL '" + std::string(text) + "'");
    }
    Url url;
    url.scheme = m[1].str();
    url.host = m[2].str();
    url.port = m[3].matched ? std::stoi(m[3].str()) : (url.scheme == "https" ? 443 : 80);
    require(url.port > 0 && url.port < 65536, ErrorKind::Validation, "invalid URL port");
    url.path = m[4].matched ? m[4].str() : "/";
    return url;
}

std::string percentEncode(std::string_view text) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : text) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~' || c == ':') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(kHex[c >> 4U]);
            out.push_back(kHex[c & 0xFU]);
        }
    }
    return out;
}

}// namespace cityforge
