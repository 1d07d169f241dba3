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

#include <string>
#include <string_view>

namespace cityforge {

/// http(s) URL split into the parts an HTTP client needs.
struct Url {
    std::string scheme;
    std::string host;
    int port = 0;
    std::string path;

    /// `scheme://host:port`
    std::string origin() const;

    /// Throws Error(Validation) unless the text is an absolute http/https URL.
    static Url parse(std::string_view text);
};

std::string percentEncode(std::string_view text);

}// namespace cityforge
