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

#include <cityforge/common/value.hpp>

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace cityforge::cli {

enum ExitCode { kOk = 0, kUsage = 1, kRemote = 2, kIo = 3 };

class CliError : public std::runtime_error {
  public:
    CliError(int code, const std::string& message) : std::runtime_error(message), code_(code) {}
    int code() const { return code_; }

  private:
    int code_;
};

/// Blocking JSON client for the service API.
class Client {
  public:
    explicit Client(std::string baseUrl);

    Json get(const std::string& path) const;
    Json post(const std::string& path, const Json& body) const;
    Json postText(const std::string& path, const std::string& body, const std::string& contentType) const;
    Json del(const std::string& path) const;

    const std::string& baseUrl() const { return baseUrl_; }

  private:
    Json call(const std::string& method, const std::string& path, const std::string& body, const std::string& contentType) const;

    std::string baseUrl_;
    std::string origin_;
    std::string prefix_;
};

enum class OutputFormat { Json, Table, Csv };

OutputFormat outputFormatFromString(const std::string& text);

/// Arrays of objects become rows; an object holding a single array is rendered as that array.
void render(std::ostream& out, const Json& value, OutputFormat format);

}// namespace cityforge::cli
