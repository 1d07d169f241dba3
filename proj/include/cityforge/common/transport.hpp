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

#include <chrono>
#include <string>

namespace cityforge {

struct TransportResponse {
    /// HTTP status, or 0 when no response arrived (refused, timeout, DNS).
    int status = 0;
    std::string error;

    bool ok() const { return status >= 200 && status < 300; }
};

/// Outbound POST used for webhook delivery.
class Transport {
  public:
    virtual ~Transport() = default;
    virtual TransportResponse post(const std::string& url, const std::string& body) = 0;
};

class HttpTransport final : public Transport {
  public:
    explicit HttpTransport(std::chrono::milliseconds timeout = std::chrono::seconds(2)) : timeout_(timeout) {}
    TransportResponse post(const std::string& url, const std::string& body) override;

  private:
    std::chrono::milliseconds timeout_;
};

}// namespace cityforge
