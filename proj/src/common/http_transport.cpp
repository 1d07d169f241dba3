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
#include <cityforge/common/transport.hpp>
#include <cityforge/common/url.hpp>

#include <httplib.h>

namespace cityforge {

TransportResponse HttpTransport::post(const std::string& url, const std::string& body) {
    const Url target = Url::parse(url);
    httplib::Client client(target.origin());
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());
    const auto response = client.Post(target.path, body, "application/json");
    if (!response) {
        return TransportResponse{0, httplib::to_string(response.error())};
    }
    return TransportResponse{response->status, {}};
}

}// namespace cityforge
