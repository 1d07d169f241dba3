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

#include <cityforge/common/error.hpp>
#include <cityforge/common/time.hpp>
#include <cityforge/common/value.hpp>

#include <httplib.h>

#include <functional>
#include <optional>
#include <string>

namespace cityforge::service::detail {

using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

void sendJson(httplib::Response& res, int status, const Json& body);
void sendError(httplib::Response& res, ErrorKind kind, const std::string& message);

/// Turns thrown errors into `{"error", "message"}` responses.
Handler guarded(Handler handler);

std::optional<std::string> param(const httplib::Request& req, const char* name);
std::string requiredParam(const httplib::Request& req, const char* name);
std::optional<Instant> instantParam(const httplib::Request& req, const char* name);
TimeInterval intervalParam(const httplib::Request& req, const char* from = "from", const char* to = "to");
bool boolParam(const httplib::Request& req, const char* name, bool fallback);
Json jsonBody(const httplib::Request& req);

bool isLoopback(const std::string& address);

}// namespace cityforge::service::detail
