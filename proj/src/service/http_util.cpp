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
#include "http_util.hpp"

#include <cityforge/common/text.hpp>

#include <spdlog/spdlog.h>

namespace cityforge::service::detail {

void sendJson(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    if (status == 204) {
        return;
    }
    res.set_content(body.dump(), "application/json");
}

void sendError(httplib::Response& res, ErrorKind kind, const std::string& message) {
    sendJson(res, httpStatus(kind), Json{{"error", std::string(toString(kind))}, {"message", message}});
}

Handler guarded(Handler handler) {
    return [handler = std::move(handler)](const httplib::Request& req, httplib::Response& res) {
        try {
            handler(req, res);
        } catch (const Error& e) {
            sendError(res, e.kind(), e.what());
        } catch (const Json::exception& e) {
            sendError(res, ErrorKind::Protocol, e.what());
        } catch (const std::exception& e) {
            spdlog::error("{} {}: {}", req.method, req.path, e.what());
            sendJson(res, 500, Json{{"error", "Internal"}, {"message", e.what()}});
        }
    };
}

std::optional<std::string> param(const httplib::Request& req, const char* name) {
    if (!req.has_param(name)) {
        return std::nullopt;
    }
    auto value = req.get_param_value(name);
    if (value.empty()) {
        return std::nullopt;
    }
    return value;
}

std::string requiredParam(const httplib::Request& req, const char* name) {
    auto value = param(req, name);
    if (!value) {
        fail(ErrorKind::Validation, std::string("missing query parameter '") + name + "'");
    }
    return *value;
}

std::optional<Instant> instantParam(const httplib::Request& req, const char* name) {
    if (auto text = param(req, name)) {
        return parseInstant(*text);
    }
    return std::nullopt;
}

TimeInterval intervalParam(const httplib::Request& req, const char* from, const char* to) {
    TimeInterval interval{instantParam(req, from), instantParam(req, to)};
    interval.validate();
    return interval;
}

bool boolParam(const httplib::Request& req, const char* name, bool fallback) {
    auto text = param(req, name);
    if (!text) {
        return fallback;
    }
    if (*text == "true" || *text == "1") {
        return true;
    }
    if (*text == "false" || *text == "0") {
        return false;
    }
    fail(ErrorKind::Validation, std::string("parameter '") + name + "' must be true or false");
}

Json jsonBody(const httplib::Request& req) { return parseJson(req.body); }

bool isLoopback(const std::string& address) {
    return address == "::1" || address.starts_with("127.") || address.starts_with("::ffff:127.");
}

}// namespace cityforge::service::detail
