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
#include "client.hpp"

#include <cityforge/common/url.hpp>

#include <httplib.h>

#include <algorithm>
#include <ostream>
#include <vector>

namespace cityforge::cli {

Client::Client(std::string baseUrl) : baseUrl_(std::move(baseUrl)) {
    try {
        const auto url = Url::parse(baseUrl_);
        origin_ = url.origin();
        prefix_ = url.path == "/" ? "" : url.path;
        while (!prefix_.empty() && prefix_.back() == '/') {
            prefix_.pop_back();
        }
    } catch (const std::exception& e) {
        throw CliError(kUsage, "invalid service URL '" + baseUrl_ + "': " + e.what());
    }
}

Json Client::get(const std::string& path) const { return call("GET", path, "", ""); }
Json Client::post(const std::string& path, const Json& body) const { return call("POST", path, body.dump(), "application/json"); }
Json Client::postText(const std::string& path, const std::string& body, const std::string& contentType) const {
    return call("POST", path, body, contentType);
}
Json Client::del(const std::string& path) const { return call("DELETE", path, "", ""); }

Json Client::call(const std::string& method, const std::string& path, const std::string& body, const std::string& contentType) const {
    httplib::Client client(origin_);
    client.set_connection_timeout(std::chrono::seconds(3));
    client.set_read_timeout(std::chrono::seconds(60));
    const auto target = prefix_ + path;
    httplib::Result result = method == "GET"    ? client.Get(target)
                             : method == "POST" ? client.Post(target, body, contentType)
                                                : client.Delete(target);
    if (!result) {
        throw CliError(kRemote, "cannot reach " + baseUrl_ + ": " + httplib::to_string(result.error()));
    }
    Json parsed;
    if (!result->body.empty()) {
        parsed = Json::parse(result->body, nullptr, false);
    }
    if (result->status >= 200 && result->status < 300) {
        return parsed.is_discarded() ? Json(result->body) : parsed;
    }
    std::string message = method + " " + path + " failed with status " + std::to_string(result->status);
    if (parsed.is_object() && parsed.contains("message")) {
        message = parsed.value("error", "Error") + ": " + parsed.value("message", "");
    }
    throw CliError(kRemote, message);
}

OutputFormat outputFormatFromString(const std::string& text) {
    if (text == "json") {
        return OutputFormat::Json;
    }
    if (text == "table") {
        return OutputFormat::Table;
    }
    if (text == "csv") {
        return OutputFormat::Csv;
    }
    throw CliError(kUsage, "unknown output format '" + text + "' (json, table, csv)");
}

namespace {

std::string cell(const Json& value, OutputFormat format) {
    if (value.is_null()) {
        return format == OutputFormat::Table ? "-" : "";
    }
    if (value.is_string()) {
        return value.get<std::string>();
    }
    return value.dump();
}

std::string csvQuote(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) {
        return text;
    }
    std::string out = "\"";
    for (const char c : text) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

void writeRows(std::ostream& out, const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows,
               OutputFormat format) {
    if (format == OutputFormat::Csv) {
        auto line = [&out](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                out << (i ? "," : "") << csvQuote(cells[i]);
            }
            out << '\n';
        };
        line(header);
        for (const auto& row : rows) {
            line(row);
        }
        return;
    }
    std::vector<std::size_t> widths(header.size());
    for (std::size_t i = 0; i < header.size(); ++i) {
        widths[i] = header[i].size();
        for (const auto& row : rows) {
            widths[i] = std::max(widths[i], row[i].size());
        }
    }
    auto line = [&](const std::vector<std::string>& cells) {
        std::string text;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            text += cells[i];
            if (i + 1 < cells.size()) {
                text += std::string(widths[i] - cells[i].size() + 2, ' ');
            }
        }
        out << text << '\n';
    };
    line(header);
    for (const auto& row : rows) {
        line(row);
    }
}

}// namespace

void render(std::ostream& out, const Json& value, OutputFormat format) {
    if (format == OutputFormat::Json) {
        out << value.dump(2) << '\n';
        return;
    }
    if (value.is_object()) {
        const Json* onlyArray = nullptr;
        std::size_t arrays = 0;
        for (const auto& [key, item] : value.items()) {
            if (item.is_array()) {
                onlyArray = &item;
                ++arrays;
            }
        }
        if (arrays == 1 && onlyArray->size() > 0 && onlyArray->front().is_object()) {
            render(out, *onlyArray, format);
            return;
        }
        std::vector<std::vector<std::string>> rows;
        for (const auto& [key, item] : value.items()) {
            rows.push_back({key, cell(item, format)});
        }
        writeRows(out, {"field", "value"}, rows, format);
        return;
    }
    if (value.is_array()) {
        std::vector<std::string> header;
        for (const auto& item : value) {
            if (!item.is_object()) {
                header = {"value"};
                break;
            }
            for (const auto& [key, _] : item.items()) {
                if (std::find(header.begin(), header.end(), key) == header.end()) {
                    header.push_back(key);
                }
            }
        }
        std::vector<std::vector<std::string>> rows;
        for (const auto& item : value) {
            std::vector<std::string> row;
            for (const auto& key : header) {
                if (!item.is_object()) {
                    row.push_back(cell(item, format));
                } else {
                    row.push_back(item.contains(key) ? cell(item.at(key), format) : cell(nullptr, format));
                }
            }
            rows.push_back(std::move(row));
        }
        if (!header.empty()) {
            writeRows(out, header, rows, format);
        }
        return;
    }
    out << cell(value, format) << '\n';
}

}// namespace cityforge::cli
