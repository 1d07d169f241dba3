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
#include <cityforge/analytics/series.hpp>
#include <cityforge/common/error.hpp>
#include <cityforge/common/text.hpp>

#include <cmath>
#include <mutex>

namespace cityforge::analytics {

namespace {

constexpr std::string_view kHeader = "timestamp,asset_urn,attribute,value";

}// namespace

CsvReadResult readCsv(std::istream& in) {
    CsvReadResult result;
    std::string line;
    require(static_cast<bool>(std::getline(in, line)) && trim(line) == kHeader, ErrorKind::Validation,
            "CSV must start with the header '" + std::string(kHeader) + "'");
    while (std::getline(in, line)) {
        const auto text = trim(line);
        if (text.empty()) {
            continue;
        }
        const auto fields = split(text, ',');
        try {
            require(fields.size() == 4, ErrorKind::Validation, "expected 4 fields");
            Reading row{parseInstant(trim(fields[0])), std::string(trim(fields[1])), std::string(trim(fields[2])), parseDouble(trim(fields[3]))};
            requireUrn(row.assetUrn, "asset");
            require(!row.attribute.empty(), ErrorKind::Validation, "empty attribute");
            result.rows.push_back(std::move(row));
        } catch (const Error&) {
            ++result.malformed;
        }
    }
    return result;
}

void writeCsvHeader(std::ostream& out) { out << kHeader << '\n'; }

void writeCsvRow(std::ostream& out, const Reading& reading) {
    out << formatInstant(reading.timestamp) << ',' << reading.assetUrn << ',' << reading.attribute << ',' << formatNumber(reading.value)
        << '\n';
}

void SeriesStore::record(const std::string& assetUrn, const std::string& attribute, Instant timestamp, double value) {
    require(std::isfinite(value), ErrorKind::Validation, "series values must be finite");
    std::unique_lock lock(mutex_);
    series_[SeriesKey{assetUrn, attribute}][timestamp] = value;
}

Series SeriesStore::series(const std::string& assetUrn, const std::string& attribute, const TimeInterval& interval) const {
    interval.validate();
    std::shared_lock lock(mutex_);
    Series out;
    const auto it = series_.find(SeriesKey{assetUrn, attribute});
    if (it == series_.end()) {
        return out;
    }
    const auto& points = it->second;
    auto first = interval.from ? points.lower_bound(*interval.from) : points.begin();
    const auto last = interval.to ? points.lower_bound(*interval.to) : points.end();
    for (; first != last; ++first) {
        out.push_back(Point{first->first, first->second});
    }
    return out;
}

bool SeriesStore::contains(const std::string& assetUrn, const std::string& attribute) const {
    std::shared_lock lock(mutex_);
    return series_.contains(SeriesKey{assetUrn, attribute});
}

std::vector<std::pair<SeriesKey, std::size_t>> SeriesStore::keys() const {
    std::shared_lock lock(mutex_);
    std::vector<std::pair<SeriesKey, std::size_t>> out;
    for (const auto& [key, points] : series_) {
        out.emplace_back(key, points.size());
    }
    return out;
}

std::size_t SeriesStore::pointCount() const {
    std::shared_lock lock(mutex_);
    std::size_t n = 0;
    for (const auto& [key, points] : series_) {
        n += points.size();
    }
    return n;
}

std::size_t SeriesStore::loadCsv(std::istream& in) {
    const auto parsed = readCsv(in);
    for (const auto& row : parsed.rows) {
        record(row.assetUrn, row.attribute, row.timestamp, row.value);
    }
    return parsed.malformed;
}

void SeriesStore::writeCsv(std::ostream& out) const {
    std::shared_lock lock(mutex_);
    writeCsvHeader(out);
    for (const auto& [key, points] : series_) {
        for (const auto& [t, v] : points) {
            writeCsvRow(out, Reading{t, key.assetUrn, key.attribute, v});
        }
    }
}

}// namespace cityforge::analytics
