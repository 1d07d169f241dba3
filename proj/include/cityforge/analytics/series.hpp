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

#include <cityforge/common/time.hpp>

#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

namespace cityforge::analytics {

struct Point {
    Instant timestamp;
    double value = 0.0;

    bool operator==(const Point&) const = default;
};

/// Strictly increasing in time.
using Series = std::vector<Point>;

struct SeriesKey {
    std::string assetUrn;
    std::string attribute;

    auto operator<=>(const SeriesKey&) const = default;
};

/// One row of the shared CSV format `timestamp,asset_urn,attribute,value`.
struct Reading {
    Instant timestamp;
    std::string assetUrn;
    std::string attribute;
    double value = 0.0;
};

struct CsvReadResult {
    std::vector<Reading> rows;
    std::size_t malformed = 0;
};

/// Reads the CSV format; the header is required, malformed rows are counted and skipped.
CsvReadResult readCsv(std::istream& in);
void writeCsvHeader(std::ostream& out);
void writeCsvRow(std::ostream& out, const Reading& reading);

/// Concurrent history store. A repeated timestamp keeps the last value.
class SeriesStore {
  public:
    /// Throws Error(Validation) on a non-finite value.
    void record(const std::string& assetUrn, const std::string& attribute, Instant timestamp, double value);
    Series series(const std::string& assetUrn, const std::string& attribute, const TimeInterval& interval = {}) const;
    bool contains(const std::string& assetUrn, const std::string& attribute) const;
    std::vector<std::pair<SeriesKey, std::size_t>> keys() const;
    std::size_t pointCount() const;

    /// Returns the number of malformed rows skipped.
    std::size_t loadCsv(std::istream& in);
    void writeCsv(std::ostream& out) const;

  private:
    mutable std::shared_mutex mutex_;
    std::map<SeriesKey, std::map<Instant, double>> series_;
};

}// namespace cityforge::analytics
