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
#include <optional>
#include <string>
#include <string_view>

namespace cityforge {

/// UTC instant with millisecond resolution. All timestamps in the system use it.
using Instant = std::chrono::sys_time<std::chrono::milliseconds>;
using Date = std::chrono::year_month_day;

Instant now();

/// Accepts `YYYY-MM-DDTHH:MM:SS[.fff][Z|+HH:MM|-HH:MM]`; a missing zone means UTC.
/// Throws Error(Validation) on malformed input.
Instant parseInstant(std::string_view text);

/// `YYYY-MM-DDTHH:MM:SSZ`, with `.mmm` only when the millisecond part is nonzero.
std::string formatInstant(Instant instant);

Date parseDate(std::string_view text);
std::string formatDate(Date date);

inline Instant startOf(Date date) { return Instant{std::chrono::sys_days{date}}; }
inline Date dateOf(Instant instant) { return Date{std::chrono::floor<std::chrono::days>(instant)}; }
std::chrono::weekday weekdayOf(Instant instant);
int hourOf(Instant instant);

/// Three-letter English abbreviation (MON..SUN), case-insensitive; full names also accepted.
std::optional<std::chrono::weekday> parseWeekday(std::string_view text);
std::string formatWeekday(std::chrono::weekday day);

/// Half-open [from, to) interval; either side may be open-ended.
struct TimeInterval {
    std::optional<Instant> from;
    std::optional<Instant> to;

    bool contains(Instant t) const { return (!from || t >= *from) && (!to || t < *to); }
    /// Throws Error(Validation) when from > to.
    void validate() const;
};

}// namespace cityforge
