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

#include <cityforge/analytics/series.hpp>

#include <array>
#include <chrono>
#include <optional>
#include <set>
#include <span>
#include <vector>

namespace cityforge::analytics {

enum class Aggregator { Mean, Last };

struct AlignedPair {
    Instant bucketStart;
    double a = 0.0;
    double b = 0.0;

    bool operator==(const AlignedPair&) const = default;
};

/// Buckets both series on UTC-aligned grids and keeps the buckets where both have data.
std::vector<AlignedPair> align(const Series& a, const Series& b, std::chrono::seconds bucket = std::chrono::seconds(600),
                               Aggregator aggregator = Aggregator::Mean);

/// Sample Pearson coefficient; nullopt for fewer than 2 pairs or a constant side.
std::optional<double> pearson(std::span<const AlignedPair> pairs);
std::optional<double> pearson(std::span<const double> a, std::span<const double> b);

struct DailyCorrelation {
    Date date;
    std::optional<double> r;
    std::size_t pairCount = 0;
};

constexpr std::size_t kMinDailyPairs = 20;

/// Aligned pairs partitioned by UTC day; days below `minPairs` get no coefficient.
std::vector<DailyCorrelation> dailyPearson(const Series& a, const Series& b, std::chrono::seconds bucket = std::chrono::seconds(600),
                                           std::size_t minPairs = kMinDailyPairs);
std::vector<DailyCorrelation> dailyPearson(std::span<const AlignedPair> pairs, std::size_t minPairs = kMinDailyPairs);

/// Mean per UTC hour of day; hours without data are nullopt.
using HourlyProfile = std::array<std::optional<double>, 24>;

/// An empty weekday set means every day. Throws Error(Validation) when no point qualifies.
HourlyProfile hourlyProfile(const Series& series, const std::set<unsigned>& weekdays = {});

struct Gap {
    Instant start;
    Instant end;

    bool operator==(const Gap&) const = default;
};

/// Spans between consecutive points longer than `maxGap`.
std::vector<Gap> detectGaps(const Series& series, std::chrono::seconds maxGap);

/// mean(A) / mean(B); nullopt when mean(B) is 0. Throws Error(Validation) for an empty period.
std::optional<double> seasonalRatio(const Series& series, const TimeInterval& periodA, const TimeInterval& periodB);

}// namespace cityforge::analytics
