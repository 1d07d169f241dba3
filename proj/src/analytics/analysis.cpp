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
#include <cityforge/analytics/analysis.hpp>
#include <cityforge/common/error.hpp>

#include <algorithm>
#include <cmath>
#include <map>

namespace cityforge::analytics {

namespace {

struct Bucket {
    double sum = 0.0;
    std::size_t count = 0;
    double last = 0.0;

    double value(Aggregator aggregator) const { return aggregator == Aggregator::Mean ? sum / static_cast<double>(count) : last; }
};

std::map<Instant, Bucket> bucketize(const Series& series, std::chrono::milliseconds width) {
    std::map<Instant, Bucket> buckets;
    for (const auto& p : series) {
        const auto start = Instant{p.timestamp.time_since_epoch() / width * width};
        auto& b = buckets[start];
        b.sum += p.value;
        ++b.count;
        b.last = p.value;
    }
    return buckets;
}

double mean(const Series& series, const TimeInterval& period) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& p : series) {
        if (period.contains(p.timestamp)) {
            sum += p.value;
            ++n;
        }
    }
    require(n > 0, ErrorKind::Validation, "period contains no data");
    return sum / static_cast<double>(n);
}

}// namespace

std::vector<AlignedPair> align(const Series& a, const Series& b, std::chrono::seconds bucket, Aggregator aggregator) {
    require(bucket.count() > 0, ErrorKind::Validation, "bucket must be positive");
    const auto width = std::chrono::duration_cast<std::chrono::milliseconds>(bucket);
    const auto left = bucketize(a, width);
    const auto right = bucketize(b, width);
    std::vector<AlignedPair> out;
    auto l = left.begin();
    auto r = right.begin();
    while (l != left.end() && r != right.end()) {
        if (l->first < r->first) {
            ++l;
        } else if (r->first < l->first) {
            ++r;
        } else {
            out.push_back(AlignedPair{l->first, l->second.value(aggregator), r->second.value(aggregator)});
            ++l;
            ++r;
        }
    }
    return out;
}

std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size(), ErrorKind::Validation, "pearson needs equally long inputs");
    if (a.size() < 2) {
        return std::nullopt;
    }
    // Single-pass co-moment update.
    double meanA = 0.0;
    double meanB = 0.0;
    double m2A = 0.0;
    double m2B = 0.0;
    double cAB = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        const double dA = a[i] - meanA;
        const double dB = b[i] - meanB;
        meanA += dA / n;
        meanB += dB / n;
        m2A += dA * (a[i] - meanA);
        m2B += dB * (b[i] - meanB);
        cAB += dA * (b[i] - meanB);
    }
    if (m2A <= 0.0 || m2B <= 0.0) {
        return std::nullopt;
    }
    return std::clamp(cAB / std::sqrt(m2A * m2B), -1.0, 1.0);
}

std::optional<double> pearson(std::span<const AlignedPair> pairs) {
    std::vector<double> a;
    std::vector<double> b;
    a.reserve(pairs.size());
    b.reserve(pairs.size());
    for (const auto& p : pairs) {
        a.push_back(p.a);
        b.push_back(p.b);
    }
    return pearson(a, b);
}

std::vector<DailyCorrelation> dailyPearson(std::span<const AlignedPair> pairs, std::size_t minPairs) {
    std::vector<DailyCorrelation> out;
    std::size_t begin = 0;
    while (begin < pairs.size()) {
        const Date day = dateOf(pairs[begin].bucketStart);
        std::size_t end = begin;
        while (end < pairs.size() && dateOf(pairs[end].bucketStart) == day) {
            ++end;
        }
        DailyCorrelation entry{day, std::nullopt, end - begin};
        if (entry.pairCount >= std::max<std::size_t>(minPairs, 2)) {
            entry.r = pearson(pairs.subspan(begin, end - begin));
        }
        out.push_back(entry);
        begin = end;
    }
    return out;
}

std::vector<DailyCorrelation> dailyPearson(const Series& a, const Series& b, std::chrono::seconds bucket, std::size_t minPairs) {
    const auto pairs = align(a, b, bucket);
    return dailyPearson(pairs, minPairs);
}

HourlyProfile hourlyProfile(const Series& series, const std::set<unsigned>& weekdays) {
    std::array<double, 24> sum{};
    std::array<std::size_t, 24> count{};
    std::size_t total = 0;
    for (const auto& p : series) {
        if (!weekdays.empty() && !weekdays.contains(weekdayOf(p.timestamp).c_encoding())) {
            continue;
        }
        const auto hour = static_cast<std::size_t>(hourOf(p.timestamp));
        sum[hour] += p.value;
        ++count[hour];
        ++total;
    }
    require(total > 0, ErrorKind::Validation, "no data for the requested weekdays");
    HourlyProfile profile;
    for (std::size_t h = 0; h < 24; ++h) {
        if (count[h] > 0) {
            profile[h] = sum[h] / static_cast<double>(count[h]);
        }
    }
    return profile;
}

std::vector<Gap> detectGaps(const Series& series, std::chrono::seconds maxGap) {
    require(maxGap.count() > 0, ErrorKind::Validation, "maxGap must be positive");
    std::vector<Gap> gaps;
    for (std::size_t i = 1; i < series.size(); ++i) {
        if (series[i].timestamp - series[i - 1].timestamp > maxGap) {
            gaps.push_back(Gap{series[i - 1].timestamp, series[i].timestamp});
        }
    }
    return gaps;
}

std::optional<double> seasonalRatio(const Series& series, const TimeInterval& periodA, const TimeInterval& periodB) {
    periodA.validate();
    periodB.validate();
    const double a = mean(series, periodA);
    const double b = mean(series, periodB);
    if (b == 0.0) {
        return std::nullopt;
    }
    return a / b;
}

}// namespace cityforge::analytics
