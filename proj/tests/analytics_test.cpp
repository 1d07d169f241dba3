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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

using namespace cityforge;
using namespace cityforge::analytics;
using namespace std::chrono_literals;

namespace {

const std::string kAsset = "urn:oc:entity:santander:parking:p-total";
const Instant kT0 = parseInstant("2017-11-01T00:00:00Z");

Instant at(std::int64_t seconds) { return kT0 + std::chrono::seconds(seconds); }

Series series(std::initializer_list<std::pair<std::int64_t, double>> points) {
    Series out;
    for (const auto& [s, v] : points) {
        out.push_back({at(s), v});
    }
    return out;
}

double twoPassPearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double ma = 0;
    double mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0;
    double saa = 0;
    double sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return (sab / (n - 1)) / (std::sqrt(saa / (n - 1)) * std::sqrt(sbb / (n - 1)));
}

/// Independent alignment: integer seconds, per-bucket value lists, explicit join.
std::vector<AlignedPair> bruteForceAlign(const Series& a, const Series& b, std::int64_t bucket) {
    auto group = [&](const Series& s) {
        std::map<std::int64_t, std::vector<double>> g;
        for (const auto& p : s) {
            const auto secs = std::chrono::duration_cast<std::chrono::seconds>(p.timestamp.time_since_epoch()).count();
            g[secs - secs % bucket].push_back(p.value);
        }
        return g;
    };
    const auto ga = group(a);
    const auto gb = group(b);
    std::vector<AlignedPair> out;
    for (const auto& [start, va] : ga) {
        const auto it = gb.find(start);
        if (it == gb.end()) {
            continue;
        }
        double sa = 0;
        double sb = 0;
        for (double v : va) {
            sa += v;
        }
        for (double v : it->second) {
            sb += v;
        }
        out.push_back(AlignedPair{Instant{std::chrono::seconds(start)}, sa / static_cast<double>(va.size()),
                                  sb / static_cast<double>(it->second.size())});
    }
    return out;
}

Series randomSeries(std::mt19937_64& rng, std::int64_t span, std::size_t n) {
    std::uniform_int_distribution<std::int64_t> t(0, span);
    std::uniform_real_distribution<double> v(-100, 100);
    std::map<Instant, double> unique;
    for (std::size_t i = 0; i < n; ++i) {
        unique[at(t(rng))] = v(rng);
    }
    Series out;
    for (const auto& [ts, value] : unique) {
        out.push_back({ts, value});
    }
    return out;
}

}// namespace

TEST(SeriesStore, RecordAndLastWins) {
    SeriesStore store;
    store.record(kAsset, "freeSpots", at(0), 5);
    EXPECT_EQ(store.series(kAsset, "freeSpots").size(), 1U);
    store.record(kAsset, "freeSpots", at(0), 7);
    const auto s = store.series(kAsset, "freeSpots");
    ASSERT_EQ(s.size(), 1U);
    EXPECT_EQ(s[0].value, 7);
    EXPECT_THROW(store.record(kAsset, "freeSpots", at(1), std::nan("")), Error);
    EXPECT_THROW(store.record(kAsset, "freeSpots", at(1), INFINITY), Error);
    EXPECT_TRUE(store.series(kAsset, "other").empty());
}

TEST(SeriesStore, TenThousandRecordsStaySorted) {
    SeriesStore store;
    std::vector<std::int64_t> order(10000);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), std::mt19937_64(3));
    for (auto i : order) {
        store.record(kAsset, "v", at(i * 60), static_cast<double>(i));
    }
    const auto s = store.series(kAsset, "v");
    ASSERT_EQ(s.size(), 10000U);
    for (std::size_t i = 1; i < s.size(); ++i) {
        ASSERT_LT(s[i - 1].timestamp, s[i].timestamp);
    }
    EXPECT_EQ(store.series(kAsset, "v", TimeInterval{at(60), at(180)}).size(), 2U);
}

TEST(SeriesStore, CsvRoundTripCountsMalformedRows) {
    std::istringstream in("timestamp,asset_urn,attribute,value\n"
                          "2017-11-01T00:00:00Z," + kAsset + ",freeSpots,80\n"
                          "2017-11-01T00:10:00Z," + kAsset + ",freeSpots,not-a-number\n"
                          "garbage\n"
                          "2017-11-01T00:20:00Z,p-total,freeSpots,1\n"
                          "2017-11-01T00:30:00Z," + kAsset + ",freeSpots,79.5\n");
    SeriesStore store;
    EXPECT_EQ(store.loadCsv(in), 3U);
    EXPECT_EQ(store.pointCount(), 2U);
    std::ostringstream out;
    store.writeCsv(out);
    std::istringstream back(out.str());
    SeriesStore copy;
    EXPECT_EQ(copy.loadCsv(back), 0U);
    EXPECT_EQ(copy.series(kAsset, "freeSpots"), store.series(kAsset, "freeSpots"));
    std::istringstream headless("2017-11-01T00:00:00Z,a,b,1\n");
    EXPECT_THROW(readCsv(headless), Error);
}

TEST(Align, IdenticalGridsAndDisjointRanges) {
    const auto a = series({{0, 1}, {600, 2}, {1200, 3}});
    const auto b = series({{0, 4}, {600, 5}, {1200, 6}});
    EXPECT_EQ(align(a, b).size(), 3U);
    const auto c = series({{86400, 1}, {87000, 2}});
    EXPECT_TRUE(align(a, c).empty());
    EXPECT_THROW(align(a, b, 0s), Error);
}

TEST(Align, MeansWithinBuckets) {
    const auto a = series({{0, 1}, {300, 3}, {600, 10}});
    const auto b = series({{599, 8}, {1199, 20}});
    const auto pairs = align(a, b);
    ASSERT_EQ(pairs.size(), 2U);
    EXPECT_EQ(pairs[0], (AlignedPair{at(0), 2.0, 8.0}));
    EXPECT_EQ(pairs[1], (AlignedPair{at(600), 10.0, 20.0}));
    EXPECT_EQ(align(a, b, 600s, Aggregator::Last)[0].a, 3.0);
}

TEST(Align, MatchesBruteForceOracle) {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 200; ++round) {
        const auto a = randomSeries(rng, 86400 * 3, 300);
        const auto b = randomSeries(rng, 86400 * 3, 300);
        const std::int64_t bucket = std::array<std::int64_t, 4>{60, 600, 900, 3600}[round % 4];
        const auto got = align(a, b, std::chrono::seconds(bucket));
        const auto expected = bruteForceAlign(a, b, bucket);
        ASSERT_EQ(got.size(), expected.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            ASSERT_EQ(got[i].bucketStart, expected[i].bucketStart);
            ASSERT_NEAR(got[i].a, expected[i].a, 1e-12);
            ASSERT_NEAR(got[i].b, expected[i].b, 1e-12);
        }
    }
}

TEST(Pearson, PerfectLinearAndInverse) {
    const std::vector<double> a = {1, 2, 3};
    const std::vector<double> up = {2, 4, 6};
    const std::vector<double> down = {3, 2, 1};
    EXPECT_DOUBLE_EQ(*pearson(a, up), 1.0);
    EXPECT_DOUBLE_EQ(*pearson(a, down), -1.0);
}

TEST(Pearson, UndefinedMarkers) {
    const std::vector<double> a = {1, 2, 3};
    const std::vector<double> flat = {5, 5, 5};
    EXPECT_FALSE(pearson(a, flat));
    const std::vector<double> one = {1};
    EXPECT_FALSE(pearson(one, one));
    EXPECT_FALSE(pearson(std::span<const AlignedPair>{}));
}

TEST(Pearson, MatchesTwoPassOracle) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> noise(0, 1);
    for (int round = 0; round < 500; ++round) {
        std::vector<double> a(100);
        std::vector<double> b(100);
        const double coupling = noise(rng);
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = 50 + 10 * noise(rng);
            b[i] = coupling * a[i] + 5 * noise(rng);
        }
        const auto r = pearson(a, b);
        ASSERT_TRUE(r);
        ASSERT_NEAR(*r, twoPassPearson(a, b), 1e-12);
    }
}

TEST(PearsonProperty, BoundsSelfAndAffineInvariance) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1000, 1000);
    std::uniform_real_distribution<double> scale(0.01, 100);
    for (int round = 0; round < 1000; ++round) {
        const std::size_t n = 3 + round % 60;
        std::vector<double> a(n);
        std::vector<double> b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = u(rng);
            b[i] = u(rng);
        }
        const auto r = pearson(a, b);
        ASSERT_TRUE(r);
        ASSERT_GE(*r, -1.0);
        ASSERT_LE(*r, 1.0);
        ASSERT_NEAR(*pearson(a, a), 1.0, 1e-12);
        const double k = scale(rng);
        const double c = u(rng);
        std::vector<double> t(n);
        std::transform(a.begin(), a.end(), t.begin(), [&](double x) { return k * x + c; });
        ASSERT_NEAR(*pearson(t, b), *r, 1e-9);
    }
}

TEST(DailyPearson, InverseDayAndSparseDay) {
    Series a;
    Series b;
    for (int i = 0; i < 144; ++i) {
        a.push_back({at(i * 600), static_cast<double>(i % 37)});
        b.push_back({at(i * 600), -2.0 * static_cast<double>(i % 37) + 4});
    }
    auto days = dailyPearson(a, b);
    ASSERT_EQ(days.size(), 1U);
    EXPECT_EQ(days[0].pairCount, 144U);
    EXPECT_NEAR(*days[0].r, -1.0, 1e-12);
    EXPECT_EQ(formatDate(days[0].date), "2017-11-01");

    a.push_back({at(86400 + 60), 1});
    b.push_back({at(86400 + 120), 2});
    days = dailyPearson(a, b);
    ASSERT_EQ(days.size(), 2U);
    EXPECT_EQ(days[1].pairCount, 1U);
    EXPECT_FALSE(days[1].r);
}

TEST(DailyPearsonProperty, DaysPartitionTheAlignedPairs) {
    std::mt19937_64 rng(13);
    for (int round = 0; round < 50; ++round) {
        const auto a = randomSeries(rng, 86400 * 5, 2000);
        const auto b = randomSeries(rng, 86400 * 5, 2000);
        const auto pairs = align(a, b);
        const auto days = dailyPearson(pairs, 5);
        std::size_t total = 0;
        std::size_t offset = 0;
        for (std::size_t d = 0; d < days.size(); ++d) {
            if (d > 0) {
                ASSERT_LT(days[d - 1].date, days[d].date);
            }
            for (std::size_t i = 0; i < days[d].pairCount; ++i) {
                ASSERT_EQ(dateOf(pairs[offset + i].bucketStart), days[d].date);
            }
            const std::span<const AlignedPair> slice(pairs.data() + offset, days[d].pairCount);
            const auto r = pearson(slice);
            if (days[d].pairCount >= 5) {
                ASSERT_EQ(days[d].r.has_value(), r.has_value());
                if (r) {
                    ASSERT_DOUBLE_EQ(*days[d].r, *r);
                }
            } else {
                ASSERT_FALSE(days[d].r);
            }
            offset += days[d].pairCount;
            total += days[d].pairCount;
        }
        ASSERT_EQ(total, pairs.size());
    }
}

TEST(HourlyProfile, ConstantSeries) {
    Series s;
    for (int i = 0; i < 7 * 144; ++i) {
        s.push_back({at(i * 600), 80});
    }
    const auto profile = hourlyProfile(s);
    for (const auto& h : profile) {
        ASSERT_TRUE(h);
        EXPECT_EQ(*h, 80);
    }
    // 2017-11-01 is a Wednesday.
    EXPECT_NO_THROW(hourlyProfile(s, {3}));
    EXPECT_THROW(hourlyProfile(series({{0, 1}}), {0}), Error);
}

TEST(HourlyProfile, AbsentHoursAndWeekdayFilter) {
    const auto s = series({{3600 * 3, 10}, {3600 * 3 + 600, 20}, {86400 + 3600 * 5, 99}});
    const auto wednesday = hourlyProfile(s, {3});
    EXPECT_EQ(*wednesday[3], 15);
    EXPECT_FALSE(wednesday[5]);
    EXPECT_FALSE(wednesday[0]);
    const auto thursday = hourlyProfile(s, {4});
    EXPECT_EQ(*thursday[5], 99);
    EXPECT_FALSE(thursday[3]);
}

TEST(HourlyProfileProperty, OrderIndependent) {
    std::mt19937_64 rng(17);
    for (int round = 0; round < 20; ++round) {
        auto points = randomSeries(rng, 86400 * 14, 3000);
        SeriesStore sorted;
        SeriesStore shuffled;
        for (const auto& p : points) {
            sorted.record(kAsset, "v", p.timestamp, p.value);
        }
        std::shuffle(points.begin(), points.end(), rng);
        for (const auto& p : points) {
            shuffled.record(kAsset, "v", p.timestamp, p.value);
        }
        for (unsigned day = 0; day < 7; ++day) {
            ASSERT_EQ(hourlyProfile(sorted.series(kAsset, "v"), {day}), hourlyProfile(shuffled.series(kAsset, "v"), {day}));
        }
    }
}

TEST(DetectGaps, RegularSeriesAndInjectedHole) {
    Series s;
    for (int i = 0; i < 1000; ++i) {
        s.push_back({at(i * 600), 1});
    }
    EXPECT_TRUE(detectGaps(s, 900s).empty());
    EXPECT_TRUE(detectGaps(Series{}, 900s).empty());
    const auto holeStart = at(100 * 600);
    const auto holeEnd = holeStart + 6h;
    std::erase_if(s, [&](const Point& p) { return p.timestamp >= holeStart && p.timestamp < holeEnd; });
    const auto gaps = detectGaps(s, 900s);
    ASSERT_EQ(gaps.size(), 1U);
    EXPECT_LE(gaps[0].start, holeStart);
    EXPECT_GE(gaps[0].end, holeEnd);
    EXPECT_EQ(gaps[0].end - gaps[0].start, 6h + 600s);
    EXPECT_THROW(detectGaps(s, 0s), Error);
}

TEST(DetectGapsProperty, DisjointSortedAndLongerThanThreshold) {
    std::mt19937_64 rng(19);
    for (int round = 0; round < 200; ++round) {
        const auto s = randomSeries(rng, 86400 * 2, 50 + round);
        const auto maxGap = std::chrono::seconds(600 + 300 * (round % 10));
        const auto gaps = detectGaps(s, maxGap);
        std::size_t scan = 0;
        for (std::size_t i = 1; i < s.size(); ++i) {
            scan += s[i].timestamp - s[i - 1].timestamp > maxGap ? 1 : 0;
        }
        ASSERT_EQ(gaps.size(), scan);
        for (std::size_t i = 0; i < gaps.size(); ++i) {
            ASSERT_GT(gaps[i].end - gaps[i].start, maxGap);
            if (i > 0) {
                ASSERT_LE(gaps[i - 1].end, gaps[i].start);
            }
        }
    }
}

TEST(SeasonalRatio, IdenticalAndEmptyPeriods) {
    const auto s = series({{0, 10}, {600, 20}, {86400, 5}});
    const TimeInterval day1{at(0), at(86400)};
    EXPECT_DOUBLE_EQ(*seasonalRatio(s, day1, day1), 1.0);
    EXPECT_DOUBLE_EQ(*seasonalRatio(s, day1, TimeInterval{at(86400), at(2 * 86400)}), 3.0);
    EXPECT_THROW(seasonalRatio(s, day1, TimeInterval{at(5 * 86400), at(6 * 86400)}), Error);
    const auto zeros = series({{0, 0}, {86400, 4}});
    EXPECT_FALSE(seasonalRatio(zeros, TimeInterval{at(86400), std::nullopt}, day1));
}
