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
#include <cityforge/common/error.hpp>
#include <cityforge/simulator/model.hpp>

#include <array>
#include <cmath>
#include <numbers>
#include <utility>

namespace cityforge::simulator {

namespace {

using Anchor = std::pair<double, double>;

constexpr std::array<Anchor, 9> kParkingWeekday = {{{0, 0.70}, {3, 0.95}, {6, 0.88}, {8, 0.667}, {10, 0.39}, {13.5, 0.55},
                                                    {17, 0.37}, {20.5, 0.62}, {24, 0.70}}};
constexpr std::array<Anchor, 8> kParkingSaturday = {{{0, 0.70}, {3, 0.95}, {6, 0.90}, {8, 0.80}, {11, 0.60}, {17, 0.45},
                                                     {20.5, 0.60}, {24, 0.70}}};
constexpr std::array<Anchor, 8> kParkingSunday = {{{0, 0.70}, {3, 0.95}, {6, 0.85}, {9, 0.333}, {13, 0.46}, {17, 0.40},
                                                   {20.5, 0.60}, {24, 0.70}}};

constexpr std::array<Anchor, 10> kTrafficWeekday = {{{0, 60}, {3, 30}, {6, 250}, {8, 900}, {10, 600}, {13, 700}, {15, 600},
                                                     {18, 950}, {21, 350}, {24, 60}}};
constexpr std::array<Anchor, 7> kTrafficWeekend = {{{0, 60}, {4, 35}, {8, 250}, {12, 600}, {18, 550}, {21, 300}, {24, 60}}};

constexpr std::array<double, 12> kWeather = {30, 12, 10, 14, 8, 6, 5, 5, 4, 3, 2, 1};

double cosineStep(double u) { return (1.0 - std::cos(std::numbers::pi * u)) / 2.0; }

template <std::size_t N>
double interpolate(const std::array<Anchor, N>& anchors, double hour) {
    for (std::size_t i = 1; i < N; ++i) {
        if (hour <= anchors[i].first) {
            const auto& [h0, v0] = anchors[i - 1];
            const auto& [h1, v1] = anchors[i];
            return v0 + (v1 - v0) * cosineStep((hour - h0) / (h1 - h0));
        }
    }
    return anchors.back().second;
}

}// namespace

Random::Random(std::uint64_t seed) : engine_(seed) {}

double Random::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Random::normal(double mean, double stddev) {
    if (hasSpare_) {
        hasSpare_ = false;
        return mean + stddev * spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) {
        u1 = uniform();
    }
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    hasSpare_ = true;
    return mean + stddev * radius * std::cos(angle);
}

std::size_t Random::choice(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) {
        total += w;
    }
    double pick = uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        pick -= weights[i];
        if (pick < 0.0) {
            return i;
        }
    }
    return weights.size() - 1;
}

std::uint64_t substreamSeed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double parkingTemplate(std::chrono::weekday day, double hourOfDay) {
    if (day == std::chrono::Saturday) {
        return interpolate(kParkingSaturday, hourOfDay);
    }
    if (day == std::chrono::Sunday) {
        return interpolate(kParkingSunday, hourOfDay);
    }
    return interpolate(kParkingWeekday, hourOfDay);
}

double trafficTemplate(std::chrono::weekday day, double hourOfDay) {
    if (day == std::chrono::Saturday || day == std::chrono::Sunday) {
        return interpolate(kTrafficWeekend, hourOfDay);
    }
    return interpolate(kTrafficWeekday, hourOfDay);
}

double seasonalMultiplier(Instant t, double winterFactor) {
    using namespace std::chrono;
    const double summer = 1.0 / winterFactor;
    const year y = dateOf(t).year();
    const auto at = [&](month m) { return startOf(Date{y, m, day{1}}); };
    const auto fraction = [&](Instant from, Instant to) { return duration<double>(t - from) / duration<double>(to - from); };
    if (t < at(April) || t >= at(November)) {
        return 1.0;
    }
    if (t < at(June)) {
        return 1.0 + (summer - 1.0) * cosineStep(fraction(at(April), at(June)));
    }
    if (t < at(September)) {
        return summer;
    }
    return summer + (1.0 - summer) * cosineStep(fraction(at(September), at(November)));
}

std::span<const double> weatherWeights() { return kWeather; }

EfieldProfile efieldProfile(int location) {
    static constexpr std::array<EfieldProfile, 3> kProfiles = {{{0.6, 1.0}, {1.2, 2.0}, {0.4, 0.8}}};
    require(location >= 0 && location < 3, ErrorKind::Validation, "e-field location out of range");
    return kProfiles[static_cast<std::size_t>(location)];
}

}// namespace cityforge::simulator
