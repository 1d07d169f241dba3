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

#include <chrono>
#include <cstdint>
#include <random>
#include <span>

namespace cityforge::simulator {

/// mt19937_64 with hand-written transforms; the std distributions are not portable.
class Random {
  public:
    explicit Random(std::uint64_t seed);
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Box-Muller.
    double normal(double mean = 0.0, double stddev = 1.0);
    /// Index drawn proportionally to `weights`.
    std::size_t choice(std::span<const double> weights);

  private:
    std::mt19937_64 engine_;
    bool hasSpare_ = false;
    double spare_ = 0.0;
};

/// Seed for an independent substream.
std::uint64_t substreamSeed(std::uint64_t seed, std::uint64_t stream);

/// Fraction of parking capacity available, winter basis.
double parkingTemplate(std::chrono::weekday day, double hourOfDay);
/// Vehicles per hour, winter basis.
double trafficTemplate(std::chrono::weekday day, double hourOfDay);
/// 1 from November to March, 1/winterFactor from June to August, cosine ramps between.
double seasonalMultiplier(Instant t, double winterFactor);

/// Stationary weights of the weather scale 0..11.
std::span<const double> weatherWeights();

struct EfieldProfile {
    double baseline;
    double range;
};

/// Indexed 0..2 for efield1..efield3; efield2 has the highest levels.
EfieldProfile efieldProfile(int location);

}// namespace cityforge::simulator
