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
#include <cityforge/common/value.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cityforge::simulator {

enum class StreamId { Parking, Efield1, Efield2, Efield3, Traffic, Weather };

inline constexpr std::array<StreamId, 6> kAllStreams = {StreamId::Parking, StreamId::Efield1, StreamId::Efield2,
                                                        StreamId::Efield3, StreamId::Traffic, StreamId::Weather};

/// `parking`, `efield1`..`efield3`, `traffic`, `weather`.
std::string_view toString(StreamId stream);
StreamId streamFromString(std::string_view text);
/// e.g. `urn:oc:entity:santander:parking:p-total`.
std::string assetUrn(StreamId stream);
std::string_view entityType(StreamId stream);
std::string_view attributeName(StreamId stream);

enum class FaultKind { ZeroFlatline, LowVariability, Spike, Gap };

std::string_view toString(FaultKind kind);
FaultKind faultKindFromString(std::string_view text);

struct FaultSpec {
    FaultKind kind = FaultKind::ZeroFlatline;
    StreamId stream = StreamId::Efield1;
    Instant start;
    Instant end;
    double magnitude = 0.0;

    bool operator==(const FaultSpec&) const = default;
};

Json toJson(const FaultSpec& fault);
FaultSpec faultFromJson(const Json& json);
Json manifestJson(const std::vector<FaultSpec>& faults);

/// Per-stream settings indexed by StreamId.
template <typename T>
using PerStream = std::array<T, kAllStreams.size()>;

struct CityConfig {
    std::uint64_t seed = 20171106;
    int days = 14;
    Date startDate = Date{std::chrono::year{2017}, std::chrono::month{11}, std::chrono::day{6}};
    int parkingCapacity = 120;
    PerStream<int> samplingSeconds = {600, 600, 600, 600, 3600, 3600};
    double couplingEfieldParking = 0.8;
    double winterTrafficFactor = 2.0;
    double winterParkingFactor = 2.0;
    PerStream<double> noiseStd = {2.0, 0.05, 0.05, 0.05, 25.0, 0.0};
    /// Probability that the weather keeps its state for one more step.
    double weatherPersistence = 0.3;
    std::vector<FaultSpec> faults;

    Instant start() const { return startOf(startDate); }
    Instant end() const { return start() + std::chrono::days(days); }
    int sampling(StreamId stream) const { return samplingSeconds[static_cast<std::size_t>(stream)]; }
    double noise(StreamId stream) const { return noiseStd[static_cast<std::size_t>(stream)]; }

    /// Throws Error(Validation).
    void validate() const;
    Json toJson() const;
    /// Missing keys keep their defaults.
    static CityConfig fromJson(const Json& json);
};

}// namespace cityforge::simulator
