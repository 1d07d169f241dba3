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
#include <cityforge/simulator/generator.hpp>
#include <cityforge/simulator/model.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace cityforge::simulator {

namespace {

double hourOfDay(Instant t) {
    const auto sinceMidnight = t - std::chrono::floor<std::chrono::days>(t);
    return std::chrono::duration<double, std::ratio<3600>>(sinceMidnight).count();
}

double roundTo(double value, double step) { return std::round(value / step) * step; }

double quantize(StreamId stream, double value, int capacity) {
    switch (stream) {
        case StreamId::Parking: return std::clamp(std::round(value), 0.0, static_cast<double>(capacity));
        case StreamId::Traffic: return std::max(0.0, std::round(value));
        case StreamId::Weather: return value;
        default: return std::max(0.0, roundTo(value, 0.001));
    }
}

double sample(const CityConfig& config, StreamId stream, Instant t, Random& rng, std::size_t& weatherState) {
    const double noise = config.noise(stream) > 0.0 ? rng.normal(0.0, config.noise(stream)) : 0.0;
    switch (stream) {
        case StreamId::Parking: return expectedParking(config, t) + noise;
        case StreamId::Efield1:
        case StreamId::Efield2:
        case StreamId::Efield3: {
            const auto profile = efieldProfile(static_cast<int>(stream) - static_cast<int>(StreamId::Efield1));
            const double occupancy = 1.0 - expectedParking(config, t) / config.parkingCapacity;
            return profile.baseline + config.couplingEfieldParking * occupancy * profile.range + noise;
        }
        case StreamId::Traffic:
            return trafficTemplate(weekdayOf(t), hourOfDay(t)) * seasonalMultiplier(t, config.winterTrafficFactor) + noise;
        case StreamId::Weather:
            if (rng.uniform() >= config.weatherPersistence) {
                weatherState = rng.choice(weatherWeights());
            }
            return static_cast<double>(weatherState);
    }
    return 0.0;
}

void applyFault(const CityConfig& config, const FaultSpec& fault, std::vector<analytics::Reading>& rows, Random& rng) {
    const auto inside = [&](const analytics::Reading& r) { return r.timestamp >= fault.start && r.timestamp < fault.end; };
    switch (fault.kind) {
        case FaultKind::Gap: std::erase_if(rows, inside); return;
        case FaultKind::ZeroFlatline:
            for (auto& r : rows) {
                if (inside(r)) {
                    r.value = 0.0;
                }
            }
            return;
        case FaultKind::Spike:
            for (auto& r : rows) {
                if (inside(r)) {
                    r.value = quantize(fault.stream, r.value + fault.magnitude, config.parkingCapacity);
                }
            }
            return;
        case FaultKind::LowVariability: {
            double sum = 0.0;
            std::size_t n = 0;
            for (const auto& r : rows) {
                if (inside(r)) {
                    sum += r.value;
                    ++n;
                }
            }
            if (n == 0) {
                return;
            }
            const double level = sum / static_cast<double>(n);
            const double jitter = config.noise(fault.stream) * 0.02;
            for (auto& r : rows) {
                if (inside(r)) {
                    r.value = quantize(fault.stream, level + (jitter > 0.0 ? rng.normal(0.0, jitter) : 0.0), config.parkingCapacity);
                }
            }
            return;
        }
    }
}

}// namespace

double expectedParking(const CityConfig& config, Instant t) {
    return config.parkingCapacity * seasonalMultiplier(t, config.winterParkingFactor) * parkingTemplate(weekdayOf(t), hourOfDay(t));
}

Dataset generate(const CityConfig& config) {
    config.validate();
    Dataset dataset;
    dataset.faults = config.faults;
    for (const auto stream : kAllStreams) {
        Random rng(substreamSeed(config.seed, static_cast<std::uint64_t>(stream)));
        std::size_t weatherState = rng.choice(weatherWeights());
        const std::string asset = assetUrn(stream);
        const std::string attribute(attributeName(stream));
        const auto step = std::chrono::seconds(config.sampling(stream));
        auto& rows = dataset.streams[stream];
        for (Instant t = config.start(); t < config.end(); t += step) {
            const double raw = sample(config, stream, t, rng, weatherState);
            rows.push_back({t, asset, attribute, quantize(stream, raw, config.parkingCapacity)});
        }
        Random faultRng(substreamSeed(config.seed, 100 + static_cast<std::uint64_t>(stream)));
        for (const auto& fault : config.faults) {
            if (fault.stream == stream) {
                applyFault(config, fault, rows, faultRng);
            }
        }
    }
    return dataset;
}

void writeDataset(const Dataset& dataset, const std::filesystem::path& directory) {
    std::filesystem::create_directories(directory);
    for (const auto& [stream, rows] : dataset.streams) {
        const auto path = directory / (std::string(toString(stream)) + ".csv");
        std::ofstream out(path, std::ios::trunc | std::ios::binary);
        analytics::writeCsvHeader(out);
        for (const auto& row : rows) {
            analytics::writeCsvRow(out, row);
        }
        require(out.good(), ErrorKind::Unavailable, "cannot write " + path.string());
    }
    std::ofstream manifest(directory / "faults.json", std::ios::trunc | std::ios::binary);
    manifest << manifestJson(dataset.faults).dump(2) << '\n';
    require(manifest.good(), ErrorKind::Unavailable, "cannot write the fault manifest");
}

}// namespace cityforge::simulator
