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
#include <cityforge/simulator/config.hpp>

#include <cmath>

namespace cityforge::simulator {

namespace {

constexpr std::array<std::string_view, 6> kStreamNames = {"parking", "efield1", "efield2", "efield3", "traffic", "weather"};
constexpr std::array<std::string_view, 4> kFaultNames = {"zeroFlatline", "lowVariability", "spike", "gap"};

std::size_t index(StreamId stream) { return static_cast<std::size_t>(stream); }

}// namespace

std::string_view toString(StreamId stream) { return kStreamNames[index(stream)]; }

StreamId streamFromString(std::string_view text) {
    for (const auto stream : kAllStreams) {
        if (toString(stream) == text) {
            return stream;
        }
    }
    fail(ErrorKind::Validation, "unknown stream '" + std::string(text) + "'");
}

std::string_view entityType(StreamId stream) {
    switch (stream) {
        case StreamId::Parking: return "parking";
        case StreamId::Efield1:
        case StreamId::Efield2:
        case StreamId::Efield3: return "efield";
        case StreamId::Traffic: return "traffic";
        case StreamId::Weather: return "weather";
    }
    return "parking";
}

std::string_view attributeName(StreamId stream) {
    switch (stream) {
        case StreamId::Parking: return "freeSpots";
        case StreamId::Efield1:
        case StreamId::Efield2:
        case StreamId::Efield3: return "efield";
        case StreamId::Traffic: return "intensity";
        case StreamId::Weather: return "condition";
    }
    return "freeSpots";
}

std::string assetUrn(StreamId stream) {
    std::string id;
    switch (stream) {
        case StreamId::Parking: id = "p-total"; break;
        case StreamId::Traffic: id = "t01"; break;
        case StreamId::Weather: id = "w01"; break;
        default: id = std::string(toString(stream)); break;
    }
    return "urn:oc:entity:santander:" + std::string(entityType(stream)) + ":" + id;
}

std::string_view toString(FaultKind kind) { return kFaultNames[static_cast<std::size_t>(kind)]; }

FaultKind faultKindFromString(std::string_view text) {
    for (std::size_t i = 0; i < kFaultNames.size(); ++i) {
        if (kFaultNames[i] == text) {
            return static_cast<FaultKind>(i);
        }
    }
    fail(ErrorKind::Validation, "unknown fault kind '" + std::string(text) + "'");
}

Json toJson(const FaultSpec& fault) {
    return Json{{"kind", std::string(toString(fault.kind))},
                {"stream", std::string(toString(fault.stream))},
                {"start", formatInstant(fault.start)},
                {"end", formatInstant(fault.end)},
                {"magnitude", fault.magnitude}};
}

FaultSpec faultFromJson(const Json& json) {
    require(json.is_object(), ErrorKind::Validation, "fault must be an object");
    FaultSpec fault;
    fault.kind = faultKindFromString(stringField(json, "kind"));
    fault.stream = streamFromString(stringField(json, "stream"));
    fault.start = parseInstant(stringField(json, "start"));
    fault.end = parseInstant(stringField(json, "end"));
    if (json.contains("magnitude")) {
        fault.magnitude = numberField(json, "magnitude");
    }
    return fault;
}

Json manifestJson(const std::vector<FaultSpec>& faults) {
    Json out = Json::array();
    for (const auto& f : faults) {
        out.push_back(toJson(f));
    }
    return out;
}

void CityConfig::validate() const {
    require(days >= 1, ErrorKind::Validation, "days must be >= 1");
    require(parkingCapacity > 0, ErrorKind::Validation, "parkingCapacity must be > 0");
    require(startDate.ok(), ErrorKind::Validation, "startDate is not a valid date");
    for (const auto stream : kAllStreams) {
        const int s = sampling(stream);
        require(s > 0 && 86400 % s == 0, ErrorKind::Validation,
                "sampling for " + std::string(toString(stream)) + " must divide 86400");
        require(std::isfinite(noise(stream)) && noise(stream) >= 0.0, ErrorKind::Validation, "noise must be >= 0");
    }
    require(couplingEfieldParking >= 0.0 && couplingEfieldParking <= 1.0, ErrorKind::Validation, "couplingEfieldParking must be in [0, 1]");
    require(std::isfinite(winterTrafficFactor) && winterTrafficFactor > 0.0, ErrorKind::Validation, "winterTrafficFactor must be > 0");
    require(std::isfinite(winterParkingFactor) && winterParkingFactor > 0.0, ErrorKind::Validation, "winterParkingFactor must be > 0");
    require(weatherPersistence >= 0.0 && weatherPersistence < 1.0, ErrorKind::Validation, "weatherPersistence must be in [0, 1)");
    for (const auto& f : faults) {
        require(f.start < f.end, ErrorKind::Validation, "fault start must precede its end");
        require(f.start >= start() && f.end <= end(), ErrorKind::Validation, "fault lies outside the generated range");
        require(std::isfinite(f.magnitude), ErrorKind::Validation, "fault magnitude must be finite");
    }
}

Json CityConfig::toJson() const {
    Json sampling = Json::object();
    Json noise = Json::object();
    for (const auto stream : kAllStreams) {
        sampling[std::string(simulator::toString(stream))] = samplingSeconds[index(stream)];
        noise[std::string(simulator::toString(stream))] = noiseStd[index(stream)];
    }
    return Json{{"seed", seed},
                {"days", days},
                {"startDate", formatDate(startDate)},
                {"parkingCapacity", parkingCapacity},
                {"samplingSeconds", sampling},
                {"couplingEfieldParking", couplingEfieldParking},
                {"winterTrafficFactor", winterTrafficFactor},
                {"winterParkingFactor", winterParkingFactor},
                {"noiseStd", noise},
                {"weatherPersistence", weatherPersistence},
                {"faults", manifestJson(faults)}};
}

CityConfig CityConfig::fromJson(const Json& json) {
    require(json.is_object(), ErrorKind::Validation, "city config must be a JSON object");
    CityConfig config;
    try {
        if (json.contains("seed")) {
            config.seed = json.at("seed").get<std::uint64_t>();
        }
        config.days = json.value("days", config.days);
        if (json.contains("startDate")) {
            config.startDate = parseDate(json.at("startDate").get<std::string>());
        }
        config.parkingCapacity = json.value("parkingCapacity", config.parkingCapacity);
        for (const auto stream : kAllStreams) {
            const std::string name(simulator::toString(stream));
            if (json.contains("samplingSeconds") && json.at("samplingSeconds").contains(name)) {
                config.samplingSeconds[index(stream)] = json.at("samplingSeconds").at(name).get<int>();
            }
            if (json.contains("noiseStd") && json.at("noiseStd").contains(name)) {
                config.noiseStd[index(stream)] = json.at("noiseStd").at(name).get<double>();
            }
        }
        config.couplingEfieldParking = json.value("couplingEfieldParking", config.couplingEfieldParking);
        config.winterTrafficFactor = json.value("winterTrafficFactor", config.winterTrafficFactor);
        config.winterParkingFactor = json.value("winterParkingFactor", config.winterParkingFactor);
        config.weatherPersistence = json.value("weatherPersistence", config.weatherPersistence);
        if (json.contains("faults")) {
            for (const auto& f : json.at("faults")) {
                config.faults.push_back(faultFromJson(f));
            }
        }
    } catch (const Json::exception& e) {
        fail(ErrorKind::Validation, std::string("bad city config: ") + e.what());
    }
    config.validate();
    return config;
}

}// namespace cityforge::simulator
