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

#include <string>
#include <string_view>

namespace cityforge {

struct Location {
    double lat = 0.0;
    double lon = 0.0;

    /// Throws Error(Validation) outside [-90, 90] x [-180, 180] or when non-finite.
    void validate() const;
    bool operator==(const Location&) const = default;
};

struct BoundingBox {
    double latMin = -90.0;
    double lonMin = -180.0;
    double latMax = 90.0;
    double lonMax = 180.0;

    bool contains(const Location& p) const {
        return p.lat >= latMin && p.lat <= latMax && p.lon >= lonMin && p.lon <= lonMax;
    }
    void validate() const;
    bool operator==(const BoundingBox&) const = default;

    /// `latMin,lonMin,latMax,lonMax`
    static BoundingBox parse(std::string_view text);
    std::string format() const;
};

}// namespace cityforge
