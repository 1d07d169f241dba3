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
#include <cityforge/common/geo.hpp>
#include <cityforge/common/text.hpp>

#include <cmath>
#include <sstream>

namespace cityforge {

void Location::validate() const {
    require(std::isfinite(lat) && lat >= -90.0 && lat <= 90.0, ErrorKind::Validation, "latitude out of range");
    require(std::isfinite(lon) && lon >= -180.0 && lon <= 180.0, ErrorKind::Validation, "longitude out of range");
}

void BoundingBox::validate() const {
    Location{latMin, lonMin}.validate();
    Location{latMax, lonMax}.validate();
    require(latMin <= latMax && lonMin <= lonMax, ErrorKind::Validation, "bbox requires latMin <= latMax and lonMin <= lonMax");
}

BoundingBox BoundingBox::parse(std::string_view text) {
    const auto parts = split(text, ',');
    require(parts.size() == 4, ErrorKind::Validation, "bbox needs four comma-separated numbers");
    BoundingBox box{parseDouble(parts[0]), parseDouble(parts[1]), parseDouble(parts[2]), parseDouble(parts[3])};
    box.validate();
    return box;
}

std::string BoundingBox::format() const {
    std::ostringstream out;
    out.precision(17);
    out << latMin << ',' << lonMin << ',' << latMax << ',' << lonMax;
    return out.str();
}

}// namespace cityforge
