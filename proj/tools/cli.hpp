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

#include <iosfwd>
#include <string>
#include <vector>

namespace cityforge::cli {

/// Exit codes: 0 success, 1 usage error, 2 remote or API error, 3 I/O error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// `kind:id[/attr]` or `urn:...[/attr]`; a missing attribute defaults by kind.
struct AssetRef {
    std::string urn;
    std::string attribute;
};
AssetRef parseAssetRef(const std::string& text);

}// namespace cityforge::cli
