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

namespace cityforge {

std::string_view toString(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Validation: return "validation";
        case ErrorKind::NotFound: return "notFound";
        case ErrorKind::Conflict: return "conflict";
        case ErrorKind::State: return "state";
        case ErrorKind::Protocol: return "protocol";
        case ErrorKind::Authorization: return "authorization";
        case ErrorKind::Unavailable: return "unavailable";
    }
    return "unknown";
}

int httpStatus(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Validation:
        case ErrorKind::Protocol: return 400;
        case ErrorKind::Authorization: return 403;
        case ErrorKind::NotFound: return 404;
        case ErrorKind::Conflict:
        case ErrorKind::State: return 409;
        case ErrorKind::Unavailable: return 503;
    }
    return 500;
}

}// namespace cityforge
