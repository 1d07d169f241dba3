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

#include <cityforge/common/geo.hpp>
#include <cityforge/common/time.hpp>
#include <cityforge/common/value.hpp>

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace cityforge::warehouse {

/// Tag URNs are `<domain urn>:<name>`.
struct Tag {
    std::string urn;
    std::string name;
    std::string domainUrn;
};

/// `urn:oc:tagDomain:<domain>` and its tags in insertion order.
struct TagDomain {
    std::string urn;
    std::string name;
    std::string description;
    std::vector<std::string> tags;
};

enum class CollectionKind { Service, Experiment };

std::string_view toString(CollectionKind kind);

/// A Service or an Experiment: a named grouping of tag domains.
struct Collection {
    CollectionKind kind = CollectionKind::Service;
    std::string urn;
    std::string name;
    std::set<std::string> linkedDomains;
};

struct Annotator {
    enum class Kind { Machine, User };
    Kind kind = Kind::User;
    std::string id;

    static Annotator machine(std::int64_t jobId) { return {Kind::Machine, std::to_string(jobId)}; }
    static Annotator user(std::string userId) { return {Kind::User, std::move(userId)}; }

    /// `machine:<jobId>` or `user:<userId>`.
    std::string format() const;
    static Annotator parse(std::string_view text);

    bool operator==(const Annotator&) const = default;
    auto operator<=>(const Annotator&) const = default;
};

enum class Validation { Unreviewed, Confirmed, Rejected };

std::string_view toString(Validation validation);
Validation validationFromString(std::string_view text);

struct Annotation {
    std::string id;
    std::string assetUrn;
    std::string tagUrn;
    Annotator annotator;
    Scalar note;
    /// When the observation happened.
    Instant timestamp;
    /// When the annotation was stored.
    Instant createdAt;
    std::optional<Location> location;
    Validation validation = Validation::Unreviewed;
    std::optional<std::string> reviewedBy;
};

/// Input to annotate(); timestamp defaults to now.
struct AnnotationDraft {
    std::string assetUrn;
    std::string tagUrn;
    Annotator annotator;
    Scalar note = 0.0;
    std::optional<Instant> timestamp;
    std::optional<Location> location;
};

struct AssetQuery {
    std::set<std::string> tags;
    std::optional<BoundingBox> bbox;
    TimeInterval interval;
    bool includeRejected = false;
};

struct AssetMatch {
    std::string assetUrn;
    std::map<std::string, std::size_t> counts;
    std::size_t total = 0;

    bool operator==(const AssetMatch&) const = default;
};

struct TagSummary {
    std::string urn;
    std::size_t count = 0;
    Instant latest;

    bool operator==(const TagSummary&) const = default;
};

struct AssetSummary {
    std::string assetUrn;
    std::vector<TagSummary> tags;

    bool operator==(const AssetSummary&) const = default;
};

struct AuditReport {
    std::vector<std::string> violations;
    bool clean() const { return violations.empty(); }
};

Json toJson(const Tag& tag);
Json toJson(const TagDomain& domain);
Json toJson(const Collection& collection);
Json toJson(const Annotation& annotation);
Json toJson(const AssetMatch& match);
Json toJson(const std::vector<AssetSummary>& exportSummary);

}// namespace cityforge::warehouse
