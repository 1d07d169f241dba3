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
#include <cityforge/warehouse/model.hpp>

namespace cityforge::warehouse {

std::string_view toString(CollectionKind kind) { return kind == CollectionKind::Service ? "service" : "experiment"; }

std::string Annotator::format() const { return (kind == Kind::Machine ? "machine:" : "user:") + id; }

Annotator Annotator::parse(std::string_view text) {
    const auto colon = text.find(':');
    require(colon != std::string_view::npos && colon + 1 < text.size(), ErrorKind::Validation,
            "annotator must be 'machine:<jobId>' or 'user:<userId>'");
    const auto kind = text.substr(0, colon);
    const std::string id(text.substr(colon + 1));
    if (kind == "machine") {
        return {Kind::Machine, id};
    }
    if (kind == "user") {
        return {Kind::User, id};
    }
    fail(ErrorKind::Validation, "annotator must be 'machine:<jobId>' or 'user:<userId>'");
}

std::string_view toString(Validation validation) {
    switch (validation) {
        case Validation::Unreviewed: return "unreviewed";
        case Validation::Confirmed: return "confirmed";
        case Validation::Rejected: return "rejected";
    }
    return "unreviewed";
}

Validation validationFromString(std::string_view text) {
    if (text == "unreviewed") {
        return Validation::Unreviewed;
    }
    if (text == "confirmed") {
        return Validation::Confirmed;
    }
    if (text == "rejected") {
        return Validation::Rejected;
    }
    fail(ErrorKind::Validation, "unknown validation state '" + std::string(text) + "'");
}

Json toJson(const Tag& tag) { return Json{{"urn", tag.urn}, {"name", tag.name}, {"domain", tag.domainUrn}}; }

Json toJson(const TagDomain& domain) {
    return Json{{"urn", domain.urn}, {"name", domain.name}, {"description", domain.description}, {"tags", domain.tags}};
}

Json toJson(const Collection& collection) {
    return Json{{"urn", collection.urn},
                {"name", collection.name},
                {"kind", std::string(toString(collection.kind))},
                {"linkedDomains", std::vector<std::string>(collection.linkedDomains.begin(), collection.linkedDomains.end())}};
}

Json toJson(const Annotation& a) {
    Json out{{"id", a.id},
             {"assetUrn", a.assetUrn},
             {"tagUrn", a.tagUrn},
             {"annotator", a.annotator.format()},
             {"note", cityforge::toJson(a.note)},
             {"timestamp", formatInstant(a.timestamp)},
             {"createdAt", formatInstant(a.createdAt)},
             {"validation", std::string(toString(a.validation))}};
    if (a.location) {
        out["location"] = cityforge::toJson(*a.location);
    }
    if (a.reviewedBy) {
        out["reviewedBy"] = *a.reviewedBy;
    }
    return out;
}

Json toJson(const AssetMatch& match) {
    Json tags = Json::array();
    for (const auto& [urn, count] : match.counts) {
        tags.push_back(Json{{"urn", urn}, {"count", count}});
    }
    return Json{{"assetUrn", match.assetUrn}, {"tags", tags}, {"total", match.total}};
}

Json toJson(const std::vector<AssetSummary>& exportSummary) {
    Json out = Json::array();
    for (const auto& asset : exportSummary) {
        Json tags = Json::array();
        for (const auto& tag : asset.tags) {
            tags.push_back(Json{{"urn", tag.urn}, {"count", tag.count}, {"latest", formatInstant(tag.latest)}});
        }
        out.push_back(Json{{"assetUrn", asset.assetUrn}, {"tags", tags}});
    }
    return out;
}

}// namespace cityforge::warehouse
