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
#include <cityforge/common/text.hpp>
#include <cityforge/warehouse/warehouse.hpp>

#include <spdlog/spdlog.h>

#include <algorithm>
#include <mutex>

namespace cityforge::warehouse {

namespace {

constexpr std::string_view kDomainPrefix = "urn:oc:tagDomain:";

void requireDomainUrn(const std::string& urn) {
    const bool ok = urn.starts_with(kDomainPrefix) && urn.size() > kDomainPrefix.size() &&
                    urn.find(':', kDomainPrefix.size()) == std::string::npos && isUrn(urn);
    require(ok, ErrorKind::Validation, "tag domain URN must look like urn:oc:tagDomain:<domain>, got '" + urn + "'");
}

void requireTagName(const std::string& name) {
    require(!name.empty() && name.find_first_of(": \t\r\n") == std::string::npos, ErrorKind::Validation,
            "tag name must be non-empty without ':' or whitespace");
}

std::uint64_t annotationNumber(const std::string& id) {
    return id.starts_with("ann-") ? static_cast<std::uint64_t>(parseInteger(std::string_view(id).substr(4))) : 0;
}

Json collectionEvent(const Collection& c) {
    return Json{{"op", "createCollection"},
                {"kind", std::string(toString(c.kind))},
                {"urn", c.urn},
                {"name", c.name},
                {"domains", std::vector<std::string>(c.linkedDomains.begin(), c.linkedDomains.end())}};
}

Json annotationEvent(const Annotation& a) {
    Json event = toJson(a);
    event["op"] = "annotate";
    return event;
}

CollectionKind collectionKindFrom(const std::string& text) {
    return text == "experiment" ? CollectionKind::Experiment : CollectionKind::Service;
}

}// namespace

KnowledgeWarehouse::KnowledgeWarehouse(std::optional<std::filesystem::path> journal) : journalPath_(std::move(journal)) {
    if (!journalPath_) {
        return;
    }
    if (std::filesystem::exists(*journalPath_)) {
        std::ifstream in(*journalPath_);
        std::string line;
        std::size_t lineNo = 0;
        while (std::getline(in, line)) {
            ++lineNo;
            if (trim(line).empty()) {
                continue;
            }
            try {
                apply(Json::parse(line));
            } catch (const std::exception& e) {
                spdlog::warn("warehouse journal {}:{} unreadable ({}); ignoring the rest", journalPath_->string(), lineNo, e.what());
                break;
            }
        }
        compact();
    }
    journal_.open(*journalPath_, std::ios::app);
    require(journal_.good(), ErrorKind::Unavailable, "cannot open warehouse journal " + journalPath_->string());
}

KnowledgeWarehouse::~KnowledgeWarehouse() {
    try {
        compact();
    } catch (const std::exception& e) {
        spdlog::error("warehouse compaction failed: {}", e.what());
    }
}

void KnowledgeWarehouse::commit(const Json& event) {
    apply(event);
    if (journal_.is_open()) {
        journal_ << event.dump() << '\n';
        journal_.flush();
    }
}

void KnowledgeWarehouse::apply(const Json& event) {
    const std::string op = event.at("op").get<std::string>();
    if (op == "createDomain") {
        TagDomain d{event.at("urn"), event.at("name"), event.value("description", ""), {}};
        domains_.emplace(d.urn, std::move(d));
    } else if (op == "deleteDomain") {
        const std::string urn = event.at("urn");
        for (const auto& tagUrn : domains_.at(urn).tags) {
            tags_.erase(tagUrn);
        }
        domains_.erase(urn);
    } else if (op == "createTag") {
        Tag t{event.at("urn"), event.at("name"), event.at("domain")};
        domains_.at(t.domainUrn).tags.push_back(t.urn);
        tags_.emplace(t.urn, std::move(t));
    } else if (op == "deleteTag") {
        const std::string urn = event.at("urn");
        auto& list = domains_.at(tags_.at(urn).domainUrn).tags;
        list.erase(std::remove(list.begin(), list.end(), urn), list.end());
        tags_.erase(urn);
    } else if (op == "createCollection") {
        Collection c;
        c.kind = collectionKindFrom(event.at("kind"));
        c.urn = event.at("urn");
        c.name = event.at("name");
        for (const auto& d : event.at("domains")) {
            c.linkedDomains.insert(d.get<std::string>());
        }
        (c.kind == CollectionKind::Service ? services_ : experiments_).emplace(c.urn, std::move(c));
    } else if (op == "deleteCollection") {
        (collectionKindFrom(event.at("kind")) == CollectionKind::Service ? services_ : experiments_).erase(event.at("urn").get<std::string>());
    } else if (op == "annotate") {
        Annotation a;
        a.id = event.at("id");
        a.assetUrn = event.at("assetUrn");
        a.tagUrn = event.at("tagUrn");
        a.annotator = Annotator::parse(event.at("annotator").get<std::string>());
        a.note = scalarFromJson(event.at("note"));
        a.timestamp = parseInstant(event.at("timestamp").get<std::string>());
        a.createdAt = event.contains("createdAt") ? parseInstant(event.at("createdAt").get<std::string>()) : a.timestamp;
        if (event.contains("location")) {
            a.location = locationFromJson(event.at("location"));
        }
        a.validation = validationFromString(event.at("validation").get<std::string>());
        if (event.contains("reviewedBy")) {
            a.reviewedBy = event.at("reviewedBy").get<std::string>();
        }
        nextAnnotation_ = std::max(nextAnnotation_, annotationNumber(a.id) + 1);
        keys_.emplace(a.assetUrn, a.tagUrn, a.annotator.format(), a.timestamp);
        byAsset_[a.assetUrn].push_back(a.id);
        ++referencesByTag_[a.tagUrn];
        if (a.validation != Validation::Rejected) {
            ++usageByTag_[a.tagUrn];
        }
        const auto asset = a.assetUrn;
        const auto tag = a.tagUrn;
        annotations_.emplace(a.id, std::move(a));
        recomputeCell(asset, tag);
    } else if (op == "review") {
        Annotation& a = annotations_.at(event.at("id").get<std::string>());
        const auto verdict = validationFromString(event.at("verdict").get<std::string>());
        if (a.validation == Validation::Rejected && verdict != Validation::Rejected) {
            ++usageByTag_[a.tagUrn];
        } else if (a.validation != Validation::Rejected && verdict == Validation::Rejected) {
            --usageByTag_[a.tagUrn];
        }
        a.validation = verdict;
        a.reviewedBy = event.at("userId").get<std::string>();
        recomputeCell(a.assetUrn, a.tagUrn);
    } else if (op == "deleteAnnotation") {
        const std::string id = event.at("id");
        const Annotation a = annotations_.at(id);
        keys_.erase(Key{a.assetUrn, a.tagUrn, a.annotator.format(), a.timestamp});
        auto& ids = byAsset_[a.assetUrn];
        ids.erase(std::remove(ids.begin(), ids.end(), id), ids.end());
        if (ids.empty()) {
            byAsset_.erase(a.assetUrn);
        }
        --referencesByTag_[a.tagUrn];
        if (a.validation != Validation::Rejected) {
            --usageByTag_[a.tagUrn];
        }
        annotations_.erase(id);
        recomputeCell(a.assetUrn, a.tagUrn);
    } else if (op == "meta") {
        nextAnnotation_ = std::max(nextAnnotation_, event.at("nextAnnotation").get<std::uint64_t>());
    } else {
        fail(ErrorKind::Protocol, "unknown warehouse event '" + op + "'");
    }
}

void KnowledgeWarehouse::recomputeCell(const std::string& asset, const std::string& tag) {
    Cell cell;
    if (const auto it = byAsset_.find(asset); it != byAsset_.end()) {
        for (const auto& id : it->second) {
            const Annotation& a = annotations_.at(id);
            if (a.tagUrn == tag && a.validation != Validation::Rejected) {
                cell.latest = cell.count == 0 ? a.timestamp : std::max(cell.latest, a.timestamp);
                ++cell.count;
            }
        }
    }
    if (cell.count == 0) {
        if (auto it = aggregates_.find(asset); it != aggregates_.end()) {
            it->second.erase(tag);
            if (it->second.empty()) {
                aggregates_.erase(it);
            }
        }
    } else {
        aggregates_[asset][tag] = cell;
    }
}

const Tag& KnowledgeWarehouse::tagRef(const std::string& urn) const {
    const auto it = tags_.find(urn);
    require(it != tags_.end(), ErrorKind::NotFound, "no tag '" + urn + "'");
    return it->second;
}

const TagDomain& KnowledgeWarehouse::domainRef(const std::string& urn) const {
    const auto it = domains_.find(urn);
    require(it != domains_.end(), ErrorKind::NotFound, "no tag domain '" + urn + "'");
    return it->second;
}

TagDomain KnowledgeWarehouse::createDomain(const std::string& urn, const std::string& name, const std::string& description,
                                           const std::vector<std::string>& tagNames) {
    requireDomainUrn(urn);
    std::set<std::string> seen;
    for (const auto& tagName : tagNames) {
        requireTagName(tagName);
        require(seen.insert(tagName).second, ErrorKind::Validation, "duplicate tag name '" + tagName + "'");
    }
    std::unique_lock lock(mutex_);
    require(!domains_.contains(urn), ErrorKind::Conflict, "tag domain '" + urn + "' already exists");
    const std::string displayName = name.empty() ? urn.substr(kDomainPrefix.size()) : name;
    commit(Json{{"op", "createDomain"}, {"urn", urn}, {"name", displayName}, {"description", description}});
    for (const auto& tagName : tagNames) {
        commit(Json{{"op", "createTag"}, {"urn", urn + ":" + tagName}, {"name", tagName}, {"domain", urn}});
    }
    return domains_.at(urn);
}

TagDomain KnowledgeWarehouse::domain(const std::string& urn) const {
    std::shared_lock lock(mutex_);
    return domainRef(urn);
}

std::vector<TagDomain> KnowledgeWarehouse::domains() const {
    std::shared_lock lock(mutex_);
    std::vector<TagDomain> out;
    for (const auto& [urn, d] : domains_) {
        out.push_back(d);
    }
    return out;
}

bool KnowledgeWarehouse::hasDomain(const std::string& urn) const {
    std::shared_lock lock(mutex_);
    return domains_.contains(urn);
}

void KnowledgeWarehouse::deleteDomain(const std::string& urn) {
    std::unique_lock lock(mutex_);
    const TagDomain& d = domainRef(urn);
    require(!domainInUse_ || !domainInUse_(urn), ErrorKind::Conflict, "tag domain '" + urn + "' is used by a job");
    for (const auto* group : {&services_, &experiments_}) {
        for (const auto& [cUrn, c] : *group) {
            require(!c.linkedDomains.contains(urn), ErrorKind::Conflict, "tag domain '" + urn + "' is linked from '" + cUrn + "'");
        }
    }
    for (const auto& tagUrn : d.tags) {
        const auto refs = referencesByTag_.find(tagUrn);
        require(refs == referencesByTag_.end() || refs->second == 0, ErrorKind::Conflict,
                "tag '" + tagUrn + "' of domain '" + urn + "' has annotations");
    }
    commit(Json{{"op", "deleteDomain"}, {"urn", urn}});
}

Tag KnowledgeWarehouse::createTag(const std::string& domainUrn, const std::string& name, const std::optional<std::string>& urn) {
    std::string tagName = name;
    if (tagName.empty() && urn && urn->starts_with(domainUrn + ":")) {
        tagName = urn->substr(domainUrn.size() + 1);
    }
    requireTagName(tagName);
    const std::string tagUrn = domainUrn + ":" + tagName;
    if (urn) {
        require(*urn == tagUrn, ErrorKind::Validation, "tag URN '" + *urn + "' must equal '" + tagUrn + "'");
    }
    std::unique_lock lock(mutex_);
    domainRef(domainUrn);
    require(!tags_.contains(tagUrn), ErrorKind::Conflict, "tag '" + tagUrn + "' already exists");
    commit(Json{{"op", "createTag"}, {"urn", tagUrn}, {"name", tagName}, {"domain", domainUrn}});
    return tags_.at(tagUrn);
}

Tag KnowledgeWarehouse::tag(const std::string& urn) const {
    std::shared_lock lock(mutex_);
    return tagRef(urn);
}

std::vector<Tag> KnowledgeWarehouse::tags(const std::string& domainUrn) const {
    std::shared_lock lock(mutex_);
    std::vector<Tag> out;
    for (const auto& urn : domainRef(domainUrn).tags) {
        out.push_back(tags_.at(urn));
    }
    return out;
}

void KnowledgeWarehouse::deleteTag(const std::string& urn) {
    std::unique_lock lock(mutex_);
    const Tag& t = tagRef(urn);
    const auto refs = referencesByTag_.find(urn);
    require(refs == referencesByTag_.end() || refs->second == 0, ErrorKind::Conflict, "tag '" + urn + "' has annotations");
    if (domainInUse_ && domainRef(t.domainUrn).tags.size() == 1) {
        require(!domainInUse_(t.domainUrn), ErrorKind::Conflict, "cannot remove the last tag of a domain used by a job");
    }
    commit(Json{{"op", "deleteTag"}, {"urn", urn}});
}

Collection KnowledgeWarehouse::createCollection(CollectionKind kind, const std::string& urn, const std::string& name,
                                                const std::set<std::string>& linkedDomains) {
    requireUrn(urn, std::string(toString(kind)) + " id");
    std::unique_lock lock(mutex_);
    auto& group = kind == CollectionKind::Service ? services_ : experiments_;
    require(!group.contains(urn), ErrorKind::Conflict, std::string(toString(kind)) + " '" + urn + "' already exists");
    for (const auto& d : linkedDomains) {
        require(domains_.contains(d), ErrorKind::Validation, "linked tag domain '" + d + "' does not exist");
    }
    commit(collectionEvent(Collection{kind, urn, name, linkedDomains}));
    return group.at(urn);
}

Collection KnowledgeWarehouse::collection(CollectionKind kind, const std::string& urn) const {
    std::shared_lock lock(mutex_);
    const auto& group = kind == CollectionKind::Service ? services_ : experiments_;
    const auto it = group.find(urn);
    require(it != group.end(), ErrorKind::NotFound, "no " + std::string(toString(kind)) + " '" + urn + "'");
    return it->second;
}

std::vector<Collection> KnowledgeWarehouse::collections(CollectionKind kind) const {
    std::shared_lock lock(mutex_);
    std::vector<Collection> out;
    for (const auto& [urn, c] : kind == CollectionKind::Service ? services_ : experiments_) {
        out.push_back(c);
    }
    return out;
}

void KnowledgeWarehouse::deleteCollection(CollectionKind kind, const std::string& urn) {
    std::unique_lock lock(mutex_);
    const auto& group = kind == CollectionKind::Service ? services_ : experiments_;
    require(group.contains(urn), ErrorKind::NotFound, "no " + std::string(toString(kind)) + " '" + urn + "'");
    commit(Json{{"op", "deleteCollection"}, {"kind", std::string(toString(kind))}, {"urn", urn}});
}

Annotation KnowledgeWarehouse::annotate(const AnnotationDraft& draft) {
    requireUrn(draft.assetUrn, "asset");
    require(!draft.annotator.id.empty(), ErrorKind::Validation, "annotator id must not be empty");
    if (draft.location) {
        draft.location->validate();
    }
    Annotation a;
    a.assetUrn = draft.assetUrn;
    a.tagUrn = draft.tagUrn;
    a.annotator = draft.annotator;
    a.note = draft.note;
    a.createdAt = now();
    a.timestamp = draft.timestamp.value_or(a.createdAt);
    a.location = draft.location;
    a.validation = draft.annotator.kind == Annotator::Kind::Machine ? Validation::Unreviewed : Validation::Confirmed;
    {
        std::unique_lock lock(mutex_);
        tagRef(draft.tagUrn);
        require(!keys_.contains(Key{a.assetUrn, a.tagUrn, a.annotator.format(), a.timestamp}), ErrorKind::Conflict,
                "annotation already exists for this asset, tag, annotator and timestamp");
        a.id = "ann-" + std::to_string(nextAnnotation_);
        commit(annotationEvent(a));
    }
    notifyChange();
    return a;
}

Annotation KnowledgeWarehouse::annotation(const std::string& id) const {
    std::shared_lock lock(mutex_);
    const auto it = annotations_.find(id);
    require(it != annotations_.end(), ErrorKind::NotFound, "no annotation '" + id + "'");
    return it->second;
}

void KnowledgeWarehouse::deleteAnnotation(const std::string& id, const Annotator& requester) {
    {
        std::unique_lock lock(mutex_);
        const auto it = annotations_.find(id);
        require(it != annotations_.end(), ErrorKind::NotFound, "no annotation '" + id + "'");
        require(it->second.annotator == requester, ErrorKind::Authorization, "only the annotation's creator may delete it");
        commit(Json{{"op", "deleteAnnotation"}, {"id", id}});
    }
    notifyChange();
}

Annotation KnowledgeWarehouse::review(const std::string& id, Validation verdict, const std::string& userId) {
    require(verdict != Validation::Unreviewed, ErrorKind::Validation, "verdict must be confirmed or rejected");
    require(!userId.empty(), ErrorKind::Validation, "reviewer id must not be empty");
    Annotation result;
    {
        std::unique_lock lock(mutex_);
        require(annotations_.contains(id), ErrorKind::NotFound, "no annotation '" + id + "'");
        commit(Json{{"op", "review"}, {"id", id}, {"verdict", std::string(toString(verdict))}, {"userId", userId}});
        result = annotations_.at(id);
    }
    notifyChange();
    return result;
}

std::vector<Annotation> KnowledgeWarehouse::annotationsFor(const std::string& assetUrn, const TimeInterval& interval,
                                                           const std::optional<std::string>& domainUrn) const {
    interval.validate();
    std::shared_lock lock(mutex_);
    std::vector<Annotation> out;
    const auto it = byAsset_.find(assetUrn);
    if (it == byAsset_.end()) {
        return out;
    }
    for (const auto& id : it->second) {
        const Annotation& a = annotations_.at(id);
        if (!interval.contains(a.timestamp)) {
            continue;
        }
        if (domainUrn && tags_.at(a.tagUrn).domainUrn != *domainUrn) {
            continue;
        }
        out.push_back(a);
    }
    std::stable_sort(out.begin(), out.end(), [](const Annotation& l, const Annotation& r) {
        return l.timestamp < r.timestamp || (l.timestamp == r.timestamp && annotationNumber(l.id) < annotationNumber(r.id));
    });
    return out;
}

std::vector<Annotation> KnowledgeWarehouse::recentAnnotations(std::size_t limit) const {
    std::shared_lock lock(mutex_);
    std::vector<const Annotation*> all;
    all.reserve(annotations_.size());
    for (const auto& [id, a] : annotations_) {
        all.push_back(&a);
    }
    const auto newer = [](const Annotation* l, const Annotation* r) {
        return l->createdAt > r->createdAt || (l->createdAt == r->createdAt && annotationNumber(l->id) > annotationNumber(r->id));
    };
    const std::size_t n = std::min(limit, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(), newer);
    std::vector<Annotation> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(*all[i]);
    }
    return out;
}

std::size_t KnowledgeWarehouse::annotationCount() const {
    std::shared_lock lock(mutex_);
    return annotations_.size();
}

std::vector<AssetMatch> KnowledgeWarehouse::findAssets(const AssetQuery& query) const {
    require(!query.tags.empty(), ErrorKind::Validation, "at least one tag is required");
    query.interval.validate();
    std::shared_lock lock(mutex_);
    for (const auto& t : query.tags) {
        tagRef(t);
    }
    std::vector<AssetMatch> out;
    for (const auto& [asset, ids] : byAsset_) {
        AssetMatch match{asset, {}, 0};
        for (const auto& id : ids) {
            const Annotation& a = annotations_.at(id);
            if (!query.tags.contains(a.tagUrn)) {
                continue;
            }
            if (!query.includeRejected && a.validation == Validation::Rejected) {
                continue;
            }
            if (!query.interval.contains(a.timestamp)) {
                continue;
            }
            if (query.bbox && (!a.location || !query.bbox->contains(*a.location))) {
                continue;
            }
            ++match.counts[a.tagUrn];
            ++match.total;
        }
        if (match.counts.size() == query.tags.size()) {
            out.push_back(std::move(match));
        }
    }
    std::sort(out.begin(), out.end(), [](const AssetMatch& l, const AssetMatch& r) {
        return l.total > r.total || (l.total == r.total && l.assetUrn < r.assetUrn);
    });
    return out;
}

std::vector<Tag> KnowledgeWarehouse::suggestTags(const std::string& domainUrn) const {
    std::shared_lock lock(mutex_);
    std::vector<Tag> out;
    for (const auto& urn : domainRef(domainUrn).tags) {
        out.push_back(tags_.at(urn));
    }
    const auto usage = [this](const Tag& t) {
        const auto it = usageByTag_.find(t.urn);
        return it == usageByTag_.end() ? std::size_t{0} : it->second;
    };
    std::stable_sort(out.begin(), out.end(), [&](const Tag& l, const Tag& r) { return usage(l) > usage(r); });
    return out;
}

std::vector<AssetSummary> KnowledgeWarehouse::discoveryExport() const {
    std::shared_lock lock(mutex_);
    std::vector<AssetSummary> out;
    for (const auto& [asset, cells] : aggregates_) {
        AssetSummary summary{asset, {}};
        for (const auto& [tag, cell] : cells) {
            summary.tags.push_back(TagSummary{tag, cell.count, cell.latest});
        }
        out.push_back(std::move(summary));
    }
    return out;
}

AuditReport KnowledgeWarehouse::audit() const {
    std::shared_lock lock(mutex_);
    AuditReport report;
    auto violation = [&](std::string text) { report.violations.push_back(std::move(text)); };

    for (const auto& [urn, d] : domains_) {
        for (const auto& tagUrn : d.tags) {
            const auto it = tags_.find(tagUrn);
            if (it == tags_.end()) {
                violation("domain " + urn + " lists missing tag " + tagUrn);
            } else if (it->second.domainUrn != urn || !tagUrn.starts_with(urn + ":")) {
                violation("tag " + tagUrn + " is listed under foreign domain " + urn);
            }
        }
    }
    for (const auto& [urn, t] : tags_) {
        const auto it = domains_.find(t.domainUrn);
        if (it == domains_.end()) {
            violation("tag " + urn + " references missing domain " + t.domainUrn);
        } else if (std::count(it->second.tags.begin(), it->second.tags.end(), urn) != 1) {
            violation("tag " + urn + " is not listed exactly once by its domain");
        }
    }
    for (const auto* group : {&services_, &experiments_}) {
        for (const auto& [urn, c] : *group) {
            for (const auto& d : c.linkedDomains) {
                if (!domains_.contains(d)) {
                    violation(urn + " links missing domain " + d);
                }
            }
        }
    }

    std::set<Key> keys;
    std::map<std::string, std::size_t> references;
    std::map<std::string, std::size_t> usage;
    std::map<std::string, std::map<std::string, Cell>> aggregates;
    std::size_t indexed = 0;
    for (const auto& [asset, ids] : byAsset_) {
        indexed += ids.size();
    }
    if (indexed != annotations_.size()) {
        violation("asset index size differs from annotation count");
    }
    for (const auto& [id, a] : annotations_) {
        if (!tags_.contains(a.tagUrn)) {
            violation("annotation " + id + " references missing tag " + a.tagUrn);
        }
        if (!keys.emplace(a.assetUrn, a.tagUrn, a.annotator.format(), a.timestamp).second) {
            violation("annotation " + id + " duplicates an existing key");
        }
        ++references[a.tagUrn];
        if (a.validation != Validation::Rejected) {
            ++usage[a.tagUrn];
            Cell& cell = aggregates[a.assetUrn][a.tagUrn];
            cell.latest = cell.count == 0 ? a.timestamp : std::max(cell.latest, a.timestamp);
            ++cell.count;
        }
    }
    if (keys != keys_) {
        violation("uniqueness index differs from annotations");
    }
    const auto nonzero = [](std::map<std::string, std::size_t> m) {
        std::erase_if(m, [](const auto& kv) { return kv.second == 0; });
        return m;
    };
    if (nonzero(references) != nonzero(referencesByTag_)) {
        violation("tag reference counts differ from recomputation");
    }
    if (nonzero(usage) != nonzero(usageByTag_)) {
        violation("tag usage counts differ from recomputation");
    }
    bool sameAggregates = aggregates.size() == aggregates_.size();
    for (const auto& [asset, cells] : aggregates) {
        const auto it = aggregates_.find(asset);
        if (it == aggregates_.end() || it->second.size() != cells.size()) {
            sameAggregates = false;
            break;
        }
        for (const auto& [tag, cell] : cells) {
            const auto c = it->second.find(tag);
            sameAggregates = sameAggregates && c != it->second.end() && c->second.count == cell.count && c->second.latest == cell.latest;
        }
    }
    if (!sameAggregates) {
        violation("discovery aggregates differ from recomputation");
    }
    return report;
}

void KnowledgeWarehouse::setDomainReferenceCheck(std::function<bool(const std::string&)> check) {
    std::unique_lock lock(mutex_);
    domainInUse_ = std::move(check);
}

void KnowledgeWarehouse::setChangeListener(std::function<void()> listener) {
    std::unique_lock lock(mutex_);
    changeListener_ = std::move(listener);
}

void KnowledgeWarehouse::notifyChange() {
    std::function<void()> listener;
    {
        std::shared_lock lock(mutex_);
        listener = changeListener_;
    }
    if (listener) {
        listener();
    }
}

std::vector<Json> KnowledgeWarehouse::snapshotEvents() const {
    std::vector<Json> events;
    events.push_back(Json{{"op", "meta"}, {"nextAnnotation", nextAnnotation_}});
    for (const auto& [urn, d] : domains_) {
        events.push_back(Json{{"op", "createDomain"}, {"urn", urn}, {"name", d.name}, {"description", d.description}});
        for (const auto& tagUrn : d.tags) {
            const Tag& t = tags_.at(tagUrn);
            events.push_back(Json{{"op", "createTag"}, {"urn", t.urn}, {"name", t.name}, {"domain", t.domainUrn}});
        }
    }
    for (const auto* group : {&services_, &experiments_}) {
        for (const auto& [urn, c] : *group) {
            events.push_back(collectionEvent(c));
        }
    }
    std::vector<const Annotation*> ordered;
    for (const auto& [id, a] : annotations_) {
        ordered.push_back(&a);
    }
    std::sort(ordered.begin(), ordered.end(),
              [](const Annotation* l, const Annotation* r) { return annotationNumber(l->id) < annotationNumber(r->id); });
    for (const auto* a : ordered) {
        events.push_back(annotationEvent(*a));
    }
    return events;
}

void KnowledgeWarehouse::compact() {
    if (!journalPath_) {
        return;
    }
    std::unique_lock lock(mutex_);
    const auto temp = std::filesystem::path(journalPath_->string() + ".tmp");
    {
        std::ofstream out(temp, std::ios::trunc);
        for (const auto& event : snapshotEvents()) {
            out << event.dump() << '\n';
        }
        require(out.good(), ErrorKind::Unavailable, "cannot write " + temp.string());
    }
    const bool reopen = journal_.is_open();
    journal_.close();
    std::filesystem::rename(temp, *journalPath_);
    if (reopen) {
        journal_.open(*journalPath_, std::ios::app);
    }
}

}// namespace cityforge::warehouse
