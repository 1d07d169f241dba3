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

#include <cityforge/warehouse/model.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace cityforge::warehouse {

/// The annotation knowledge graph: tag domains, tags, services, experiments and the
/// annotations linking external assets to tags.
///
/// Every mutation is an event applied to memory and, when a journal path is given, appended
/// to a JSON-lines file that is replayed on construction and compacted on destruction.
class KnowledgeWarehouse {
  public:
    explicit KnowledgeWarehouse(std::optional<std::filesystem::path> journal = std::nullopt);
    ~KnowledgeWarehouse();
    KnowledgeWarehouse(const KnowledgeWarehouse&) = delete;
    KnowledgeWarehouse& operator=(const KnowledgeWarehouse&) = delete;

    TagDomain createDomain(const std::string& urn, const std::string& name, const std::string& description,
                           const std::vector<std::string>& tagNames = {});
    TagDomain domain(const std::string& urn) const;
    std::vector<TagDomain> domains() const;
    bool hasDomain(const std::string& urn) const;
    void deleteDomain(const std::string& urn);

    /// `urn` may be omitted; when given it must be `<domainUrn>:<name>`.
    Tag createTag(const std::string& domainUrn, const std::string& name, const std::optional<std::string>& urn = std::nullopt);
    Tag tag(const std::string& urn) const;
    std::vector<Tag> tags(const std::string& domainUrn) const;
    void deleteTag(const std::string& urn);

    Collection createCollection(CollectionKind kind, const std::string& urn, const std::string& name,
                                const std::set<std::string>& linkedDomains);
    Collection collection(CollectionKind kind, const std::string& urn) const;
    std::vector<Collection> collections(CollectionKind kind) const;
    void deleteCollection(CollectionKind kind, const std::string& urn);

    /// Machine annotations start unreviewed, user annotations confirmed.
    Annotation annotate(const AnnotationDraft& draft);
    Annotation annotation(const std::string& id) const;
    /// Only the annotation's creator may delete it.
    void deleteAnnotation(const std::string& id, const Annotator& requester);
    Annotation review(const std::string& id, Validation verdict, const std::string& userId);

    /// Ascending by timestamp; unknown assets yield an empty list.
    std::vector<Annotation> annotationsFor(const std::string& assetUrn, const TimeInterval& interval = {},
                                           const std::optional<std::string>& domainUrn = std::nullopt) const;
    /// Newest first by storage time, at most `limit` entries.
    std::vector<Annotation> recentAnnotations(std::size_t limit) const;
    std::size_t annotationCount() const;

    /// Assets holding at least one qualifying annotation for every requested tag, ordered by
    /// descending total then ascending URN.
    std::vector<AssetMatch> findAssets(const AssetQuery& query) const;

    /// Domain tags by descending non-rejected usage, ties in insertion order.
    std::vector<Tag> suggestTags(const std::string& domainUrn) const;

    /// Per asset: distinct non-rejected tags with counts and latest timestamp.
    std::vector<AssetSummary> discoveryExport() const;

    /// Full-scan integrity check, including incremental aggregates against a recomputation.
    AuditReport audit() const;

    /// Consulted before deleting a domain; returns true while something outside the warehouse uses it.
    void setDomainReferenceCheck(std::function<bool(const std::string&)> check);
    /// Invoked after any annotation change, outside the lock.
    void setChangeListener(std::function<void()> listener);

    /// Rewrites the journal as a minimal snapshot.
    void compact();

  private:
    struct Cell {
        std::size_t count = 0;
        Instant latest{};
    };
    using Key = std::tuple<std::string, std::string, std::string, Instant>;

    void commit(const Json& event);
    void apply(const Json& event);
    void recomputeCell(const std::string& asset, const std::string& tag);
    std::vector<Json> snapshotEvents() const;
    void notifyChange();

    const Tag& tagRef(const std::string& urn) const;
    const TagDomain& domainRef(const std::string& urn) const;

    mutable std::shared_mutex mutex_;
    std::optional<std::filesystem::path> journalPath_;
    std::ofstream journal_;

    std::map<std::string, TagDomain> domains_;
    std::map<std::string, Tag> tags_;
    std::map<std::string, Collection> services_;
    std::map<std::string, Collection> experiments_;
    std::unordered_map<std::string, Annotation> annotations_;
    std::map<std::string, std::vector<std::string>> byAsset_;
    std::set<Key> keys_;
    std::map<std::string, std::size_t> referencesByTag_;
    std::map<std::string, std::size_t> usageByTag_;
    std::map<std::string, std::map<std::string, Cell>> aggregates_;
    std::uint64_t nextAnnotation_ = 1;

    std::function<bool(const std::string&)> domainInUse_;
    std::function<void()> changeListener_;
};

}// namespace cityforge::warehouse
