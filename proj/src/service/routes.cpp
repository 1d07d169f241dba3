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
#include <cityforge/service/service.hpp>

#include "http_util.hpp"

#include <cityforge/analytics/analysis.hpp>
#include <cityforge/broker/wire.hpp>
#include <cityforge/common/text.hpp>

#include <httplib.h>

#include <sstream>

namespace cityforge::service {

using detail::guarded;
using detail::intervalParam;
using detail::jsonBody;
using detail::param;
using detail::requiredParam;
using detail::sendJson;
using Request = httplib::Request;
using Response = httplib::Response;

namespace {

std::int64_t idFrom(const Request& req, std::size_t index = 1) { return parseInteger(req.matches[index].str()); }

Json subscriptionJson(const broker::Subscription& s) {
    return Json{{"id", s.id}, {"query", broker::wire::toJson(s.query)}, {"callbackUrl", s.callbackUrl},
                {"createdAt", formatInstant(s.createdAt)}};
}

Json resultsJson(const std::vector<jobs::AnnotationResult>& results) {
    Json out = Json::array();
    for (const auto& r : results) {
        out.push_back(jobs::toJson(r));
    }
    return out;
}

template <class T>
Json listJson(const std::vector<T>& items) {
    Json out = Json::array();
    for (const auto& item : items) {
        out.push_back(warehouse::toJson(item));
    }
    return out;
}

Json optionalNumber(const std::optional<double>& value) { return value ? Json(*value) : Json(nullptr); }

std::set<std::string> csvSet(const std::string& text) {
    std::set<std::string> out;
    for (const auto& part : split(text, ',')) {
        const auto item = trim(part);
        if (!item.empty()) {
            out.emplace(item);
        }
    }
    return out;
}

std::set<std::string> linkedDomains(const Json& body) {
    std::set<std::string> out;
    if (body.contains("linkedDomains")) {
        for (const auto& d : body.at("linkedDomains")) {
            out.insert(d.get<std::string>());
        }
    }
    return out;
}

warehouse::AnnotationDraft draftFromJson(const Json& body) {
    warehouse::AnnotationDraft draft;
    draft.assetUrn = stringField(body, "assetUrn");
    draft.tagUrn = stringField(body, "tagUrn");
    if (auto annotator = optionalString(body, "annotator")) {
        draft.annotator = warehouse::Annotator::parse(*annotator);
    } else {
        draft.annotator = warehouse::Annotator::user(stringField(body, "userId"));
    }
    if (body.contains("note")) {
        draft.note = scalarFromJson(body.at("note"));
    }
    if (auto ts = optionalString(body, "timestamp")) {
        draft.timestamp = parseInstant(*ts);
    }
    if (body.contains("location") && !body.at("location").is_null()) {
        draft.location = locationFromJson(body.at("location"));
    }
    return draft;
}

std::set<unsigned> weekdaySet(const std::optional<std::string>& text) {
    std::set<unsigned> out;
    if (!text) {
        return out;
    }
    for (const auto& part : split(*text, ',')) {
        const auto day = parseWeekday(trim(part));
        require(day.has_value(), ErrorKind::Validation, "unknown weekday '" + part + "'");
        out.insert(day->c_encoding());
    }
    return out;
}

std::chrono::seconds secondsParam(const Request& req, const char* name, std::chrono::seconds fallback) {
    auto text = param(req, name);
    if (!text) {
        return fallback;
    }
    const auto value = parseInteger(*text);
    require(value > 0, ErrorKind::Validation, std::string(name) + " must be positive");
    return std::chrono::seconds(value);
}

}// namespace

void Service::installBrokerRoutes() {
    auto& server = *server_;
    server.Get("/v2", guarded([this](const Request&, Response& res) {
        const auto stats = broker_->stats();
        sendJson(res, 200,
                 Json{{"entities_url", "/v2/entities"},
                      {"subscriptions_url", "/v2/subscriptions"},
                      {"notifications", {{"delivered", stats.delivered}, {"failed", stats.failed}, {"attempts", stats.attempts}}}});
    }));
    server.Post(R"(/v2/entities/([^/]+)/attrs)", guarded([this](const Request& req, Response& res) {
        const auto attrs = broker::wire::parseAttributes(jsonBody(req), now());
        const auto version = broker_->updateEntity(req.matches[1].str(), param(req, "type"), attrs);
        sendJson(res, 200, Json{{"version", version}});
    }));
    server.Get("/v2/entities", guarded([this](const Request& req, Response& res) {
        broker::ContextQuery query;
        query.idPattern = param(req, "idPattern");
        query.entityType = param(req, "type");
        if (auto attrs = param(req, "attrs")) {
            query.attrs = csvSet(*attrs);
        }
        if (auto bbox = param(req, "bbox")) {
            query.bbox = BoundingBox::parse(*bbox);
        }
        Json out = Json::array();
        for (const auto& entity : broker_->queryEntities(query)) {
            out.push_back(broker::wire::toJson(entity, query.attrs));
        }
        sendJson(res, 200, out);
    }));
    server.Get(R"(/v2/entities/([^/]+))", guarded([this](const Request& req, Response& res) {
        const auto id = req.matches[1].str();
        const auto entity = broker_->entity(id);
        require(entity.has_value(), ErrorKind::NotFound, "entity " + id + " not found");
        sendJson(res, 200, broker::wire::toJson(*entity));
    }));
    server.Post("/v2/subscriptions", guarded([this](const Request& req, Response& res) {
        const auto body = jsonBody(req);
        const auto query = broker::wire::queryFromJson(body.contains("query") ? body.at("query") : Json::object());
        const auto subscription = broker_->subscribe(query, stringField(body, "callbackUrl"));
        sendJson(res, 201, Json{{"id", subscription.id}});
    }));
    server.Get("/v2/subscriptions", guarded([this](const Request&, Response& res) {
        Json out = Json::array();
        for (const auto& s : broker_->subscriptions()) {
            out.push_back(subscriptionJson(s));
        }
        sendJson(res, 200, out);
    }));
    server.Delete(R"(/v2/subscriptions/([^/]+))", guarded([this](const Request& req, Response& res) {
        broker_->unsubscribe(req.matches[1].str());
        sendJson(res, 204, {});
    }));
}

void Service::installJobRoutes() {
    auto& server = *server_;
    server.Get("/jobs", guarded([this](const Request&, Response& res) {
        Json out = Json::array();
        for (const auto& job : jobs_->jobs()) {
            out.push_back(jobs::toJson(job));
        }
        sendJson(res, 200, out);
    }));
    server.Post("/jobs", guarded([this](const Request& req, Response& res) {
        sendJson(res, 201, jobs::toJson(jobs_->createJob(jobs::JobSpec::fromJson(jsonBody(req)))));
    }));
    server.Get(R"(/jobs/(\d+))", guarded([this](const Request& req, Response& res) {
        sendJson(res, 200, jobs::toJson(jobs_->job(idFrom(req))));
    }));
    server.Delete(R"(/jobs/(\d+))", guarded([this](const Request& req, Response& res) {
        jobs_->deleteJob(idFrom(req));
        sendJson(res, 204, {});
    }));
    server.Post(R"(/jobs/(\d+)/train)", guarded([this](const Request& req, Response& res) {
        const auto samples = jobs::samplesFromJson(jsonBody(req));
        sendJson(res, 200, jobs::toJson(jobs_->trainJob(idFrom(req), samples)));
    }));
    server.Post(R"(/jobs/(\d+)/start)", guarded([this](const Request& req, Response& res) {
        sendJson(res, 200, jobs::toJson(jobs_->startJob(idFrom(req))));
    }));
    server.Post(R"(/jobs/(\d+)/stop)", guarded([this](const Request& req, Response& res) {
        sendJson(res, 200, jobs::toJson(jobs_->stopJob(idFrom(req))));
    }));
    server.Post(R"(/ingest/([^/]+))", guarded([this](const Request& req, Response& res) {
        sendJson(res, 200, resultsJson(jobs_->manualIngest(req.matches[1].str(), jsonBody(req))));
    }));
    server.Post(R"(/notify/(\d+))", guarded([this](const Request& req, Response& res) {
        require(detail::isLoopback(req.remote_addr), ErrorKind::Authorization, "notification endpoint is loopback-only");
        sendJson(res, 200, resultsJson(jobs_->handleNotification(idFrom(req), jsonBody(req))));
    }));
}

void Service::installWarehouseRoutes() {
    using warehouse::CollectionKind;
    auto& server = *server_;
    auto& wh = *warehouse_;

    server.Get("/warehouse", guarded([&wh](const Request&, Response& res) {
        sendJson(res, 200,
                 Json{{"tagDomains", wh.domains().size()}, {"annotations", wh.annotationCount()},
                      {"services", wh.collections(CollectionKind::Service).size()},
                      {"experiments", wh.collections(CollectionKind::Experiment).size()}});
    }));

    server.Get("/warehouse/tagDomains", guarded([&wh](const Request&, Response& res) { sendJson(res, 200, listJson(wh.domains())); }));
    server.Post("/warehouse/tagDomains", guarded([&wh](const Request& req, Response& res) {
        const auto body = jsonBody(req);
        std::vector<std::string> tags;
        if (body.contains("tags")) {
            for (const auto& t : body.at("tags")) {
                tags.push_back(t.is_object() ? stringField(t, "name") : t.get<std::string>());
            }
        }
        const auto urn = stringField(body, "urn");
        const auto name = optionalString(body, "name").value_or(urn.substr(urn.rfind(':') + 1));
        sendJson(res, 201, warehouse::toJson(wh.createDomain(urn, name, optionalString(body, "description").value_or(""), tags)));
    }));
    server.Get(R"(/warehouse/tagDomains/([^/]+))", guarded([&wh](const Request& req, Response& res) {
        sendJson(res, 200, warehouse::toJson(wh.domain(req.matches[1].str())));
    }));
    server.Delete(R"(/warehouse/tagDomains/([^/]+))", guarded([&wh](const Request& req, Response& res) {
        wh.deleteDomain(req.matches[1].str());
        sendJson(res, 204, {});
    }));
    server.Get(R"(/warehouse/tagDomains/([^/]+)/tags)", guarded([&wh](const Request& req, Response& res) {
        sendJson(res, 200, listJson(wh.tags(req.matches[1].str())));
    }));
    server.Post(R"(/warehouse/tagDomains/([^/]+)/tags)", guarded([&wh](const Request& req, Response& res) {
        const auto body = jsonBody(req);
        sendJson(res, 201, warehouse::toJson(wh.createTag(req.matches[1].str(), stringField(body, "name"), optionalString(body, "urn"))));
    }));
    server.Get(R"(/warehouse/tagDomains/([^/]+)/suggestions)", guarded([&wh](const Request& req, Response& res) {
        sendJson(res, 200, listJson(wh.suggestTags(req.matches[1].str())));
    }));
    server.Get(R"(/warehouse/tags/([^/]+))", guarded([&wh](const Request& req, Response& res) {
        sendJson(res, 200, warehouse::toJson(wh.tag(req.matches[1].str())));
    }));
    server.Delete(R"(/warehouse/tags/([^/]+))", guarded([&wh](const Request& req, Response& res) {
        wh.deleteTag(req.matches[1].str());
        sendJson(res, 204, {});
    }));

    for (const auto kind : {CollectionKind::Service, CollectionKind::Experiment}) {
        const std::string base = kind == CollectionKind::Service ? "/warehouse/services" : "/warehouse/experiments";
        server.Get(base, guarded([&wh, kind](const Request&, Response& res) { sendJson(res, 200, listJson(wh.collections(kind))); }));
        server.Post(base, guarded([&wh, kind](const Request& req, Response& res) {
            const auto body = jsonBody(req);
            const auto urn = stringField(body, "urn");
            sendJson(res, 201,
                     warehouse::toJson(wh.createCollection(kind, urn, optionalString(body, "name").value_or(urn), linkedDomains(body))));
        }));
        server.Get(base + R"(/([^/]+))", guarded([&wh, kind](const Request& req, Response& res) {
            sendJson(res, 200, warehouse::toJson(wh.collection(kind, req.matches[1].str())));
        }));
        server.Delete(base + R"(/([^/]+))", guarded([&wh, kind](const Request& req, Response& res) {
            wh.deleteCollection(kind, req.matches[1].str());
            sendJson(res, 204, {});
        }));
    }

    server.Post("/warehouse/annotations", guarded([&wh](const Request& req, Response& res) {
        sendJson(res, 201, warehouse::toJson(wh.annotate(draftFromJson(jsonBody(req)))));
    }));
    server.Get("/warehouse/annotations", guarded([&wh](const Request& req, Response& res) {
        std::size_t limit = 200;
        if (auto text = param(req, "limit")) {
            const auto value = parseInteger(*text);
            require(value > 0, ErrorKind::Validation, "limit must be positive");
            limit = static_cast<std::size_t>(value);
        }
        sendJson(res, 200, listJson(wh.recentAnnotations(limit)));
    }));
    server.Get(R"(/warehouse/annotations/([^/]+))", guarded([&wh](const Request& req, Response& res) {
        sendJson(res, 200, warehouse::toJson(wh.annotation(req.matches[1].str())));
    }));
    server.Delete(R"(/warehouse/annotations/([^/]+))", guarded([&wh](const Request& req, Response& res) {
        wh.deleteAnnotation(req.matches[1].str(), warehouse::Annotator::parse(requiredParam(req, "annotator")));
        sendJson(res, 204, {});
    }));
    server.Post(R"(/warehouse/annotations/([^/]+)/review)", guarded([&wh](const Request& req, Response& res) {
        const auto body = jsonBody(req);
        const auto verdict = warehouse::validationFromString(stringField(body, "verdict"));
        sendJson(res, 200, warehouse::toJson(wh.review(req.matches[1].str(), verdict, stringField(body, "userId"))));
    }));

    server.Get(R"(/warehouse/assets/([^/]+)/annotations)", guarded([&wh](const Request& req, Response& res) {
        sendJson(res, 200, listJson(wh.annotationsFor(req.matches[1].str(), intervalParam(req), param(req, "tagDomain"))));
    }));
    server.Get("/warehouse/assets", guarded([&wh](const Request& req, Response& res) {
        warehouse::AssetQuery query;
        query.tags = csvSet(requiredParam(req, "tags"));
        if (auto bbox = param(req, "bbox")) {
            query.bbox = BoundingBox::parse(*bbox);
        }
        query.interval = intervalParam(req);
        query.includeRejected = detail::boolParam(req, "includeRejected", false);
        sendJson(res, 200, listJson(wh.findAssets(query)));
    }));
    server.Get("/warehouse/discovery/export", guarded([&wh](const Request&, Response& res) {
        sendJson(res, 200, warehouse::toJson(wh.discoveryExport()));
    }));
    server.Get("/warehouse/audit", guarded([&wh](const Request&, Response& res) {
        const auto report = wh.audit();
        sendJson(res, 200, Json{{"clean", report.clean()}, {"violations", report.violations}});
    }));
}

void Service::installAnalyticsRoutes() {
    auto& server = *server_;
    auto& store = series_;

    // A missing attribute resolves to the asset's only recorded attribute.
    auto seriesFor = [&store](const Request& req, const char* assetName, const char* attrName) {
        const auto asset = requiredParam(req, assetName);
        auto attr = param(req, attrName);
        if (!attr) {
            std::vector<std::string> candidates;
            for (const auto& [key, count] : store.keys()) {
                if (key.assetUrn == asset) {
                    candidates.push_back(key.attribute);
                }
            }
            require(candidates.size() == 1, ErrorKind::Validation,
                    std::string("parameter '") + attrName + "' is required for " + asset);
            attr = candidates.front();
        }
        require(store.contains(asset, *attr), ErrorKind::NotFound, "no series for " + asset + "/" + *attr);
        return store.series(asset, *attr, intervalParam(req));
    };

    server.Get("/analytics", guarded([&store](const Request&, Response& res) {
        sendJson(res, 200, Json{{"series", store.keys().size()}, {"points", store.pointCount()}});
    }));
    server.Get("/analytics/series", guarded([&store](const Request&, Response& res) {
        Json out = Json::array();
        for (const auto& [key, count] : store.keys()) {
            out.push_back(Json{{"assetUrn", key.assetUrn}, {"attribute", key.attribute}, {"points", count}});
        }
        sendJson(res, 200, out);
    }));
    server.Get("/analytics/series/points", guarded([seriesFor](const Request& req, Response& res) {
        Json out = Json::array();
        for (const auto& p : seriesFor(req, "asset", "attr")) {
            out.push_back(Json{{"timestamp", formatInstant(p.timestamp)}, {"value", p.value}});
        }
        sendJson(res, 200, out);
    }));
    server.Post("/analytics/series", guarded([&store](const Request& req, Response& res) {
        std::istringstream in(req.body);
        const auto before = store.pointCount();
        const auto malformed = store.loadCsv(in);
        sendJson(res, 200, Json{{"added", store.pointCount() - before}, {"malformed", malformed}});
    }));
    server.Get("/analytics/pearson", guarded([seriesFor](const Request& req, Response& res) {
        const auto a = seriesFor(req, "assetA", "attrA");
        const auto b = seriesFor(req, "assetB", "attrB");
        const auto bucket = secondsParam(req, "bucket", std::chrono::seconds(600));
        const auto pairs = analytics::align(a, b, bucket);
        if (detail::boolParam(req, "perDay", false)) {
            Json days = Json::array();
            for (const auto& day : analytics::dailyPearson(pairs)) {
                days.push_back(Json{{"date", formatDate(day.date)}, {"r", optionalNumber(day.r)}, {"pairCount", day.pairCount}});
            }
            sendJson(res, 200, Json{{"bucketSeconds", bucket.count()}, {"days", days}});
            return;
        }
        sendJson(res, 200, Json{{"bucketSeconds", bucket.count()}, {"r", optionalNumber(analytics::pearson(pairs))}, {"pairCount", pairs.size()}});
    }));
    server.Get("/analytics/profile", guarded([seriesFor](const Request& req, Response& res) {
        const auto profile = analytics::hourlyProfile(seriesFor(req, "asset", "attr"), weekdaySet(param(req, "weekday")));
        Json hours = Json::array();
        for (std::size_t h = 0; h < profile.size(); ++h) {
            hours.push_back(Json{{"hour", h}, {"mean", optionalNumber(profile[h])}});
        }
        sendJson(res, 200, Json{{"hours", hours}});
    }));
    server.Get("/analytics/gaps", guarded([seriesFor](const Request& req, Response& res) {
        const auto maxGap = secondsParam(req, "maxGap", std::chrono::seconds(3600));
        Json out = Json::array();
        for (const auto& gap : analytics::detectGaps(seriesFor(req, "asset", "attr"), maxGap)) {
            out.push_back(Json{{"start", formatInstant(gap.start)}, {"end", formatInstant(gap.end)},
                               {"seconds", std::chrono::duration_cast<std::chrono::seconds>(gap.end - gap.start).count()}});
        }
        sendJson(res, 200, out);
    }));
    server.Get("/analytics/seasonal", guarded([&store](const Request& req, Response& res) {
        const auto asset = requiredParam(req, "asset");
        const auto attr = requiredParam(req, "attr");
        require(store.contains(asset, attr), ErrorKind::NotFound, "no series for " + asset + "/" + attr);
        const auto periodA = intervalParam(req, "fromA", "toA");
        const auto periodB = intervalParam(req, "fromB", "toB");
        sendJson(res, 200, Json{{"ratio", optionalNumber(analytics::seasonalRatio(store.series(asset, attr), periodA, periodB))}});
    }));
}

}// namespace cityforge::service
