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
#include <cityforge/analytics/analysis.hpp>
#include <cityforge/common/error.hpp>
#include <cityforge/common/url.hpp>
#include <cityforge/service/service.hpp>

#include <gtest/gtest.h>
#include <httplib.h>

#include <ifaddrs.h>
#include <netinet/in.h>
#include <arpa/inet.h>
#include <unistd.h>

#include <cmath>
#include <filesystem>

using namespace cityforge;
using namespace std::chrono_literals;

namespace {

namespace fs = std::filesystem;

const std::string kLight = "urn:oc:tagDomain:LightLevel";
const std::string kSensor = "urn:oc:entity:santander:light:s01";

fs::path freshDir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("svc-" + std::to_string(::getpid()) + "-" + name);
    fs::remove_all(dir);
    return dir;
}

struct Reply {
    int status = 0;
    Json body;
    httplib::Headers headers;
};

class Api {
  public:
    explicit Api(int port) : client_("127.0.0.1", port) {}

    Reply get(const std::string& path) { return wrap(client_.Get(path)); }
    Reply post(const std::string& path, const Json& body) { return wrap(client_.Post(path, body.dump(), "application/json")); }
    Reply postRaw(const std::string& path, const std::string& body, const std::string& type) {
        return wrap(client_.Post(path, body, type));
    }
    Reply del(const std::string& path) { return wrap(client_.Delete(path)); }
    Reply options(const std::string& path) { return wrap(client_.Options(path)); }

  private:
    static Reply wrap(const httplib::Result& result) {
        if (!result) {
            ADD_FAILURE() << "request failed: " << httplib::to_string(result.error());
            return {};
        }
        Reply reply{result->status, Json(), result->headers};
        if (!result->body.empty()) {
            reply.body = Json::parse(result->body);
        }
        return reply;
    }

    httplib::Client client_;
};

std::string header(const Reply& reply, const std::string& name) {
    const auto it = reply.headers.find(name);
    return it == reply.headers.end() ? "" : it->second;
}

service::ServiceOptions options(const std::optional<fs::path>& dataDir = std::nullopt) {
    service::ServiceOptions o;
    o.host = "127.0.0.1";
    o.port = 0;
    o.dataDir = dataDir;
    o.brokerOptions.retryDelays = {10ms};
    return o;
}

Json lightUpdate(double value, const std::string& ts = "") {
    Json attr{{"value", value}};
    if (!ts.empty()) {
        attr["metadata"] = {{"timestamp", ts}};
    }
    return Json{{"light", attr}};
}

std::string attrsPath(const std::string& id, const std::string& type) {
    return "/v2/entities/" + percentEncode(id) + "/attrs?type=" + type;
}

Json fig3Domain() {
    return Json{{"urn", kLight}, {"name", "LightLevel"}, {"description", "Light level"}, {"tags", {"night", "sunlight", "overcast"}}};
}

Json fig3Job() {
    return Json{{"kind", "classification"},
                {"tagDomain", kLight},
                {"attribute", "light"},
                {"query", {{"idPattern", ".*light.*"}}}};
}

Json fig3Samples() {
    return Json::array({{{"tag", "night"}, {"value", 0}}, {{"tag", "sunlight"}, {"value", 100}}, {{"tag", "overcast"}, {"value", 300}}});
}

class ServiceTest : public ::testing::Test {
  protected:
    void SetUp() override {
        service_ = std::make_unique<service::Service>(options());
        service_->start();
        api_ = std::make_unique<Api>(service_->port());
    }

    std::unique_ptr<service::Service> service_;
    std::unique_ptr<Api> api_;
};

}// namespace

TEST_F(ServiceTest, ApiRootsAnswer) {
    for (const auto* path : {"/health", "/v2", "/jobs", "/warehouse", "/analytics"}) {
        EXPECT_EQ(api_->get(path).status, 200) << path;
    }
    EXPECT_EQ(api_->get("/nowhere").status, 404);
}

TEST_F(ServiceTest, CorsHeadersAndPreflight) {
    const auto reply = api_->get("/health");
    EXPECT_EQ(header(reply, "Access-Control-Allow-Origin"), "*");
    const auto preflight = api_->options("/warehouse/annotations");
    EXPECT_EQ(preflight.status, 204);
    EXPECT_NE(header(preflight, "Access-Control-Allow-Methods"), "");
}

TEST_F(ServiceTest, BrokerEntitiesAndSubscriptions) {
    const auto id = "urn:oc:entity:santander:parking:p001";
    auto first = api_->post(attrsPath(id, "parking"), Json{{"freeSpots", {{"value", 40}}}});
    ASSERT_EQ(first.status, 200);
    EXPECT_EQ(first.body["version"], 1);
    EXPECT_EQ(api_->post(attrsPath(id, "parking"), Json{{"occupied", {{"value", 80}}}}).body["version"], 2);

    const auto entity = api_->get("/v2/entities/" + percentEncode(id));
    ASSERT_EQ(entity.status, 200);
    EXPECT_EQ(entity.body["type"], "parking");
    EXPECT_EQ(entity.body["freeSpots"]["value"], 40.0);

    const auto projected = api_->get("/v2/entities?idPattern=.*parking.*&attrs=occupied");
    ASSERT_EQ(projected.body.size(), 1u);
    EXPECT_FALSE(projected.body[0].contains("freeSpots"));
    EXPECT_TRUE(projected.body[0].contains("occupied"));
    EXPECT_TRUE(api_->get("/v2/entities?type=traffic").body.empty());
    EXPECT_EQ(api_->get("/v2/entities/urn:oc:entity:none").status, 404);

    const auto created = api_->post("/v2/subscriptions", Json{{"query", {{"idPattern", "^urn:oc:entity:santander:parking:.*$"}}},
                                                              {"callbackUrl", "http://127.0.0.1:9/hook"}});
    ASSERT_EQ(created.status, 201);
    const auto subId = created.body["id"].get<std::string>();
    EXPECT_EQ(api_->get("/v2/subscriptions").body.size(), 1u);
    EXPECT_EQ(api_->del("/v2/subscriptions/" + subId).status, 204);
    EXPECT_EQ(api_->del("/v2/subscriptions/" + subId).status, 404);
    EXPECT_EQ(api_->post("/v2/subscriptions", Json{{"query", {{"idPattern", "("}}}, {"callbackUrl", "http://x/"}}).status, 400);
}

TEST_F(ServiceTest, ErrorsCarryKindAndStatus) {
    const auto bad = api_->postRaw("/jobs", "{not json", "application/json");
    EXPECT_EQ(bad.status, 400);
    EXPECT_EQ(bad.body["error"], "protocol");
    EXPECT_TRUE(bad.body.contains("message"));

    EXPECT_EQ(api_->post("/warehouse/tagDomains", fig3Domain()).status, 201);
    const auto dup = api_->post("/warehouse/tagDomains", fig3Domain());
    EXPECT_EQ(dup.status, 409);
    EXPECT_EQ(dup.body["error"], "conflict");
    EXPECT_EQ(api_->get("/jobs/99").status, 404);
    EXPECT_EQ(api_->post("/jobs/99/start", Json::object()).status, 404);
}

TEST_F(ServiceTest, LightLevelFeedOverHttp) {
    ASSERT_EQ(api_->post("/warehouse/tagDomains", fig3Domain()).status, 201);
    const auto job = api_->post("/jobs", fig3Job());
    ASSERT_EQ(job.status, 201);
    const auto id = std::to_string(job.body["id"].get<int>());
    EXPECT_EQ(api_->post("/jobs/" + id + "/start", Json::object()).status, 409);
    EXPECT_EQ(api_->post("/jobs/" + id + "/train", fig3Samples()).body["status"], "trained");
    const auto started = api_->post("/jobs/" + id + "/start", Json::object());
    EXPECT_EQ(started.body["status"], "running");
    EXPECT_FALSE(started.body["subscriptionId"].is_null());

    const std::vector<double> values{0.0, 75.0, 200.0, 45.0, 33.0, 181.0, 63.0, 1237.0, 177.0, 40.0};
    const std::vector<std::string> expected{"night", "sunlight", "overcast", "night", "night", "sunlight", "sunlight", "overcast", "sunlight", "night"};
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto ts = "2017-11-06T10:00:0" + std::to_string(i) + "Z";
        ASSERT_EQ(api_->post(attrsPath(kSensor, "light"), lightUpdate(values[i], ts)).status, 200);
    }
    service_->broker().waitIdle();

    const auto annotations = api_->get("/warehouse/assets/" + percentEncode(kSensor) + "/annotations");
    ASSERT_EQ(annotations.body.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        EXPECT_EQ(annotations.body[i]["tagUrn"], kLight + ":" + expected[i]) << values[i];
        EXPECT_EQ(annotations.body[i]["validation"], "unreviewed");
        EXPECT_EQ(annotations.body[i]["annotator"], "machine:" + id);
    }
    const auto status = api_->get("/jobs/" + id);
    EXPECT_EQ(status.body["processed"], values.size());
    EXPECT_EQ(status.body["annotated"], values.size());

    const auto recent = api_->get("/warehouse/annotations?limit=3");
    ASSERT_EQ(recent.body.size(), 3u);
    EXPECT_EQ(recent.body[0]["note"], annotations.body[9]["note"]);

    // Manual ingest goes through the same executor.
    const auto token = job.body["ingestToken"].get<std::string>();
    const Json notification{{"data", {{{"id", kSensor}, {"type", "light"}, {"light", {{"value", 200.0}, {"metadata", {{"timestamp", "2017-11-06T11:00:00Z"}}}}}}}}};
    const auto ingested = api_->post("/ingest/" + token, notification);
    ASSERT_EQ(ingested.status, 200);
    ASSERT_EQ(ingested.body.size(), 1u);
    EXPECT_EQ(ingested.body[0]["tag"], kLight + ":overcast");
    EXPECT_EQ(api_->post("/ingest/" + std::string(32, '0'), notification).status, 403);
    EXPECT_EQ(api_->post("/ingest/" + token, Json{{"nope", 1}}).status, 400);

    EXPECT_EQ(api_->post("/jobs/" + id + "/stop", Json::object()).body["status"], "stopped");
    EXPECT_TRUE(api_->get("/v2/subscriptions").body.empty());
    EXPECT_EQ(api_->del("/jobs/" + id).status, 204);
    EXPECT_EQ(api_->get("/warehouse/assets/" + percentEncode(kSensor) + "/annotations").body.size(), values.size() + 1);
}

TEST_F(ServiceTest, NotifyRejectsNonLoopbackPeers) {
    std::string external;
    ifaddrs* list = nullptr;
    if (::getifaddrs(&list) == 0) {
        for (auto* it = list; it; it = it->ifa_next) {
            if (it->ifa_addr && it->ifa_addr->sa_family == AF_INET) {
                char text[INET_ADDRSTRLEN];
                ::inet_ntop(AF_INET, &reinterpret_cast<sockaddr_in*>(it->ifa_addr)->sin_addr, text, sizeof text);
                if (!std::string(text).starts_with("127.")) {
                    external = text;
                    break;
                }
            }
        }
        ::freeifaddrs(list);
    }
    auto opts = options();
    opts.host = "0.0.0.0";
    service::Service open(opts);
    open.start();
    Api local(open.port());
    EXPECT_EQ(local.post("/notify/1", Json{{"data", Json::array()}}).status, 404);
    if (external.empty()) {
        GTEST_SKIP() << "no non-loopback IPv4 interface";
    }
    httplib::Client remote(external, open.port());
    const auto result = remote.Post("/notify/1", "{}", "application/json");
    ASSERT_TRUE(result);
    EXPECT_EQ(result->status, 403);
}

TEST_F(ServiceTest, WarehouseEndpoints) {
    ASSERT_EQ(api_->post("/warehouse/tagDomains", Json{{"urn", "urn:oc:tagDomain:Air"}, {"tags", {"highPollution"}}}).status, 201);
    ASSERT_EQ(api_->post("/warehouse/tagDomains/urn:oc:tagDomain:Air/tags", Json{{"name", "lowSpeed"}}).status, 201);
    EXPECT_EQ(api_->post("/warehouse/tagDomains/urn:oc:tagDomain:Air/tags", Json{{"name", "x"}, {"urn", "urn:oc:tagDomain:Other:x"}}).status, 400);
    const auto domain = api_->get("/warehouse/tagDomains/urn:oc:tagDomain:Air");
    ASSERT_EQ(domain.status, 200);
    EXPECT_EQ(domain.body["tags"].size(), 2u);
    EXPECT_EQ(api_->get("/warehouse/tagDomains/urn:oc:tagDomain:Air/tags").body.size(), 2u);

    const std::string high = "urn:oc:tagDomain:Air:highPollution";
    const std::string low = "urn:oc:tagDomain:Air:lowSpeed";
    auto annotate = [&](const std::string& asset, const std::string& tag, const std::string& ts) {
        return api_->post("/warehouse/annotations",
                          Json{{"assetUrn", asset}, {"tagUrn", tag}, {"annotator", "user:alice"}, {"note", 1}, {"timestamp", ts},
                               {"location", {{"lat", 43.46}, {"lon", -3.80}}}});
    };
    const auto a1 = annotate("urn:oc:entity:street:1", high, "2017-11-06T08:00:00Z");
    ASSERT_EQ(a1.status, 201);
    EXPECT_EQ(a1.body["validation"], "confirmed");
    ASSERT_EQ(annotate("urn:oc:entity:street:1", low, "2017-11-06T08:05:00Z").status, 201);
    ASSERT_EQ(annotate("urn:oc:entity:street:2", high, "2017-11-06T08:00:00Z").status, 201);
    EXPECT_EQ(annotate("urn:oc:entity:street:2", high, "2017-11-06T08:00:00Z").status, 409);
    EXPECT_EQ(annotate("urn:oc:entity:street:2", "urn:oc:tagDomain:Air:none", "2017-11-06T08:00:00Z").status, 404);

    const auto both = api_->get("/warehouse/assets?tags=" + high + "," + low);
    ASSERT_EQ(both.body.size(), 1u);
    EXPECT_EQ(both.body[0]["assetUrn"], "urn:oc:entity:street:1");
    EXPECT_EQ(api_->get("/warehouse/assets?tags=" + high).body.size(), 2u);
    EXPECT_TRUE(api_->get("/warehouse/assets?tags=" + high + "&bbox=0,0,1,1").body.empty());
    EXPECT_TRUE(api_->get("/warehouse/assets?tags=" + high + "&from=2018-01-01T00:00:00Z").body.empty());
    EXPECT_EQ(api_->get("/warehouse/assets?tags=" + high + "&from=2018-01-01T00:00:00Z&to=2017-01-01T00:00:00Z").status, 400);

    const auto id = a1.body["id"].get<std::string>();
    const auto reviewed = api_->post("/warehouse/annotations/" + id + "/review", Json{{"verdict", "rejected"}, {"userId", "bob"}});
    EXPECT_EQ(reviewed.body["validation"], "rejected");
    EXPECT_EQ(reviewed.body["reviewedBy"], "bob");
    EXPECT_TRUE(api_->get("/warehouse/assets?tags=" + high + "," + low).body.empty());
    EXPECT_EQ(api_->get("/warehouse/assets?tags=" + high + "," + low + "&includeRejected=true").body.size(), 1u);
    EXPECT_EQ(api_->get("/warehouse/tagDomains/urn:oc:tagDomain:Air/suggestions").body[0]["urn"], high);

    const auto exported = api_->get("/warehouse/discovery/export");
    ASSERT_EQ(exported.body.size(), 2u);
    EXPECT_EQ(exported.body[0]["assetUrn"], "urn:oc:entity:street:1");
    EXPECT_EQ(exported.body[0]["tags"].size(), 1u);
    EXPECT_EQ(exported.body[0]["tags"][0]["latest"], "2017-11-06T08:05:00Z");

    EXPECT_EQ(api_->del("/warehouse/tags/" + high).status, 409);
    EXPECT_EQ(api_->del("/warehouse/tagDomains/urn:oc:tagDomain:Air").status, 409);
    EXPECT_EQ(api_->del("/warehouse/annotations/" + id + "?annotator=user:bob").status, 403);
    EXPECT_EQ(api_->del("/warehouse/annotations/" + id + "?annotator=user:alice").status, 204);
    EXPECT_EQ(api_->get("/warehouse/annotations/" + id).status, 404);

    ASSERT_EQ(api_->post("/warehouse/services", Json{{"urn", "urn:oc:service:air"}, {"name", "Air"}, {"linkedDomains", {"urn:oc:tagDomain:Air"}}}).status, 201);
    EXPECT_EQ(api_->post("/warehouse/experiments", Json{{"urn", "urn:oc:experiment:x"}, {"linkedDomains", {"urn:oc:tagDomain:Nope"}}}).status, 400);
    EXPECT_EQ(api_->get("/warehouse/services").body.size(), 1u);
    EXPECT_EQ(api_->get("/warehouse/services/urn:oc:service:air").body["name"], "Air");
    EXPECT_EQ(api_->del("/warehouse/services/urn:oc:service:air").status, 204);

    const auto audit = api_->get("/warehouse/audit");
    EXPECT_TRUE(audit.body["clean"].get<bool>());
}

TEST_F(ServiceTest, AnalyticsFromBrokerAndCsv) {
    // Broker updates land in the history.
    for (int i = 0; i < 5; ++i) {
        api_->post(attrsPath("urn:oc:entity:santander:parking:p-total", "parking"),
                   Json{{"freeSpots", {{"value", 10 * i}, {"metadata", {{"timestamp", "2017-11-06T0" + std::to_string(i) + ":00:00Z"}}}}},
                        {"label", {{"value", "text"}}}});
    }
    const auto listed = api_->get("/analytics/series");
    ASSERT_EQ(listed.body.size(), 1u);
    EXPECT_EQ(listed.body[0]["points"], 5);

    std::string csv = "timestamp,asset_urn,attribute,value\n";
    for (int i = 0; i < 48; ++i) {
        const auto hh = (i % 24 < 10 ? "0" : "") + std::to_string(i % 24);
        const auto day = i < 24 ? "06" : "07";
        const double x = std::sin(i * 0.3) + i * 0.01;
        csv += "2017-11-" + std::string(day) + "T" + hh + ":00:00Z,urn:t:a,x," + std::to_string(x) + "\n";
        csv += "2017-11-" + std::string(day) + "T" + hh + ":00:00Z,urn:t:b,y," + std::to_string(-2 * x + std::cos(i)) + "\n";
    }
    csv += "garbage\n";
    const auto loaded = api_->postRaw("/analytics/series", csv, "text/csv");
    EXPECT_EQ(loaded.body["added"], 96);
    EXPECT_EQ(loaded.body["malformed"], 1);

    const auto expected = analytics::pearson(analytics::align(service_->series().series("urn:t:a", "x"), service_->series().series("urn:t:b", "y"), 3600s));
    const auto r = api_->get("/analytics/pearson?assetA=urn:t:a&attrA=x&assetB=urn:t:b&attrB=y&bucket=3600");
    ASSERT_EQ(r.status, 200);
    EXPECT_DOUBLE_EQ(r.body["r"].get<double>(), *expected);
    EXPECT_EQ(r.body["pairCount"], 48);
    // Attributes resolve when an asset has a single series.
    EXPECT_DOUBLE_EQ(api_->get("/analytics/pearson?assetA=urn:t:a&assetB=urn:t:b&bucket=3600").body["r"].get<double>(), *expected);

    const auto daily = api_->get("/analytics/pearson?assetA=urn:t:a&attrA=x&assetB=urn:t:b&attrB=y&bucket=3600&perDay=true");
    ASSERT_EQ(daily.body["days"].size(), 2u);
    EXPECT_EQ(daily.body["days"][0]["date"], "2017-11-06");
    EXPECT_EQ(daily.body["days"][0]["pairCount"], 24);

    const auto profile = api_->get("/analytics/profile?asset=urn:t:a&weekday=MON");
    ASSERT_EQ(profile.body["hours"].size(), 24u);
    EXPECT_EQ(api_->get("/analytics/profile?asset=urn:t:a&weekday=SUN").status, 400);
    EXPECT_EQ(api_->get("/analytics/profile?asset=urn:t:a&weekday=XYZ").status, 400);

    const auto gaps = api_->get("/analytics/gaps?asset=urn:oc:entity:santander:parking:p-total&attr=freeSpots&maxGap=1800");
    EXPECT_EQ(gaps.body.size(), 4u);
    EXPECT_TRUE(api_->get("/analytics/gaps?asset=urn:t:a&maxGap=3600").body.empty());
    EXPECT_EQ(api_->get("/analytics/gaps?asset=urn:none&attr=x").status, 404);

    const auto seasonal = api_->get("/analytics/seasonal?asset=urn:t:a&attr=x&fromA=2017-11-07T00:00:00Z&toA=2017-11-08T00:00:00Z"
                                    "&fromB=2017-11-06T00:00:00Z&toB=2017-11-07T00:00:00Z");
    ASSERT_EQ(seasonal.status, 200);
    EXPECT_TRUE(seasonal.body["ratio"].is_number());

    const auto points = api_->get("/analytics/series/points?asset=urn:t:a&attr=x&from=2017-11-07T00:00:00Z");
    EXPECT_EQ(points.body.size(), 24u);
}

TEST(ServiceLifecycle, RestartKeepsJobsAnnotationsAndHistory) {
    const auto dir = freshDir("restart");
    struct Cleanup {
        fs::path dir;
        ~Cleanup() { fs::remove_all(dir); }
    } cleanup{dir};
    std::string jobId;
    {
        service::Service first(options(dir));
        first.start();
        Api api(first.port());
        ASSERT_EQ(api.post("/warehouse/tagDomains", fig3Domain()).status, 201);
        jobId = std::to_string(api.post("/jobs", fig3Job()).body["id"].get<int>());
        api.post("/jobs/" + jobId + "/train", fig3Samples());
        api.post("/jobs/" + jobId + "/start", Json::object());
        api.post(attrsPath(kSensor, "light"), lightUpdate(75.0, "2017-11-06T10:00:00Z"));
        first.broker().waitIdle();
        first.stop();
    }
    service::Service second(options(dir));
    second.start();
    Api api(second.port());
    const auto job = api.get("/jobs/" + jobId);
    ASSERT_EQ(job.status, 200);
    EXPECT_EQ(job.body["status"], "running");
    EXPECT_EQ(job.body["processed"], 1);
    EXPECT_EQ(api.get("/v2/subscriptions").body.size(), 1u);
    EXPECT_EQ(api.get("/warehouse/assets/" + percentEncode(kSensor) + "/annotations").body.size(), 1u);
    EXPECT_EQ(api.get("/analytics/series").body.size(), 1u);

    // The resubscribed job keeps annotating.
    api.post(attrsPath(kSensor, "light"), lightUpdate(1237.0, "2017-11-06T10:01:00Z"));
    second.broker().waitIdle();
    const auto annotations = api.get("/warehouse/assets/" + percentEncode(kSensor) + "/annotations");
    ASSERT_EQ(annotations.body.size(), 2u);
    EXPECT_EQ(annotations.body[1]["tagUrn"], kLight + ":overcast");
    EXPECT_EQ(annotations.body[1]["id"], "ann-2");
    second.stop();
}

TEST(ServiceLifecycle, OccupiedPortIsAStartupError) {
    service::Service first(options());
    first.start();
    auto opts = options();
    opts.port = first.port();
    service::Service second(opts);
    try {
        second.start();
        FAIL() << "second bind succeeded";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Unavailable);
    }
}

TEST(ServiceLifecycle, DiscoveryWebhookReceivesExport) {
    httplib::Server hook;
    std::mutex mutex;
    std::vector<Json> received;
    hook.Post("/export", [&](const httplib::Request& req, httplib::Response& res) {
        std::lock_guard lock(mutex);
        received.push_back(Json::parse(req.body));
        res.status = 200;
    });
    const int hookPort = hook.bind_to_any_port("127.0.0.1");
    std::thread hookThread([&] { hook.listen_after_bind(); });
    hook.wait_until_ready();

    auto opts = options();
    opts.discoveryUrl = "http://127.0.0.1:" + std::to_string(hookPort) + "/export";
    opts.discoveryDebounce = 50ms;
    {
        service::Service svc(opts);
        svc.start();
        Api api(svc.port());
        api.post("/warehouse/tagDomains", fig3Domain());
        api.post("/warehouse/annotations", Json{{"assetUrn", kSensor}, {"tagUrn", kLight + ":night"}, {"userId", "alice"}});
        svc.stop();
    }
    hook.stop();
    hookThread.join();
    ASSERT_FALSE(received.empty());
    EXPECT_EQ(received.back()[0]["assetUrn"], kSensor);
    EXPECT_EQ(received.back()[0]["tags"][0]["count"], 1);
}
