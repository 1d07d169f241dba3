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

#include <cityforge/common/transport.hpp>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <fstream>

namespace cityforge::service {

namespace fs = std::filesystem;
using detail::guarded;
using detail::sendJson;

Service::Service(ServiceOptions options) : options_(std::move(options)) {
    std::optional<fs::path> journal;
    if (options_.dataDir) {
        std::error_code ec;
        fs::create_directories(*options_.dataDir, ec);
        if (ec || !fs::is_directory(*options_.dataDir)) {
            fail(ErrorKind::Unavailable, "data directory is not writable: " + options_.dataDir->string());
        }
        journal = *options_.dataDir / "warehouse.jsonl";
        const auto history = *options_.dataDir / "series.csv";
        if (fs::exists(history)) {
            std::ifstream in(history);
            const auto malformed = series_.loadCsv(in);
            if (malformed > 0) {
                spdlog::warn("{}: skipped {} malformed rows", history.string(), malformed);
            }
        }
    }
    warehouse_ = std::make_unique<warehouse::KnowledgeWarehouse>(journal);
}

Service::~Service() {
    try {
        stop();
    } catch (const std::exception& e) {
        spdlog::error("shutdown: {}", e.what());
    }
}

std::string Service::baseUrl() const { return "http://127.0.0.1:" + std::to_string(port_); }

void Service::start() {
    require(!server_, ErrorKind::State, "service already started");
    server_ = std::make_unique<httplib::Server>();
    server_->set_tcp_nodelay(true);
    server_->set_socket_options([](socket_t sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    if (options_.port == 0) {
        port_ = server_->bind_to_any_port(options_.host);
        if (port_ < 0) {
            port_ = 0;
        }
    } else if (server_->bind_to_port(options_.host, options_.port)) {
        port_ = options_.port;
    }
    if (port_ == 0) {
        server_.reset();
        fail(ErrorKind::Unavailable, "cannot listen on " + options_.host + ":" + std::to_string(options_.port));
    }

    broker_ = std::make_unique<broker::Broker>(std::make_shared<HttpTransport>(), options_.brokerOptions);
    broker_->addUpdateListener([this](const std::string& id, const std::string&, const broker::AttributeMap& attrs) {
        for (const auto& [name, attr] : attrs) {
            if (const auto value = asNumber(attr.value)) {
                series_.record(id, name, attr.timestamp, *value);
            }
        }
    });

    jobs::JobManagerOptions jobOptions;
    jobOptions.dataDir = options_.dataDir;
    jobOptions.callbackBase = baseUrl() + "/notify/";
    jobs_ = std::make_unique<jobs::JobManager>(*warehouse_, *broker_, jobOptions);

    if (options_.discoveryUrl) {
        publisher_ = std::make_unique<warehouse::DiscoveryPublisher>(*warehouse_, std::make_shared<HttpTransport>(),
                                                                     *options_.discoveryUrl, options_.discoveryDebounce);
        warehouse_->setChangeListener([publisher = publisher_.get()] { publisher->markDirty(); });
    }

    installRoutes();
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    jobs_->resumeRunningJobs();
    spdlog::info("listening on {}:{}", options_.host, port_);
}

void Service::wait() {
    if (thread_.joinable()) {
        thread_.join();
    }
}

void Service::stop() {
    if (stopped_ || !server_) {
        return;
    }
    stopped_ = true;
    server_->stop();
    wait();
    broker_->waitIdle();
    jobs_->flush();
    if (publisher_) {
        publisher_->flush();
        warehouse_->setChangeListener({});
        publisher_.reset();
    }
    warehouse_->compact();
    persistSeries();
    spdlog::info("stopped");
}

void Service::persistSeries() const {
    if (!options_.dataDir) {
        return;
    }
    const auto target = *options_.dataDir / "series.csv";
    const auto tmp = fs::path(target.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::trunc);
        series_.writeCsv(out);
        if (!out) {
            fail(ErrorKind::Unavailable, "cannot write " + tmp.string());
        }
    }
    fs::rename(tmp, target);
}

void Service::installRoutes() {
    auto& server = *server_;
    server.set_post_routing_handler([](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", "*");
    });
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });
    server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (res.body.empty()) {
            const auto kind = res.status == 404 ? "notFound" : "protocol";
            res.set_content(Json{{"error", kind}, {"message", req.method + " " + req.path}}.dump(), "application/json");
        }
    });
    server.Get("/health", guarded([](const httplib::Request&, httplib::Response& res) {
        sendJson(res, 200, Json{{"status", "ok"}});
    }));
    if (options_.consoleDir) {
        if (!server.set_mount_point("/console", options_.consoleDir->string())) {
            spdlog::warn("console directory {} not found", options_.consoleDir->string());
        }
    }
    installBrokerRoutes();
    installJobRoutes();
    installWarehouseRoutes();
    installAnalyticsRoutes();
}

}// namespace cityforge::service
