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

#include <cityforge/analytics/series.hpp>
#include <cityforge/broker/broker.hpp>
#include <cityforge/jobs/job_manager.hpp>
#include <cityforge/warehouse/discovery.hpp>
#include <cityforge/warehouse/warehouse.hpp>

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <thread>

namespace httplib {
class Server;
}

namespace cityforge::service {

struct ServiceOptions {
    std::string host = "0.0.0.0";
    /// 0 picks a free port.
    int port = 8080;
    /// Jobs, the warehouse journal and series history persist here when set.
    std::optional<std::filesystem::path> dataDir;
    /// Static console bundle mounted at `/console`.
    std::optional<std::filesystem::path> consoleDir;
    /// Discovery export webhook.
    std::optional<std::string> discoveryUrl;
    std::chrono::milliseconds discoveryDebounce{1000};
    broker::BrokerOptions brokerOptions;
};

/// Broker, jobs, warehouse and analytics behind one HTTP server.
class Service {
  public:
    explicit Service(ServiceOptions options);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds and serves in the background. Throws Error(Unavailable) when the port is taken.
    void start();
    /// Stops accepting requests, drains deliveries and flushes the stores. Idempotent.
    void stop();
    /// Blocks until the server thread exits.
    void wait();

    int port() const { return port_; }
    std::string baseUrl() const;

    broker::Broker& broker() { return *broker_; }
    warehouse::KnowledgeWarehouse& warehouse() { return *warehouse_; }
    jobs::JobManager& jobs() { return *jobs_; }
    analytics::SeriesStore& series() { return series_; }

  private:
    void installRoutes();
    void installBrokerRoutes();
    void installJobRoutes();
    void installWarehouseRoutes();
    void installAnalyticsRoutes();
    void persistSeries() const;

    ServiceOptions options_;
    int port_ = 0;
    analytics::SeriesStore series_;
    std::unique_ptr<warehouse::KnowledgeWarehouse> warehouse_;
    std::unique_ptr<broker::Broker> broker_;
    std::unique_ptr<jobs::JobManager> jobs_;
    std::unique_ptr<warehouse::DiscoveryPublisher> publisher_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    bool stopped_ = false;
};

}// namespace cityforge::service
