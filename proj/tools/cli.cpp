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
#include "cli.hpp"

#include "client.hpp"

#include <cityforge/common/error.hpp>
#include <cityforge/common/text.hpp>
#include <cityforge/common/url.hpp>
#include <cityforge/service/service.hpp>
#include <cityforge/simulator/config.hpp>
#include <cityforge/simulator/generator.hpp>
#include <cityforge/simulator/replay.hpp>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace cityforge::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kDefaultUrl = "http://127.0.0.1:8080";

struct CliConfig {
    std::string serviceUrl = kDefaultUrl;
    OutputFormat outputFormat = OutputFormat::Table;
    std::string configFile;
    int verbosity = 0;
};

std::string readFile(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw CliError(kIo, "cannot read " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

Json readJsonFile(const fs::path& path) {
    auto parsed = Json::parse(readFile(path), nullptr, false);
    if (parsed.is_discarded()) {
        throw CliError(kUsage, path.string() + " is not valid JSON");
    }
    return parsed;
}

/// Flags override the config file, which overrides CITYFORGE_URL.
CliConfig resolveConfig(const std::string& urlFlag, const std::string& outputFlag, const std::string& configFile, int verbosity) {
    CliConfig config;
    config.configFile = configFile;
    config.verbosity = verbosity;
    if (const char* env = std::getenv("CITYFORGE_URL"); env && *env) {
        config.serviceUrl = env;
    }
    if (!configFile.empty()) {
        const auto file = readJsonFile(configFile);
        if (!file.is_object()) {
            throw CliError(kUsage, configFile + " must hold a JSON object");
        }
        if (file.contains("serviceUrl")) {
            config.serviceUrl = file.at("serviceUrl").get<std::string>();
        }
        if (file.contains("outputFormat")) {
            config.outputFormat = outputFormatFromString(file.at("outputFormat").get<std::string>());
        }
    }
    if (!urlFlag.empty()) {
        config.serviceUrl = urlFlag;
    }
    if (!outputFlag.empty()) {
        config.outputFormat = outputFormatFromString(outputFlag);
    }
    return config;
}

std::string encode(const std::string& text) { return percentEncode(text); }

/// `idPattern=...&type=...&attrs=a,b&bbox=...` or a JSON object.
Json queryFromText(const std::string& text) {
    if (text.empty()) {
        return Json::object();
    }
    if (text.front() == '{') {
        auto parsed = Json::parse(text, nullptr, false);
        if (parsed.is_discarded() || !parsed.is_object()) {
            throw CliError(kUsage, "--query is not a JSON object");
        }
        return parsed;
    }
    Json query = Json::object();
    for (const auto& part : split(text, '&')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw CliError(kUsage, "--query expects key=value pairs, got '" + part + "'");
        }
        query[std::string(trim(part.substr(0, eq)))] = std::string(trim(part.substr(eq + 1)));
    }
    return query;
}

Json samplesFromCsv(const fs::path& path) {
    std::istringstream in(readFile(path));
    std::string line;
    bool header = false;
    Json samples = Json::array();
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (trim(line).empty()) {
            continue;
        }
        const auto cells = split(line, ',');
        if (!header) {
            if (cells.size() != 2 || trim(cells[0]) != "tag" || trim(cells[1]) != "value") {
                throw CliError(kUsage, path.string() + ": expected header 'tag,value'");
            }
            header = true;
            continue;
        }
        if (cells.size() != 2) {
            throw CliError(kUsage, path.string() + ":" + std::to_string(lineNo) + ": expected two columns");
        }
        Json sample{{"value", parseDouble(trim(cells[1]))}};
        if (const auto tag = trim(cells[0]); !tag.empty()) {
            sample["tag"] = std::string(tag);
        }
        samples.push_back(std::move(sample));
    }
    if (!header) {
        throw CliError(kUsage, path.string() + ": expected header 'tag,value'");
    }
    return samples;
}

std::string attributeForKind(std::string_view kind) {
    for (const auto stream : simulator::kAllStreams) {
        if (simulator::entityType(stream) == kind) {
            return std::string(simulator::attributeName(stream));
        }
    }
    return {};
}

double parseSpeed(const std::string& text) {
    if (text == "inf" || text == "max") {
        return std::numeric_limits<double>::infinity();
    }
    const double speed = parseDouble(text);
    if (speed <= 0) {
        throw CliError(kUsage, "--speed must be positive");
    }
    return speed;
}

int serve(const std::string& host, int port, const std::string& dataDir, const std::string& consoleDir,
          const std::string& discoveryUrl, int debounceMs, std::ostream& out) {
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    service::ServiceOptions options;
    options.host = host;
    options.port = port;
    if (!dataDir.empty()) {
        options.dataDir = fs::path(dataDir);
    }
    if (!consoleDir.empty()) {
        options.consoleDir = fs::path(consoleDir);
    }
    if (!discoveryUrl.empty()) {
        options.discoveryUrl = discoveryUrl;
    }
    options.discoveryDebounce = std::chrono::milliseconds(debounceMs);

    service::Service service(options);
    try {
        service.start();
    } catch (const Error& e) {
        throw CliError(kIo, e.what());
    }
    out << "listening on " << service.baseUrl() << std::endl;
    int received = 0;
    sigwait(&signals, &received);
    spdlog::info("signal {}, shutting down", received);
    service.stop();
    return kOk;
}

}// namespace

AssetRef parseAssetRef(const std::string& text) {
    AssetRef ref;
    auto base = text;
    if (const auto slash = text.find('/'); slash != std::string::npos) {
        base = text.substr(0, slash);
        ref.attribute = text.substr(slash + 1);
    }
    if (base.starts_with("urn:")) {
        ref.urn = base;
        return ref;
    }
    const auto colon = base.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == base.size()) {
        throw CliError(kUsage, "asset '" + text + "' must be kind:id[/attr] or a URN");
    }
    const auto kind = base.substr(0, colon);
    ref.urn = "urn:oc:entity:santander:" + base;
    if (ref.attribute.empty()) {
        ref.attribute = attributeForKind(kind);
    }
    return ref;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"cityforge: context broker, annotation jobs, knowledge warehouse and analytics"};
    app.name("cityforge");
    app.require_subcommand(1);

    std::string urlFlag;
    std::string outputFlag;
    std::string configFile;
    int verbosity = 0;
    app.add_option("--url", urlFlag, "Service URL (default: config file, then CITYFORGE_URL, then " + std::string(kDefaultUrl) + ")");
    app.add_option("-o,--output", outputFlag, "Output format: json, table or csv")->check(CLI::IsMember({"json", "table", "csv"}));
    app.add_option("-c,--config", configFile, "JSON config file with serviceUrl and outputFormat");
    app.add_flag("-v,--verbose", verbosity, "More logging; repeat for debug");

    // serve
    auto* serveCmd = app.add_subcommand("serve", "Run broker, jobs, warehouse and analytics as one process");
    std::string host = "0.0.0.0";
    int port = 8080;
    std::string dataDir = "cityforge-data";
    std::string consoleDir;
    std::string discoveryUrl;
    int debounceMs = 1000;
    serveCmd->add_option("--host", host, "Listen address");
    serveCmd->add_option("--port", port, "Listen port; 0 picks a free one")->check(CLI::Range(0, 65535));
    serveCmd->add_option("--data-dir", dataDir, "Persistent state directory");
    serveCmd->add_option("--console", consoleDir, "Static console bundle served under /console");
    serveCmd->add_option("--discovery-url", discoveryUrl, "Webhook receiving the discovery export");
    serveCmd->add_option("--discovery-debounce-ms", debounceMs, "Minimum interval between discovery pushes")->check(CLI::NonNegativeNumber);

    // job
    auto* jobCmd = app.add_subcommand("job", "Manage annotation jobs");
    jobCmd->require_subcommand(1);
    auto* jobCreate = jobCmd->add_subcommand("create", "Create a job and print its id");
    std::string jobKind;
    std::string jobDomain;
    std::string jobAttr;
    std::string jobQuery;
    std::optional<double> zThreshold;
    std::optional<std::size_t> flatlineWindow;
    std::optional<double> flatlineEpsilon;
    bool online = false;
    jobCreate->add_option("--kind", jobKind, "classification or anomaly")->required()->check(CLI::IsMember({"classification", "anomaly", "anomalyDetection"}));
    jobCreate->add_option("--domain", jobDomain, "Tag domain URN")->required();
    jobCreate->add_option("--attr", jobAttr, "Attribute to annotate")->required();
    jobCreate->add_option("--query", jobQuery, "Context query: idPattern=..&type=..&attrs=..&bbox=.. or JSON");
    jobCreate->add_option("--z-threshold", zThreshold, "Anomaly z-score threshold");
    jobCreate->add_option("--flatline-window", flatlineWindow, "Anomaly flatline window (0 disables)");
    jobCreate->add_option("--flatline-epsilon", flatlineEpsilon, "Anomaly flatline tolerance");
    jobCreate->add_flag("--online", online, "Update anomaly statistics with non-anomalous readings");

    std::int64_t jobId = 0;
    std::string samplesFile;
    auto* jobTrain = jobCmd->add_subcommand("train", "Train a job from a tag,value CSV");
    jobTrain->add_option("id", jobId, "Job id")->required();
    jobTrain->add_option("--samples", samplesFile, "CSV with header tag,value")->required();
    auto* jobStart = jobCmd->add_subcommand("start", "Start a trained job");
    jobStart->add_option("id", jobId, "Job id")->required();
    auto* jobStop = jobCmd->add_subcommand("stop", "Stop a running job");
    jobStop->add_option("id", jobId, "Job id")->required();
    auto* jobShow = jobCmd->add_subcommand("show", "Show one job");
    jobShow->add_option("id", jobId, "Job id")->required();
    auto* jobDelete = jobCmd->add_subcommand("delete", "Delete a job; its annotations are kept");
    jobDelete->add_option("id", jobId, "Job id")->required();
    auto* jobList = jobCmd->add_subcommand("list", "List jobs");

    // domain
    auto* domainCmd = app.add_subcommand("domain", "Manage tag domains");
    domainCmd->require_subcommand(1);
    std::string domainUrn;
    std::string domainName;
    std::string domainDescription;
    std::string domainTags;
    auto* domainCreate = domainCmd->add_subcommand("create", "Create a tag domain");
    domainCreate->add_option("urn", domainUrn, "urn:oc:tagDomain:<name>")->required();
    domainCreate->add_option("--tags", domainTags, "Comma-separated tag names");
    domainCreate->add_option("--name", domainName, "Display name");
    domainCreate->add_option("--description", domainDescription, "Description");
    auto* domainList = domainCmd->add_subcommand("list", "List tag domains");
    auto* domainShow = domainCmd->add_subcommand("show", "Show a tag domain");
    domainShow->add_option("urn", domainUrn, "Domain URN")->required();
    auto* domainDelete = domainCmd->add_subcommand("delete", "Delete an unreferenced tag domain");
    domainDelete->add_option("urn", domainUrn, "Domain URN")->required();
    auto* domainSuggest = domainCmd->add_subcommand("suggest", "Domain tags by usage");
    domainSuggest->add_option("urn", domainUrn, "Domain URN")->required();

    // data
    auto* dataCmd = app.add_subcommand("data", "Generate, replay and load datasets");
    dataCmd->require_subcommand(1);
    std::string cityConfig;
    std::string outDir;
    std::optional<std::uint64_t> seed;
    std::optional<int> days;
    std::vector<std::string> streams;
    auto* dataGenerate = dataCmd->add_subcommand("generate", "Write a synthetic city dataset");
    dataGenerate->add_option("--config", cityConfig, "City config JSON");
    dataGenerate->add_option("--out", outDir, "Output directory")->required();
    dataGenerate->add_option("--seed", seed, "Override the config seed");
    dataGenerate->add_option("--days", days, "Override the number of days");
    dataGenerate->add_option("--streams", streams, "Only write these streams")->delimiter(',');
    std::string replayDir;
    std::string speedText = "inf";
    auto* dataReplay = dataCmd->add_subcommand("replay", "Replay a dataset into the broker in timestamp order");
    dataReplay->add_option("--dir", replayDir, "Dataset directory")->required();
    dataReplay->add_option("--speed", speedText, "Time compression factor or inf");
    auto* dataLoad = dataCmd->add_subcommand("load", "Load dataset CSVs into the analytics history");
    dataLoad->add_option("--dir", replayDir, "Dataset directory")->required();

    // analyze
    auto* analyzeCmd = app.add_subcommand("analyze", "Analytics reports");
    analyzeCmd->require_subcommand(1);
    std::string assetA;
    std::string assetB;
    std::string fromText;
    std::string toText;
    int bucket = 600;
    bool perDay = false;
    auto* analyzePearson = analyzeCmd->add_subcommand("pearson", "Pearson correlation of two aligned series");
    analyzePearson->add_option("--a", assetA, "kind:id[/attr] or URN[/attr]")->required();
    analyzePearson->add_option("--b", assetB, "kind:id[/attr] or URN[/attr]")->required();
    analyzePearson->add_option("--bucket", bucket, "Alignment bucket in seconds")->check(CLI::PositiveNumber);
    analyzePearson->add_flag("--per-day", perDay, "One coefficient per UTC day");
    analyzePearson->add_option("--from", fromText, "Start instant (inclusive)");
    analyzePearson->add_option("--to", toText, "End instant (exclusive)");
    std::string weekday;
    auto* analyzeProfile = analyzeCmd->add_subcommand("profile", "Mean per hour of day");
    analyzeProfile->add_option("--asset", assetA, "kind:id[/attr] or URN[/attr]")->required();
    analyzeProfile->add_option("--weekday", weekday, "Weekday filter, e.g. SAT or MON,TUE");
    analyzeProfile->add_option("--from", fromText, "Start instant (inclusive)");
    analyzeProfile->add_option("--to", toText, "End instant (exclusive)");
    int maxGap = 3600;
    auto* analyzeGaps = analyzeCmd->add_subcommand("gaps", "Spans without data longer than --max-gap");
    analyzeGaps->add_option("--asset", assetA, "kind:id[/attr] or URN[/attr]")->required();
    analyzeGaps->add_option("--max-gap", maxGap, "Seconds")->check(CLI::PositiveNumber);
    analyzeGaps->add_option("--from", fromText, "Start instant (inclusive)");
    analyzeGaps->add_option("--to", toText, "End instant (exclusive)");
    std::string fromA, toA, fromB, toB;
    auto* analyzeSeasonal = analyzeCmd->add_subcommand("seasonal", "mean(period A) / mean(period B)");
    analyzeSeasonal->add_option("--asset", assetA, "kind:id[/attr] or URN[/attr]")->required();
    analyzeSeasonal->add_option("--from-a", fromA, "Period A start")->required();
    analyzeSeasonal->add_option("--to-a", toA, "Period A end")->required();
    analyzeSeasonal->add_option("--from-b", fromB, "Period B start")->required();
    analyzeSeasonal->add_option("--to-b", toB, "Period B end")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }

    try {
        const auto config = resolveConfig(urlFlag, outputFlag, configFile, verbosity);
        spdlog::set_level(config.verbosity >= 2   ? spdlog::level::debug
                          : config.verbosity == 1 ? spdlog::level::info
                          : serveCmd->parsed()    ? spdlog::level::info
                                                  : spdlog::level::warn);
        const Client client(config.serviceUrl);
        auto show = [&](const Json& value) { render(out, value, config.outputFormat); };
        auto jobPath = [&] { return "/jobs/" + std::to_string(jobId); };
        auto analyticsQuery = [&](const std::string& suffix, const AssetRef& ref) {
            std::string q = "asset" + suffix + "=" + encode(ref.urn);
            if (!ref.attribute.empty()) {
                q += "&attr" + suffix + "=" + encode(ref.attribute);
            }
            return q;
        };
        auto interval = [&] {
            std::string q;
            if (!fromText.empty()) {
                q += "&from=" + encode(fromText);
            }
            if (!toText.empty()) {
                q += "&to=" + encode(toText);
            }
            return q;
        };

        if (serveCmd->parsed()) {
            return serve(host, port, dataDir, consoleDir, discoveryUrl, debounceMs, out);
        }

        if (jobCreate->parsed()) {
            Json params = Json::object();
            if (zThreshold) {
                params["zThreshold"] = *zThreshold;
            }
            if (flatlineWindow) {
                params["flatlineWindow"] = *flatlineWindow;
            }
            if (flatlineEpsilon) {
                params["flatlineEpsilon"] = *flatlineEpsilon;
            }
            if (online) {
                params["onlineAdaptation"] = true;
            }
            const Json body{{"kind", jobKind},
                            {"tagDomain", jobDomain},
                            {"attribute", jobAttr},
                            {"query", queryFromText(jobQuery)},
                            {"executorParams", params}};
            const auto job = client.post("/jobs", body);
            if (config.outputFormat == OutputFormat::Json) {
                show(job);
            } else {
                out << job.at("id").get<std::int64_t>() << '\n';
            }
        } else if (jobTrain->parsed()) {
            show(client.post(jobPath() + "/train", samplesFromCsv(samplesFile)));
        } else if (jobStart->parsed()) {
            show(client.post(jobPath() + "/start", Json::object()));
        } else if (jobStop->parsed()) {
            show(client.post(jobPath() + "/stop", Json::object()));
        } else if (jobShow->parsed()) {
            show(client.get(jobPath()));
        } else if (jobDelete->parsed()) {
            client.del(jobPath());
        } else if (jobList->parsed()) {
            show(client.get("/jobs"));
        } else if (domainCreate->parsed()) {
            Json body{{"urn", domainUrn}, {"description", domainDescription}, {"tags", Json::array()}};
            if (!domainName.empty()) {
                body["name"] = domainName;
            }
            for (const auto& tag : split(domainTags, ',')) {
                if (!trim(tag).empty()) {
                    body["tags"].push_back(std::string(trim(tag)));
                }
            }
            show(client.post("/warehouse/tagDomains", body));
        } else if (domainList->parsed()) {
            show(client.get("/warehouse/tagDomains"));
        } else if (domainShow->parsed()) {
            show(client.get("/warehouse/tagDomains/" + encode(domainUrn)));
        } else if (domainDelete->parsed()) {
            client.del("/warehouse/tagDomains/" + encode(domainUrn));
        } else if (domainSuggest->parsed()) {
            show(client.get("/warehouse/tagDomains/" + encode(domainUrn) + "/suggestions"));
        } else if (dataGenerate->parsed()) {
            auto city = cityConfig.empty() ? simulator::CityConfig{} : simulator::CityConfig::fromJson(readJsonFile(cityConfig));
            if (seed) {
                city.seed = *seed;
            }
            if (days) {
                city.days = *days;
            }
            city.validate();
            auto dataset = simulator::generate(city);
            if (!streams.empty()) {
                std::set<simulator::StreamId> keep;
                for (const auto& name : streams) {
                    keep.insert(simulator::streamFromString(name));
                }
                std::erase_if(dataset.streams, [&keep](const auto& entry) { return !keep.contains(entry.first); });
            }
            try {
                simulator::writeDataset(dataset, outDir);
            } catch (const std::exception& e) {
                throw CliError(kIo, e.what());
            }
            Json summary = Json::array();
            for (const auto& [stream, rows] : dataset.streams) {
                summary.push_back(Json{{"stream", std::string(simulator::toString(stream))}, {"rows", rows.size()}});
            }
            show(summary);
        } else if (dataReplay->parsed()) {
            const auto files = simulator::datasetFiles(replayDir);
            if (files.empty()) {
                throw CliError(kIo, "no CSV files in " + replayDir);
            }
            auto sink = simulator::makeBrokerSink(config.serviceUrl);
            const auto report = simulator::replay(files, *sink, simulator::ReplayOptions{parseSpeed(speedText)});
            show(Json{{"sent", report.sent}, {"skipped", report.skipped}, {"errors", report.errors}, {"aborted", report.aborted}});
            if (report.aborted) {
                throw CliError(kRemote, "replay aborted: " + report.message);
            }
        } else if (dataLoad->parsed()) {
            const auto files = simulator::datasetFiles(replayDir);
            if (files.empty()) {
                throw CliError(kIo, "no CSV files in " + replayDir);
            }
            Json summary = Json::array();
            for (const auto& file : files) {
                auto result = client.postText("/analytics/series", readFile(file), "text/csv");
                result["file"] = file.filename().string();
                summary.push_back(result);
            }
            show(summary);
        } else if (analyzePearson->parsed()) {
            const auto a = parseAssetRef(assetA);
            const auto b = parseAssetRef(assetB);
            show(client.get("/analytics/pearson?" + analyticsQuery("A", a) + "&" + analyticsQuery("B", b) +
                            "&bucket=" + std::to_string(bucket) + "&perDay=" + (perDay ? "true" : "false") + interval()));
        } else if (analyzeProfile->parsed()) {
            std::string q = "/analytics/profile?" + analyticsQuery("", parseAssetRef(assetA)) + interval();
            if (!weekday.empty()) {
                q += "&weekday=" + encode(weekday);
            }
            show(client.get(q));
        } else if (analyzeGaps->parsed()) {
            show(client.get("/analytics/gaps?" + analyticsQuery("", parseAssetRef(assetA)) + "&maxGap=" + std::to_string(maxGap) +
                            interval()));
        } else if (analyzeSeasonal->parsed()) {
            const auto ref = parseAssetRef(assetA);
            show(client.get("/analytics/seasonal?" + analyticsQuery("", ref) + "&fromA=" + encode(fromA) + "&toA=" + encode(toA) +
                            "&fromB=" + encode(fromB) + "&toB=" + encode(toB)));
        }
        return kOk;
    } catch (const CliError& e) {
        err << "error: " << e.what() << "\n";
        return e.code();
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::Unavailable ? kIo : kUsage;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
}

}// namespace cityforge::cli
