#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace csl::app {

using nlohmann::json;

enum ExitCode : int {
    kOk = 0,
    kUsage = 2,
    kScenario = 3,
    kData = 4,
    kDomain = 5,
    kEstimation = 6,
    kOutput = 7,
};

constexpr const char* kScenarioVersion = "csl-scenario/1";
constexpr const char* kReportVersion = "csl-report/1";

struct Scenario {
    std::string version = kScenarioVersion;
    std::optional<std::uint64_t> seed;
    json sections = json::object();
};

// Unknown keys anywhere are rejected with a config error.
Scenario parse_scenario(const json& j);
Scenario load_scenario(const std::string& path);

const std::vector<std::string>& commands();

struct Request {
    std::string command;
    std::optional<std::string> scenario_path;
    std::optional<Scenario> scenario;  // takes precedence over scenario_path
    std::vector<std::string> data_paths;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;  // overrides the scenario seed
    std::string format = "json";
};

struct Artifact {
    std::string name;
    std::string contents;
};

struct Outcome {
    json report;
    std::vector<Artifact> artifacts;  // includes report.json
};

// Runs a command fully in memory. Throws csl::Error on failure.
Outcome execute(const Request& request);

// execute + atomic writes into out_dir. Nothing is written on failure.
// Returns the process exit code; diagnostics go to err, the summary to out.
int run(const Request& request, std::ostream& out, std::ostream& err);

// Flattened "path,value" rows for --format csv.
std::string flatten_csv(const json& j);

} // namespace csl::app
