#pragma once

// Experiment configuration, result serialization, and the reproducibility
// layer.  A config is one JSON object; CLI flags are folded into the same
// object before validation so there is a single parse path.  Result files are
// written atomically (temp file + rename) and never left partial.

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "lmlab/common.hpp"

namespace lmlab {

using json = nlohmann::json;

inline constexpr const char* kArtifactVersion = "0.1.0";

// Exit codes shared by the CLI and the runner.
enum ExitCode : int {
    kExitOk = 0,
    kExitRuntime = 1,
    kExitConfig = 2,
    kExitCheckFailed = 3,
};

struct config_error : std::runtime_error {
    std::string field;
    config_error(std::string field_, const std::string& message)
        : std::runtime_error("config error at '" + field_ + "': " + message),
          field(std::move(field_)) {}
};

struct ExperimentConfig {
    std::string command;
    std::optional<u64> seed;
    unsigned threads = 1;
    std::string out;              // empty: write result to stdout
    std::string format = "json";  // json | jsonl | csv | edgelist | text
    json params = json::object();

    bool operator==(const ExperimentConfig&) const = default;
};

json serialize_config(const ExperimentConfig& config);
ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config_file(const std::string& path);

// Writes content to path via a temp file in the same directory followed by a
// rename; on any failure the temp file is removed and the target untouched.
void atomic_write_file(const std::string& path, const std::string& content);

struct RunManifest {
    json config_echo;
    std::string version = kArtifactVersion;
    double wall_ms = 0.0;
    std::vector<std::pair<std::string, double>> timings_ms;
    std::vector<std::pair<std::string, std::string>> cache_checksums;  // path -> fnv64 hex

    json to_json() const;
};

// CSV projections of the tabular result payloads, with exact decode back.
std::string density_scales_to_csv(const json& scales);
json density_scales_from_csv(const std::string& csv);
std::string pair_table_to_csv(const json& pairs_result);
json pair_table_from_csv(const std::string& csv);

}  // namespace lmlab
