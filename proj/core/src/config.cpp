#include "lmlab/config.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace lmlab {

namespace {

const std::vector<std::string> kCommands = {"sieve",      "pattern",  "pairs",
                                            "interval",   "rundensity", "graph",
                                            "ensemble",   "triples",  "report"};

bool known_command(const std::string& c) {
    for (auto& k : kCommands)
        if (k == c) return true;
    return false;
}

}  // namespace

json serialize_config(const ExperimentConfig& config) {
    json j;
    j["command"] = config.command;
    if (config.seed) j["seed"] = *config.seed;
    j["threads"] = config.threads;
    j["out"] = config.out;
    j["format"] = config.format;
    j["params"] = config.params;
    return j;
}

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) throw config_error("", "config must be a JSON object");
    ExperimentConfig c;
    if (!j.contains("command") || !j["command"].is_string())
        throw config_error("command", "required string");
    c.command = j["command"].get<std::string>();
    if (!known_command(c.command)) throw config_error("command", "unknown command '" + c.command + "'");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw config_error("seed", "must be a 64-bit unsigned integer");
        c.seed = j["seed"].get<u64>();
    }
    if (j.contains("threads")) {
        if (!j["threads"].is_number_unsigned() || j["threads"].get<u64>() < 1 ||
            j["threads"].get<u64>() > 4096)
            throw config_error("threads", "must be an integer in [1, 4096]");
        c.threads = static_cast<unsigned>(j["threads"].get<u64>());
    }
    if (j.contains("out")) {
        if (!j["out"].is_string()) throw config_error("out", "must be a string");
        c.out = j["out"].get<std::string>();
    }
    if (j.contains("format")) {
        if (!j["format"].is_string()) throw config_error("format", "must be a string");
        c.format = j["format"].get<std::string>();
        if (c.format != "json" && c.format != "jsonl" && c.format != "csv" &&
            c.format != "edgelist" && c.format != "text")
            throw config_error("format", "expected json|jsonl|csv|edgelist|text");
    }
    if (j.contains("params")) {
        if (!j["params"].is_object()) throw config_error("params", "must be an object");
        c.params = j["params"];
    }
    const bool stochastic = c.command == "graph" || c.command == "ensemble";
    if (stochastic && !c.seed) throw config_error("seed", "required for stochastic commands");
    return c;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("(file)", "cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw config_error("(file)", std::string("JSON parse failure: ") + e.what());
    }
    return parse_config(j);
}

void atomic_write_file(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    std::random_device rd;
    fs::path tmp = target;
    tmp += ".tmp-" + std::to_string(rd());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open temp file: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            out.close();
            fs::remove(tmp);
            throw std::runtime_error("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("rename failed: " + ec.message());
    }
}

json RunManifest::to_json() const {
    json j;
    j["config"] = config_echo;
    j["version"] = version;
    j["wall_ms"] = wall_ms;
    json t = json::object();
    for (auto& [name, ms] : timings_ms) t[name] = ms;
    j["timings_ms"] = t;
    json c = json::object();
    for (auto& [path, sum] : cache_checksums) c[path] = sum;
    j["cache_checksums"] = c;
    return j;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

}  // namespace

std::string density_scales_to_csv(const json& scales) {
    std::string out = "window_lo,window_hi,matches,total,frequency,log_frequency\n";
    for (const auto& s : scales) {
        out += std::to_string(s.at("window_lo").get<u64>()) + ",";
        out += std::to_string(s.at("window_hi").get<u64>()) + ",";
        out += std::to_string(s.at("matches").get<u64>()) + ",";
        out += std::to_string(s.at("total").get<u64>()) + ",";
        out += fmt_double(s.at("frequency").get<double>()) + ",";
        out += fmt_double(s.at("log_frequency").get<double>()) + "\n";
    }
    return out;
}

json density_scales_from_csv(const std::string& csv) {
    std::stringstream ss(csv);
    std::string line;
    if (!std::getline(ss, line)) throw std::runtime_error("csv: empty");
    json scales = json::array();
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != 6) throw std::runtime_error("csv: expected 6 columns");
        json s;
        s["window_lo"] = static_cast<u64>(std::stoull(cells[0]));
        s["window_hi"] = static_cast<u64>(std::stoull(cells[1]));
        s["matches"] = static_cast<u64>(std::stoull(cells[2]));
        s["total"] = static_cast<u64>(std::stoull(cells[3]));
        s["frequency"] = std::stod(cells[4]);
        s["log_frequency"] = std::stod(cells[5]);
        scales.push_back(s);
    }
    return scales;
}

std::string pair_table_to_csv(const json& pairs_result) {
    std::string out = "mu_n,mu_n_plus_1,count,frequency\n";
    for (const auto& row : pairs_result.at("table")) {
        out += std::to_string(row.at("a").get<int>()) + ",";
        out += std::to_string(row.at("b").get<int>()) + ",";
        out += std::to_string(row.at("count").get<u64>()) + ",";
        out += fmt_double(row.at("frequency").get<double>()) + "\n";
    }
    return out;
}

json pair_table_from_csv(const std::string& csv) {
    std::stringstream ss(csv);
    std::string line;
    if (!std::getline(ss, line)) throw std::runtime_error("csv: empty");
    json table = json::array();
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != 4) throw std::runtime_error("csv: expected 4 columns");
        json row;
        row["a"] = std::stoi(cells[0]);
        row["b"] = std::stoi(cells[1]);
        row["count"] = static_cast<u64>(std::stoull(cells[2]));
        row["frequency"] = std::stod(cells[3]);
        table.push_back(row);
    }
    return table;
}

}  // namespace lmlab
