#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace cgate::cli {

inline constexpr const char* tool_version = "1.0.0";
inline constexpr int schema_version = 1;

/// Output-directory or file problem; maps to exit code 4.
class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunManifest {
    std::string command;
    std::string config_hash;
    std::string version = tool_version;
    std::string timestamp;
    std::vector<std::string> outputs;
};

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline nlohmann::json to_json(const RunManifest& m) {
    return {{"schema_version", schema_version}, {"command", m.command},   {"config_hash", m.config_hash},
            {"version", m.version},             {"timestamp", m.timestamp}, {"outputs", m.outputs}};
}

inline std::filesystem::path prepare_output_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw OutputError("cannot create output directory '" + dir + "'");
    return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw OutputError("cannot write '" + path.string() + "'");
    out << content;
    out.close();
    if (!out) throw OutputError("failed writing '" + path.string() + "'");
}

inline void write_manifest(const std::filesystem::path& dir, RunManifest m) {
    if (m.timestamp.empty()) m.timestamp = utc_timestamp();
    write_file(dir / "manifest.json", to_json(m).dump(2) + "\n");
}

} // namespace cgate::cli
