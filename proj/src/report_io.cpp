#include "mctsi/report_io.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>

#include "mctsi/errors.hpp"

namespace mctsi {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t config_hash(const nlohmann::json& config) {
    return fnv1a64(config.dump());
}

namespace {

void check_field(const std::string& f) {
    if (f.find_first_of(",\"\n\r") != std::string::npos) {
        throw InternalConsistencyError("csv field contains a delimiter: " + f);
    }
}

void write_row(std::ofstream& out, const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        check_field(row[i]);
        if (i) out << ',';
        out << row[i];
    }
    out << '\n';
}

}  // namespace

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    write_row(out, header);
    for (const auto& row : rows) {
        if (row.size() != header.size()) {
            throw InternalConsistencyError("csv row width does not match the header");
        }
        write_row(out, row);
    }
    out.flush();
    if (!out) throw IoError("write failed for " + path);
}

std::string iso8601_utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
    nlohmann::json j;
    j["version"] = manifest.version;
    j["command"] = manifest.command;
    j["config_hash"] = manifest.config_hash;
    j["master_seed"] = manifest.master_seed;
    j["timestamp"] = manifest.timestamp.empty() ? iso8601_utc_now() : manifest.timestamp;
    j["outputs"] = manifest.outputs;
    if (!manifest.extra.is_null()) j["notes"] = manifest.extra;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace mctsi
