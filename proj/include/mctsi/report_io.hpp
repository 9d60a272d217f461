#ifndef MCTSI_REPORT_IO_HPP
#define MCTSI_REPORT_IO_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace mctsi {

inline constexpr const char* kToolVersion = "1.0.0";

// Shortest fixed-width rendering that round-trips a double ("%.17g").
std::string format_double(double v);

std::uint64_t fnv1a64(std::string_view s);

// Hash of the canonical (key-sorted) dump; stable under key reordering in
// the source document.
std::uint64_t config_hash(const nlohmann::json& config);

// Comma-separated, header row first, LF line endings, no quoting (fields
// must not contain commas, quotes, or newlines).
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

struct RunManifest {
    std::string version = kToolVersion;
    std::string command;
    std::uint64_t config_hash = 0;
    std::uint64_t master_seed = 0;
    std::string timestamp;  // ISO-8601 UTC, filled by write_manifest when empty
    std::vector<std::string> outputs;
    nlohmann::json extra;  // optional free-form notes
};

std::string iso8601_utc_now();
void write_manifest(const std::string& path, const RunManifest& manifest);

}  // namespace mctsi

#endif
