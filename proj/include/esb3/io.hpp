#pragma once

// Text ingestion and JSON emission for the command-line tool.

#include "esb3/esbiii.hpp"

#include <json.hpp>

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace esb3 {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kSchemaVersion = "1.0";
inline constexpr std::string_view kToolVersion = "0.1.0";

struct ReadOptions {
    std::size_t column = 1;     // 1-based
    std::size_t skip_rows = 0;  // physical lines dropped before parsing
};

/// Locale-independent decimal parse of a whole field (surrounding blanks
/// allowed). Throws InputError tagged with `line`.
double parse_number(std::string_view field, std::size_t line = 0);

/// One value per line, or delimited columns (comma, tab, semicolon or runs of
/// spaces) with `opts.column` selecting the field. Blank lines and lines
/// starting with '#' are skipped. Throws InputError naming the line.
std::vector<double> read_values(std::istream& in, const ReadOptions& opts = {});
std::vector<double> read_values_file(const std::string& path, const ReadOptions& opts = {});

/// "%.17g"; non-finite values are not representable in JSON and must be
/// handled by the caller.
std::string format_number(double x);

/// Serializes with every floating value printed by format_number;
/// non-finite floats become null.
std::string dump_json(const Json& j, int indent = 2);

Json params_json(const Params& p);
Params params_from_json(const Json& j);

struct RunManifest {
    std::string command;
    Json config = Json::object();
    std::optional<std::uint64_t> seed;
    std::optional<std::string> timestamp;
};

/// Conventions every output records.
std::vector<std::string> recorded_decisions();

Json manifest_json(const RunManifest& m);

} // namespace esb3
