#pragma once

// Artifact writers: CSV decay tables, SVG log-scale line plots and JSON
// documents, all written through a temporary file and an atomic rename.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "stf/diagnostics.hpp"

namespace stf::cli {

/// Shortest round-trip decimal rendering.
std::string format_double(double x);
/// RFC 4180 quoting when needed.
std::string csv_field(const std::string& s);

/// Writes `content` to `path` via path.tmp and rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

/// Columns n, value, exact_p_over_q, verdict, plus se for Monte Carlo tables.
std::string decay_csv(const DecayTable& table);
/// value against n on a log-scale y axis. Non-positive values are omitted.
std::string decay_svg(const std::string& title, const DecayTable& table);

nlohmann::json decay_json(const DecayTable& table);

}  // namespace stf::cli
