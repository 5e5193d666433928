#pragma once

// Artifact writers: CSV series (9 significant digits), JSON documents,
// log-scale SVG plots and binary state checkpoints.

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "penudge/dynamics.hpp"

namespace penudge::cli {

using Json = nlohmann::ordered_json;

std::string format_csv_number(double x);

struct Column {
  std::string name;
  std::span<const double> values;
};

/// One row per index; all columns must have equal length.
void write_csv(const std::filesystem::path& path, const std::vector<Column>& columns);

/// Text rows, already formatted.
void write_csv_rows(const std::filesystem::path& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows);

void write_json(const std::filesystem::path& path, const Json& doc);

/// Polylines of log10(series) against t.
void write_svg(const std::filesystem::path& path, const std::string& title,
               std::span<const double> times, const std::vector<Column>& series);

/// Raw little-endian dump: magic, grid, time, v1, v2.
void write_checkpoint(const std::filesystem::path& path, const StateSnapshot& s);
StateSnapshot read_checkpoint(const std::filesystem::path& path);

}  // namespace penudge::cli
