#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace conlearn::cli {

using Json = nlohmann::json;

inline constexpr int schema_version = 1;

/// A table cell: empty, integer, real, boolean or text.
using Cell = std::variant<std::monostate, long long, double, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

/// %.12g, with "nan"/"inf"/"-inf" spelled out.
std::string format_real(double x);
std::string format_cell(const Cell& cell);

/// RFC 4180 quoting where needed, LF line endings.
void write_csv(std::ostream& out, const Table& table);
Json table_rows_json(const Table& table);

struct RunManifest {
  std::string command;
  std::string config_hash; ///< SHA-256 of the canonical resolved config
  std::uint64_t root_seed = 0;
  std::string tool_version;
  std::string started;
  std::string finished;
  Json config; ///< resolved config

  Json to_json() const;
};

std::string sha256_hex(const std::string& data);
std::string utc_timestamp(std::chrono::system_clock::time_point t);

/// {manifest, schema_version, rows} with the given rows array.
Json document(const RunManifest& manifest, Json rows);

} // namespace conlearn::cli
