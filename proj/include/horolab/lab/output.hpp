#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace horolab::lab {

struct ExperimentConfig;

using Cell = std::variant<std::int64_t, double, std::string, bool>;

// Columns named "pass" or ending in "_pass" are pass/fail columns.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  // Throws std::logic_error on a width mismatch.
  void add_row(std::vector<Cell> row);
  bool all_pass() const;
};

struct ExperimentResult {
  std::string id;
  std::deque<Table> tables;  // deque keeps references from table() valid
  std::vector<std::string> messages;
  bool partial = false;  // a resource or precision limit cut the run short
  double wall_seconds = 0.0;

  Table& table(const std::string& name, std::vector<std::string> columns);
  // All pass/fail cells pass and the run completed.
  bool pass() const;
};

std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t value);
// FNV-1a of the file bytes; "missing" if the file cannot be read.
std::string file_hash(const std::filesystem::path& path);

// Shortest round-trip decimal, '.' separator; nan / inf / -inf spelled out.
std::string format_real(double value);

// Header row then one line per row, LF endings, config hash as first column.
std::string to_csv(const Table& table, const std::string& config_hash);
nlohmann::json to_json(const Table& table, const std::string& config_hash);

struct WrittenOutput {
  std::vector<std::filesystem::path> files;
  std::filesystem::path manifest;
};

// Writes <id>_<table>.csv/.json per table plus <id>_manifest.json.
WrittenOutput write_result(const ExperimentResult& result, const ExperimentConfig& config,
                           const std::filesystem::path& calibration_path);

}  // namespace horolab::lab
