#include "horolab/lab/output.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "horolab/lab/config.hpp"

namespace horolab::lab {

namespace {

bool is_pass_column(const std::string& name) {
  return name == "pass" || (name.size() > 5 && name.ends_with("_pass"));
}

std::string format_cell(const Cell& cell) {
  struct Visitor {
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_real(v); }
    std::string operator()(const std::string& v) const {
      if (v.find_first_of(",\"\n") == std::string::npos) return v;
      std::string quoted = "\"";
      for (char c : v) {
        if (c == '"') quoted += '"';
        quoted += c;
      }
      return quoted + "\"";
    }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
  };
  return std::visit(Visitor{}, cell);
}

nlohmann::json cell_json(const Cell& cell) {
  struct Visitor {
    nlohmann::json operator()(std::int64_t v) const { return v; }
    nlohmann::json operator()(double v) const {
      // JSON has no non-finite numbers; mirror the CSV spelling.
      if (!std::isfinite(v)) return format_real(v);
      return v;
    }
    nlohmann::json operator()(const std::string& v) const { return v; }
    nlohmann::json operator()(bool v) const { return v; }
  };
  return std::visit(Visitor{}, cell);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf.data();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << bytes;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw std::logic_error("table " + name + ": row width " + std::to_string(row.size()) +
                           " != " + std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

bool Table::all_pass() const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (!is_pass_column(columns[c])) continue;
    for (const auto& row : rows) {
      const bool* flag = std::get_if<bool>(&row[c]);
      if (flag == nullptr || !*flag) return false;
    }
  }
  return true;
}

Table& ExperimentResult::table(const std::string& name, std::vector<std::string> columns) {
  tables.push_back(Table{name, std::move(columns), {}});
  return tables.back();
}

bool ExperimentResult::pass() const {
  if (partial) return false;
  for (const auto& t : tables) {
    if (!t.all_pass()) return false;
  }
  return true;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  std::array<char, 17> buf{};
  std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(value));
  return buf.data();
}

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "missing";
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return hex64(fnv1a(bytes));
}

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw std::logic_error("format_real: to_chars failed");
  return std::string(buf.data(), ptr);
}

std::string to_csv(const Table& table, const std::string& config_hash) {
  std::string out = "config_hash";
  for (const auto& c : table.columns) out += "," + c;
  out += "\n";
  for (const auto& row : table.rows) {
    out += config_hash;
    for (const auto& cell : row) out += "," + format_cell(cell);
    out += "\n";
  }
  return out;
}

nlohmann::json to_json(const Table& table, const std::string& config_hash) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json obj = nlohmann::json::object();
    obj["config_hash"] = config_hash;
    for (std::size_t c = 0; c < row.size(); ++c) obj[table.columns[c]] = cell_json(row[c]);
    rows.push_back(std::move(obj));
  }
  return {{"table", table.name}, {"columns", table.columns}, {"rows", std::move(rows)}};
}

WrittenOutput write_result(const ExperimentResult& result, const ExperimentConfig& config,
                           const std::filesystem::path& calibration_path) {
  std::filesystem::create_directories(config.out_dir);
  const std::string hash = config.hash();
  WrittenOutput written;
  nlohmann::json files = nlohmann::json::array();
  for (const auto& table : result.tables) {
    const std::string stem = config.id + "_" + table.name;
    const auto csv = config.out_dir / (stem + ".csv");
    const auto json = config.out_dir / (stem + ".json");
    write_file(csv, to_csv(table, hash));
    write_file(json, to_json(table, hash).dump(2) + "\n");
    written.files.push_back(csv);
    written.files.push_back(json);
    files.push_back(csv.filename().string());
    files.push_back(json.filename().string());
  }
  nlohmann::json manifest = {
      {"experiment", config.id},
      {"seed", config.seed},
      {"parameters", config.params},
      {"config_hash", hash},
      {"calibration_file", calibration_path.string()},
      {"calibration_hash", file_hash(calibration_path)},
      {"timestamp", utc_timestamp()},
      {"wall_seconds", result.wall_seconds},
      {"pass", result.pass()},
      {"partial", result.partial},
      {"messages", result.messages},
      {"files", files},
  };
  written.manifest = config.out_dir / (config.id + "_manifest.json");
  write_file(written.manifest, manifest.dump(2) + "\n");
  return written;
}

}  // namespace horolab::lab
