#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace horolab::lab {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ParamType { integer, real, integer_list, real_list, text };

struct ParamSpec {
  std::string key;
  ParamType type = ParamType::real;
  std::string default_value;
};

using ParamMap = std::map<std::string, std::string>;

// Experiment ids accepted by the runner, in a fixed order.
const std::vector<std::string>& experiment_ids();

// Declared parameters of an experiment; throws ConfigError for unknown ids.
const std::vector<ParamSpec>& experiment_schema(const std::string& id);

// Invariant: params holds exactly the declared keys, each value parses as
// its declared type.
struct ExperimentConfig {
  std::string id;
  ParamMap params;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "out";
  int jobs = 1;

  std::int64_t get_int(const std::string& key) const;
  double get_real(const std::string& key) const;
  std::vector<std::int64_t> get_int_list(const std::string& key) const;
  std::vector<double> get_real_list(const std::string& key) const;
  const std::string& get_text(const std::string& key) const;

  // id, seed and the sorted parameters; output directory and jobs excluded.
  std::string canonical() const;
  // FNV-1a of canonical(), 16 hex digits.
  std::string hash() const;
};

// Flat key=value text: '#' starts a comment, blank lines ignored, keys unique.
ParamMap parse_key_value(std::string_view text);
ParamMap read_key_value_file(const std::filesystem::path& path);

// Fills defaults, rejects unknown keys and unparseable values.
ExperimentConfig make_config(const std::string& id, const ParamMap& overrides,
                             std::uint64_t seed, std::filesystem::path out_dir = "out",
                             int jobs = 1);

// Locale-independent numeric parsing of the whole string.
double parse_real(std::string_view text);
std::int64_t parse_int(std::string_view text);
std::vector<double> parse_real_list(std::string_view text);
std::vector<std::int64_t> parse_int_list(std::string_view text);

}  // namespace horolab::lab
