#include "horolab/lab/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "horolab/lab/output.hpp"

namespace horolab::lab {

namespace {

using enum ParamType;

const std::map<std::string, std::vector<ParamSpec>>& registry() {
  static const std::map<std::string, std::vector<ParamSpec>> table = {
      {"tau",
       {{"n_max", integer, "20"},
        {"rel_tol", real, "1e-6"},
        {"shift_periods", integer_list, "2,3,5"},
        {"shift_fraction", real, "0.37"},
        {"shift_tol", real, "1e-8"}}},
      {"good-bound",
       {{"j_max", integer, "9"},
        {"slope_max", real, "5.883"},
        {"normalized_slope_max", real, "0.8833333333333333"}}},
      {"scaling",
       {{"points", integer, "5"},
        {"lambda", real, "1"},
        {"horizons", real_list, "128,256,512,1024,2048,4096"},
        {"slope_max", real, "0.9333333333333333"}}},
      {"utau",
       {{"nus", real_list, "0.25,0.5,0.75"},
        {"taus", real_list, "1,8,64"},
        {"bumps", integer, "20"},
        {"lambda", real, "1"},
        {"principal_nu", real, "0.5"},
        {"bound_slack", real, "1e-3"},
        {"isometry_tol", real, "1e-9"}}},
      {"coeqn",
       {{"scales", real_list, "1,10,100"},
        {"lambda_ms", real_list, "0.1,1,10"},
        {"orders", integer_list, "2,4"},
        {"principal_nu", real, "0.5"},
        {"spread_max", real, "10"},
        {"residual_tol", real, "1e-12"},
        {"map_period", real, "1"}}},
      {"returns",
       {{"points", integer, "20"},
        {"scale", real, "1"},
        {"horizons", real_list, "10,30"},
        {"width_points", integer, "3"},
        {"width_scales", real_list, "1,2,4"},
        {"width_horizons", real_list, "10,20,40"},
        {"width_spread_max", real, "10"}}},
      {"sparse",
       {{"points", integer, "5"},
        {"delta", real, "0.05"},
        {"n_small", integer, "1000"},
        {"n_large", integer, "100000"},
        {"decay_ratio", real, "0.5"},
        {"decay_floor", real, "0.05"},
        {"sup_samples", integer, "10000"},
        {"eps", real, "0.02"},
        {"map_points", integer, "5"},
        {"map_step", real, "1"},
        {"map_log2_min", integer, "7"},
        {"map_log2_max", integer, "13"},
        {"map_slope_max", real, "0.9333333333333333"}}},
      {"loglaw",
       {{"points", integer, "50"},
        {"horizons", real_list, "1000,10000,100000"},
        {"step", real, "0.05"},
        {"band_horizon", real, "10000"},
        {"band_lo", real, "0.3"},
        {"band_hi", real, "1.0"},
        {"growth_tol", real, "0.1"}}},
      {"calibrate",
       {{"box_points", integer, "20"},
        {"thick_height", real, "1"},
        {"u_samples", integer, "256"},
        {"return_points", integer, "40"},
        {"scale", real, "1"},
        {"horizons", real_list, "10,30"},
        {"date", text, ""},
        {"commit", text, ""},
        {"output", text, ""}}},
  };
  return table;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view text, const char* what) {
  const std::string_view s = trim(text);
  T value{};
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (!s.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (s.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError(std::string("cannot parse ") + what + ": '" + std::string(text) + "'");
  }
  return value;
}

template <class T>
std::vector<T> parse_list(std::string_view text, const char* what) {
  std::vector<T> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = text.find(',', pos);
    out.push_back(parse_number<T>(text.substr(pos, comma - pos), what));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

void validate_value(const ParamSpec& spec, const std::string& value) {
  switch (spec.type) {
    case integer: parse_int(value); break;
    case real: parse_real(value); break;
    case integer_list: parse_int_list(value); break;
    case real_list: parse_real_list(value); break;
    case text: break;
  }
}

}  // namespace

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids = {"tau",    "good-bound", "scaling", "sparse",
                                               "returns", "coeqn",     "loglaw",  "utau",
                                               "calibrate"};
  return ids;
}

const std::vector<ParamSpec>& experiment_schema(const std::string& id) {
  const auto it = registry().find(id);
  if (it == registry().end()) throw ConfigError("unknown experiment id '" + id + "'");
  return it->second;
}

double parse_real(std::string_view text) { return parse_number<double>(text, "real"); }
std::int64_t parse_int(std::string_view text) {
  return parse_number<std::int64_t>(text, "integer");
}
std::vector<double> parse_real_list(std::string_view text) {
  return parse_list<double>(text, "real list");
}
std::vector<std::int64_t> parse_int_list(std::string_view text) {
  return parse_list<std::int64_t>(text, "integer list");
}

ParamMap parse_key_value(std::string_view text) {
  ParamMap out;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    ++line_no;
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (!out.emplace(key, std::string(trim(line.substr(eq + 1)))).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return out;
}

ParamMap read_key_value_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_key_value(buf.str());
}

ExperimentConfig make_config(const std::string& id, const ParamMap& overrides, std::uint64_t seed,
                             std::filesystem::path out_dir, int jobs) {
  const auto& schema = experiment_schema(id);
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  ExperimentConfig cfg;
  cfg.id = id;
  cfg.seed = seed;
  cfg.out_dir = std::move(out_dir);
  cfg.jobs = jobs;
  for (const auto& spec : schema) cfg.params[spec.key] = spec.default_value;
  for (const auto& [key, value] : overrides) {
    const auto it = std::find_if(schema.begin(), schema.end(),
                                 [&](const ParamSpec& s) { return s.key == key; });
    if (it == schema.end()) throw ConfigError("unknown key '" + key + "' for experiment " + id);
    cfg.params[key] = value;
  }
  for (const auto& spec : schema) {
    try {
      validate_value(spec, cfg.params[spec.key]);
    } catch (const ConfigError& e) {
      throw ConfigError(spec.key + ": " + e.what());
    }
  }
  return cfg;
}

std::int64_t ExperimentConfig::get_int(const std::string& key) const {
  return parse_int(get_text(key));
}
double ExperimentConfig::get_real(const std::string& key) const {
  return parse_real(get_text(key));
}
std::vector<std::int64_t> ExperimentConfig::get_int_list(const std::string& key) const {
  return parse_int_list(get_text(key));
}
std::vector<double> ExperimentConfig::get_real_list(const std::string& key) const {
  return parse_real_list(get_text(key));
}
const std::string& ExperimentConfig::get_text(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) throw ConfigError("missing parameter '" + key + "'");
  return it->second;
}

std::string ExperimentConfig::canonical() const {
  std::string out = "id=" + id + "\nseed=" + std::to_string(seed) + "\n";
  for (const auto& [key, value] : params) out += key + "=" + value + "\n";
  return out;
}

std::string ExperimentConfig::hash() const { return hex64(fnv1a(canonical())); }

}  // namespace horolab::lab
