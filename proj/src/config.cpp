#include "eduaffect/config.hpp"

#include <fstream>
#include <sstream>

#include "eduaffect/errors.hpp"

namespace eduaffect {

namespace {

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    return std::stoi(value);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' wants an integer, got '" + value + "'");
  }
}

}  // namespace

RunConfig RunConfig::defaults() {
  RunConfig config;
  config.providers["default"] = ProviderConfig{};
  return config;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());

  RunConfig config = defaults();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + " is not key = value");
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));

    if (key == "default_model") {
      config.default_model = value;
    } else if (key == "default_provider") {
      config.default_provider = value;
    } else if (key == "judge_model") {
      config.judge_model = value;
    } else if (key == "cache_dir") {
      config.cache_dir = value;
    } else if (key == "workers") {
      config.workers = parse_int(key, value);
    } else if (key == "taxonomy") {
      config.taxonomy.labels.clear();
      std::istringstream labels(value);
      std::string label;
      while (std::getline(labels, label, ',')) {
        label = trim(label);
        if (!label.empty()) config.taxonomy.labels.push_back(label);
      }
    } else if (key.rfind("provider.", 0) == 0) {
      auto rest = key.substr(9);
      auto dot = rest.find('.');
      if (dot == std::string::npos)
        throw ConfigError("bad provider key '" + key + "' (want provider.<name>.<field>)");
      std::string name = rest.substr(0, dot);
      std::string field = rest.substr(dot + 1);
      ProviderConfig& p = config.providers[name];
      if (field == "base_url") p.base_url = value;
      else if (field == "api_key_env") p.api_key_env = value;
      else if (field == "requests_per_minute") p.requests_per_minute = parse_int(key, value);
      else if (field == "max_retries") p.max_retries = parse_int(key, value);
      else if (field == "backoff_initial_ms") p.backoff_initial_ms = parse_int(key, value);
      else if (field == "backoff_cap_ms") p.backoff_cap_ms = parse_int(key, value);
      else if (field == "timeout_s") p.timeout_s = parse_int(key, value);
      else throw ConfigError("unknown provider field '" + field + "'");
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }

  config.validate();
  return config;
}

const ProviderConfig& RunConfig::provider(const std::string& name) const {
  auto it = providers.find(name);
  if (it == providers.end()) throw ConfigError("unknown provider '" + name + "'");
  return it->second;
}

void RunConfig::validate() const {
  if (workers < 1) throw ConfigError("workers must be >= 1");
  taxonomy.validate();
  if (!providers.count(default_provider))
    throw ConfigError("default provider '" + default_provider + "' is not configured");
  for (const auto& [name, p] : providers) {
    if (p.requests_per_minute < 1)
      throw ConfigError("provider '" + name + "' requests_per_minute must be positive");
    if (p.max_retries < 0)
      throw ConfigError("provider '" + name + "' max_retries must be non-negative");
  }
}

}  // namespace eduaffect
