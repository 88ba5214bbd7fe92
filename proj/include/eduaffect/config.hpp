#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "eduaffect/labels.hpp"
#include "eduaffect/llm.hpp"

namespace eduaffect {

// Run-wide settings from ./edu-affect.config (or --config). Simple key=value
// lines; provider fields are namespaced as provider.<name>.<field>. API keys
// are never stored here, only referenced by env-var name.
struct RunConfig {
  std::map<std::string, ProviderConfig> providers;
  std::string default_provider = "default";
  std::string default_model = "mock";
  std::string judge_model;  // empty: same client as the default
  EmotionTaxonomy taxonomy = EmotionTaxonomy::default_taxonomy();
  std::filesystem::path cache_dir = ".edu-affect-cache";
  int workers = 1;

  static RunConfig defaults();
  static RunConfig load(const std::filesystem::path& path);

  const ProviderConfig& provider(const std::string& name) const;
  void validate() const;
};

}  // namespace eduaffect
