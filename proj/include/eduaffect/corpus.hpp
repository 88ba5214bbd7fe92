#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "eduaffect/labels.hpp"

namespace eduaffect {

enum class Modality { written_response, discussion_post, chat_message };

std::string to_string(Modality modality);
std::optional<Modality> modality_from_string(std::string_view word);

// Optional reference labels for one record; at least one field must be set.
struct GoldLabels {
  std::optional<std::string> emotion;
  std::optional<EngagementLevel> engagement;
  std::optional<BehaviorFlags> behavior;

  bool empty() const { return !emotion && !engagement && !behavior; }
};

// One unit of student text plus context metadata.
struct InteractionRecord {
  std::string id;
  std::string text;
  Modality modality = Modality::written_response;
  std::string context;
  std::optional<GoldLabels> gold;
};

// Immutable after load; safe for concurrent readers.
struct Dataset {
  std::vector<InteractionRecord> records;
  EmotionTaxonomy taxonomy;
};

struct DatasetStats {
  std::size_t total = 0;
  std::map<std::string, std::size_t> per_modality;
  std::map<std::string, std::size_t> per_context;
  // Records carrying a gold label, keyed by task name ("emotion", "engagement", "behavior").
  std::map<std::string, std::size_t> labeled_counts;
};

nlohmann::json record_to_json(const InteractionRecord& record);
InteractionRecord record_from_json(const nlohmann::json& j, const EmotionTaxonomy& taxonomy);

// Loads a JSONL dataset, one record object per line. Every line is validated;
// all invalid lines are collected and reported together via DatasetLoadError.
Dataset load_dataset(const std::filesystem::path& path, EmotionTaxonomy taxonomy);

// Emits the same JSONL schema load_dataset reads; load(write(d)) == d.
void write_dataset(const Dataset& dataset, const std::filesystem::path& path);

Dataset filter_by_context(const Dataset& dataset, std::string_view context);

DatasetStats dataset_stats(const Dataset& dataset);

}  // namespace eduaffect
