#include "eduaffect/corpus.hpp"

#include <fstream>
#include <unordered_set>

#include "eduaffect/errors.hpp"

namespace eduaffect {

namespace {

bool is_blank(const std::string& s) {
  return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

GoldLabels gold_from_json(const nlohmann::json& j, const EmotionTaxonomy& taxonomy) {
  GoldLabels gold;
  if (j.contains("emotion")) {
    std::string emotion = j.at("emotion").get<std::string>();
    if (!taxonomy.contains(emotion)) throw Error("unknown emotion label '" + emotion + "'");
    gold.emotion = emotion;
  }
  if (j.contains("engagement")) {
    std::string word = j.at("engagement").get<std::string>();
    auto level = engagement_from_string(word);
    if (!level) throw Error("unknown engagement level '" + word + "'");
    gold.engagement = *level;
  }
  if (j.contains("behavior")) {
    const auto& b = j.at("behavior");
    gold.behavior = BehaviorFlags{b.at("confusion").get<bool>(), b.at("frustration").get<bool>()};
  }
  if (gold.empty()) throw Error("gold object must carry at least one label");
  return gold;
}

}  // namespace

std::string to_string(Modality modality) {
  switch (modality) {
    case Modality::written_response: return "written_response";
    case Modality::discussion_post: return "discussion_post";
    case Modality::chat_message: return "chat_message";
  }
  return "written_response";
}

std::optional<Modality> modality_from_string(std::string_view word) {
  if (word == "written_response") return Modality::written_response;
  if (word == "discussion_post") return Modality::discussion_post;
  if (word == "chat_message") return Modality::chat_message;
  return std::nullopt;
}

nlohmann::json record_to_json(const InteractionRecord& record) {
  nlohmann::json j{
      {"id", record.id},
      {"text", record.text},
      {"modality", to_string(record.modality)},
      {"context", record.context},
  };
  if (record.gold) {
    nlohmann::json g = nlohmann::json::object();
    if (record.gold->emotion) g["emotion"] = *record.gold->emotion;
    if (record.gold->engagement) g["engagement"] = to_string(*record.gold->engagement);
    if (record.gold->behavior) {
      g["behavior"] = {{"confusion", record.gold->behavior->confusion},
                       {"frustration", record.gold->behavior->frustration}};
    }
    j["gold"] = g;
  }
  return j;
}

InteractionRecord record_from_json(const nlohmann::json& j, const EmotionTaxonomy& taxonomy) {
  InteractionRecord record;
  record.id = j.at("id").get<std::string>();
  if (record.id.empty()) throw Error("record id must be non-empty");
  record.text = j.at("text").get<std::string>();
  if (is_blank(record.text)) throw Error("record text must be non-empty");
  std::string modality_word = j.at("modality").get<std::string>();
  auto modality = modality_from_string(modality_word);
  if (!modality) throw Error("unknown modality '" + modality_word + "'");
  record.modality = *modality;
  record.context = j.value("context", std::string{});
  if (j.contains("gold") && !j.at("gold").is_null()) {
    record.gold = gold_from_json(j.at("gold"), taxonomy);
  }
  return record;
}

Dataset load_dataset(const std::filesystem::path& path, EmotionTaxonomy taxonomy) {
  taxonomy.validate();
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset file: " + path.string());

  Dataset dataset;
  dataset.taxonomy = std::move(taxonomy);
  std::vector<LineError> errors;
  std::unordered_set<std::string> seen_ids;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      errors.push_back({line_no, "MalformedLine", "not a JSON object"});
      continue;
    }
    try {
      InteractionRecord record = record_from_json(j, dataset.taxonomy);
      if (!seen_ids.insert(record.id).second) {
        errors.push_back({line_no, "DuplicateId", record.id});
        continue;
      }
      dataset.records.push_back(std::move(record));
    } catch (const std::exception& e) {
      std::string what = e.what();
      std::string kind = what.find("unknown emotion label") != std::string::npos
                             ? "UnknownLabel"
                             : "MalformedLine";
      errors.push_back({line_no, kind, what});
    }
  }

  if (!errors.empty()) throw DatasetLoadError(std::move(errors));
  return dataset;
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open file for writing: " + path.string());
  for (const auto& record : dataset.records) {
    out << record_to_json(record).dump() << '\n';
  }
}

Dataset filter_by_context(const Dataset& dataset, std::string_view context) {
  Dataset subset;
  subset.taxonomy = dataset.taxonomy;
  for (const auto& record : dataset.records) {
    if (record.context == context) subset.records.push_back(record);
  }
  return subset;
}

DatasetStats dataset_stats(const Dataset& dataset) {
  DatasetStats stats;
  stats.total = dataset.records.size();
  for (const auto& record : dataset.records) {
    ++stats.per_modality[to_string(record.modality)];
    ++stats.per_context[record.context];
    if (record.gold) {
      if (record.gold->emotion) ++stats.labeled_counts["emotion"];
      if (record.gold->engagement) ++stats.labeled_counts["engagement"];
      if (record.gold->behavior) ++stats.labeled_counts["behavior"];
    }
  }
  return stats;
}

}  // namespace eduaffect
