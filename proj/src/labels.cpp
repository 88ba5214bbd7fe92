#include "eduaffect/labels.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "eduaffect/errors.hpp"

namespace eduaffect {

std::string to_string(EngagementLevel level) {
  switch (level) {
    case EngagementLevel::high: return "high";
    case EngagementLevel::medium: return "medium";
    case EngagementLevel::low: return "low";
    case EngagementLevel::disengaged: return "disengaged";
  }
  return "low";
}

std::string to_string(ToneLabel tone) {
  switch (tone) {
    case ToneLabel::positive: return "positive";
    case ToneLabel::negative: return "negative";
    case ToneLabel::mixed: return "mixed";
    case ToneLabel::neutral: return "neutral";
  }
  return "neutral";
}

std::string to_string(BehaviorFlags flags) {
  std::string out = "confusion=";
  out += flags.confusion ? "yes" : "no";
  out += ", frustration=";
  out += flags.frustration ? "yes" : "no";
  return out;
}

std::optional<EngagementLevel> engagement_from_string(std::string_view word) {
  if (word == "high") return EngagementLevel::high;
  if (word == "medium") return EngagementLevel::medium;
  if (word == "low") return EngagementLevel::low;
  if (word == "disengaged") return EngagementLevel::disengaged;
  return std::nullopt;
}

std::optional<ToneLabel> tone_from_string(std::string_view word) {
  if (word == "positive") return ToneLabel::positive;
  if (word == "negative") return ToneLabel::negative;
  if (word == "mixed") return ToneLabel::mixed;
  if (word == "neutral") return ToneLabel::neutral;
  return std::nullopt;
}

EmotionTaxonomy EmotionTaxonomy::default_taxonomy() {
  return EmotionTaxonomy{{"joy", "satisfaction", "curiosity", "confusion", "frustration",
                          "anxiety", "boredom", "neutral"}};
}

bool EmotionTaxonomy::contains(std::string_view label) const {
  return std::find(labels.begin(), labels.end(), label) != labels.end();
}

std::string EmotionTaxonomy::joined() const {
  std::string out;
  for (const auto& l : labels) {
    if (!out.empty()) out += ", ";
    out += l;
  }
  return out;
}

void EmotionTaxonomy::validate() const {
  if (labels.empty()) throw ConfigError("taxonomy must be non-empty");
  std::unordered_set<std::string> seen;
  for (const auto& l : labels) {
    if (l.empty()) throw ConfigError("taxonomy labels must be non-empty");
    for (unsigned char c : l) {
      if (!(std::islower(c) || c == '_'))
        throw ConfigError("taxonomy label '" + l + "' must be a lowercase ASCII word");
    }
    if (!seen.insert(l).second) throw ConfigError("duplicate taxonomy label '" + l + "'");
  }
  if (!contains("neutral")) throw ConfigError("taxonomy must include 'neutral'");
}

}  // namespace eduaffect
