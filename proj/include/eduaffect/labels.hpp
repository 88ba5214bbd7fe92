#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eduaffect {

// Ordinal engagement assessment, high > medium > low > disengaged.
enum class EngagementLevel { high, medium, low, disengaged };

// Round-1 general tone vocabulary.
enum class ToneLabel { positive, negative, mixed, neutral };

struct BehaviorFlags {
  bool confusion = false;
  bool frustration = false;

  bool operator==(const BehaviorFlags&) const = default;
};

std::string to_string(EngagementLevel level);
std::string to_string(ToneLabel tone);
std::string to_string(BehaviorFlags flags);

std::optional<EngagementLevel> engagement_from_string(std::string_view word);
std::optional<ToneLabel> tone_from_string(std::string_view word);

// Closed set of emotion labels predictions must come from.
// Labels are unique lowercase ASCII words; "neutral" is always a member.
struct EmotionTaxonomy {
  std::vector<std::string> labels;

  static EmotionTaxonomy default_taxonomy();

  bool contains(std::string_view label) const;

  // Comma-separated label list for prompt substitution.
  std::string joined() const;

  // Throws ConfigError on violation of the label invariants.
  void validate() const;
};

}  // namespace eduaffect
