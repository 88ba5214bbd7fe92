#pragma once

#include <string>
#include <variant>

#include "eduaffect/labels.hpp"
#include "eduaffect/prompts.hpp"

namespace eduaffect {

// Judge relevance score normalized to [0,1].
struct UnitScore {
  double value = 0.0;

  explicit UnitScore(double v);
  bool operator==(const UnitScore&) const = default;
};

// Typed result of parsing one round's completion. The active variant
// alternative matches the round's task.
struct ParsedRound {
  Task task = Task::emotion;
  std::variant<std::string, EngagementLevel, BehaviorFlags, ToneLabel, UnitScore> value{
      std::string{}};
  std::string raw;

  // Canonical short form, used as the {{prior}} for the next round.
  std::string value_string() const;
};

// Extraction ladder, first hit wins:
//   1. "primary emotion expressed is <word>"
//   2. "Answer: <word>" on the final line
//   3. case-insensitive scan for exactly one taxonomy label
// Throws Unparseable or Ambiguous.
std::string parse_emotion(const std::string& text, const EmotionTaxonomy& taxonomy);

EngagementLevel parse_engagement(const std::string& text);

// Requires both "Signs of confusion: yes|no" and "Signs of frustration:
// yes|no" (case-insensitive).
BehaviorFlags parse_behavior(const std::string& text);

ToneLabel parse_tone(const std::string& text);

// "Score: n/10" with n in 0..10, else a bare number in [0,1] on its own line.
UnitScore parse_judge_score(const std::string& text);

// Dispatches on task; full_profile is not a parseable round task.
ParsedRound parse_round(Task task, const std::string& text, const EmotionTaxonomy& taxonomy);

}  // namespace eduaffect
