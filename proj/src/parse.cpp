#include "eduaffect/parse.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>

#include "eduaffect/errors.hpp"

namespace eduaffect {

namespace {

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string strip_punct(std::string word) {
  while (!word.empty() && std::ispunct(static_cast<unsigned char>(word.back()))) word.pop_back();
  while (!word.empty() && std::ispunct(static_cast<unsigned char>(word.front())))
    word.erase(word.begin());
  return word;
}

// Last non-blank line of the completion.
std::string final_line(const std::string& text) {
  std::string line, last;
  std::istringstream in(text);
  while (std::getline(in, line)) {
    auto begin = line.find_first_not_of(" \t\r");
    if (begin != std::string::npos) last = line;
  }
  return last;
}

// Rung 2 of every ladder: "Answer: <word>" on the final line (CoT form).
std::optional<std::string> answer_line_word(const std::string& text) {
  static const std::regex re(R"(^\s*answer\s*:\s*(\S+)\s*$)", std::regex::icase);
  std::smatch m;
  std::string last = final_line(text);
  if (std::regex_match(last, m, re)) return strip_punct(to_lower(m[1].str()));
  return std::nullopt;
}

// Rung 3: words of the text, lowercased and stripped of punctuation.
std::vector<std::string> words_of(const std::string& text) {
  std::vector<std::string> words;
  std::istringstream in(text);
  std::string w;
  while (in >> w) {
    w = strip_punct(to_lower(w));
    if (!w.empty()) words.push_back(w);
  }
  return words;
}

std::vector<std::string> unique_hits(const std::string& text,
                                     const std::vector<std::string>& vocabulary) {
  std::vector<std::string> hits;
  for (const auto& word : words_of(text)) {
    if (std::find(vocabulary.begin(), vocabulary.end(), word) == vocabulary.end()) continue;
    if (std::find(hits.begin(), hits.end(), word) == hits.end()) hits.push_back(word);
  }
  return hits;
}

}  // namespace

UnitScore::UnitScore(double v) : value(v) {
  if (v < 0.0 || v > 1.0) throw OutOfRange(v);
}

std::string ParsedRound::value_string() const {
  if (const auto* s = std::get_if<std::string>(&value)) return *s;
  if (const auto* e = std::get_if<EngagementLevel>(&value)) return to_string(*e);
  if (const auto* b = std::get_if<BehaviorFlags>(&value)) return to_string(*b);
  if (const auto* t = std::get_if<ToneLabel>(&value)) return to_string(*t);
  return std::to_string(std::get<UnitScore>(value).value);
}

std::string parse_emotion(const std::string& text, const EmotionTaxonomy& taxonomy) {
  static const std::regex re(R"(primary emotion expressed is\s+([A-Za-z_]+))",
                             std::regex::icase);
  std::smatch m;
  if (std::regex_search(text, m, re)) {
    std::string label = strip_punct(to_lower(m[1].str()));
    if (taxonomy.contains(label)) return label;
    throw Unparseable(text);
  }
  if (auto word = answer_line_word(text)) {
    if (taxonomy.contains(*word)) return *word;
    throw Unparseable(text);
  }
  auto hits = unique_hits(text, taxonomy.labels);
  if (hits.size() == 1) return hits.front();
  if (hits.size() > 1) throw Ambiguous(hits);
  throw Unparseable(text);
}

EngagementLevel parse_engagement(const std::string& text) {
  static const std::vector<std::string> levels{"high", "medium", "low", "disengaged"};
  static const std::regex re(R"(engagement level\s*:\s*([A-Za-z]+))", std::regex::icase);
  std::smatch m;
  if (std::regex_search(text, m, re)) {
    if (auto level = engagement_from_string(strip_punct(to_lower(m[1].str())))) return *level;
    throw Unparseable(text);
  }
  if (auto word = answer_line_word(text)) {
    if (auto level = engagement_from_string(*word)) return *level;
    throw Unparseable(text);
  }
  auto hits = unique_hits(text, levels);
  if (hits.size() == 1) return *engagement_from_string(hits.front());
  if (hits.size() > 1) throw Ambiguous(hits);
  throw Unparseable(text);
}

BehaviorFlags parse_behavior(const std::string& text) {
  static const std::regex confusion_re(R"(signs of confusion\s*:\s*(yes|no))",
                                       std::regex::icase);
  static const std::regex frustration_re(R"(signs of frustration\s*:\s*(yes|no))",
                                         std::regex::icase);
  std::smatch mc, mf;
  if (!std::regex_search(text, mc, confusion_re) || !std::regex_search(text, mf, frustration_re))
    throw Unparseable(text);
  return BehaviorFlags{to_lower(mc[1].str()) == "yes", to_lower(mf[1].str()) == "yes"};
}

ToneLabel parse_tone(const std::string& text) {
  static const std::vector<std::string> tones{"positive", "negative", "mixed", "neutral"};
  static const std::regex re(R"(tone\s*:\s*([A-Za-z]+))", std::regex::icase);
  std::smatch m;
  if (std::regex_search(text, m, re)) {
    if (auto tone = tone_from_string(strip_punct(to_lower(m[1].str())))) return *tone;
    throw Unparseable(text);
  }
  if (auto word = answer_line_word(text)) {
    if (auto tone = tone_from_string(*word)) return *tone;
    throw Unparseable(text);
  }
  auto hits = unique_hits(text, tones);
  if (hits.size() == 1) return *tone_from_string(hits.front());
  if (hits.size() > 1) throw Ambiguous(hits);
  throw Unparseable(text);
}

UnitScore parse_judge_score(const std::string& text) {
  static const std::regex score_re(R"(score\s*:\s*(\d+)\s*/\s*10)", std::regex::icase);
  std::smatch m;
  if (std::regex_search(text, m, score_re)) {
    int n = std::stoi(m[1].str());
    if (n < 0 || n > 10) throw OutOfRange(static_cast<double>(n));
    return UnitScore(n / 10.0);
  }
  static const std::regex number_re(R"(^\s*([0-9]*\.?[0-9]+)\s*$)");
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::smatch mn;
    if (std::regex_match(line, mn, number_re)) {
      double v = std::stod(mn[1].str());
      if (v < 0.0 || v > 1.0) throw OutOfRange(v);
      return UnitScore(v);
    }
  }
  throw Unparseable(text);
}

ParsedRound parse_round(Task task, const std::string& text, const EmotionTaxonomy& taxonomy) {
  ParsedRound round;
  round.task = task;
  round.raw = text;
  switch (task) {
    case Task::emotion: round.value = parse_emotion(text, taxonomy); break;
    case Task::engagement: round.value = parse_engagement(text); break;
    case Task::behavior: round.value = parse_behavior(text); break;
    case Task::tone: round.value = parse_tone(text); break;
    case Task::full_profile: throw ConfigError("full_profile is not a round task");
  }
  return round;
}

}  // namespace eduaffect
