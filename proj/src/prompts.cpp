#include "eduaffect/prompts.hpp"

#include <fstream>
#include <sstream>

#include "eduaffect/errors.hpp"

namespace eduaffect {

namespace {

constexpr const char* kCotSuffix =
    " Think step by step, then state your final answer on the last line as: Answer: X.";

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
  std::size_t count = 0;
  for (std::size_t pos = haystack.find(needle); pos != std::string::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::base: return "base";
    case Method::cot: return "cot";
    case Method::proposed: return "proposed";
  }
  return "proposed";
}

std::string to_string(Task task) {
  switch (task) {
    case Task::emotion: return "emotion";
    case Task::engagement: return "engagement";
    case Task::behavior: return "behavior";
    case Task::tone: return "tone";
    case Task::full_profile: return "full_profile";
  }
  return "emotion";
}

std::optional<Method> method_from_string(std::string_view word) {
  if (word == "base") return Method::base;
  if (word == "cot") return Method::cot;
  if (word == "proposed") return Method::proposed;
  return std::nullopt;
}

std::optional<Task> task_from_string(std::string_view word) {
  if (word == "emotion") return Task::emotion;
  if (word == "engagement") return Task::engagement;
  if (word == "behavior") return Task::behavior;
  if (word == "tone") return Task::tone;
  if (word == "full_profile") return Task::full_profile;
  return std::nullopt;
}

void PromptTemplate::validate() const {
  if (id.empty()) throw ConfigError("template id must be non-empty");
  if (count_occurrences(body, "{{text}}") != 1)
    throw ConfigError("template '" + id + "' must contain {{text}} exactly once");
  // Every {{...}} slot must be one of the three named slots.
  std::size_t pos = 0;
  while ((pos = body.find("{{", pos)) != std::string::npos) {
    auto end = body.find("}}", pos);
    if (end == std::string::npos)
      throw ConfigError("template '" + id + "' has an unterminated slot");
    std::string slot = body.substr(pos + 2, end - pos - 2);
    if (slot != "text" && slot != "taxonomy" && slot != "prior")
      throw ConfigError("template '" + id + "' references unknown slot '" + slot + "'");
    pos = end + 2;
  }
}

TemplateCatalog TemplateCatalog::builtins() {
  TemplateCatalog catalog;

  // Proposed multi-round family: tone probe first, specific tasks after.
  catalog.add({"tone-v1", Task::tone, Method::proposed,
               "Assess the general emotional tone of the following student response, choosing "
               "one of positive, negative, mixed, or neutral: '{{text}}'"});
  catalog.add({"emotion-v1", Task::emotion, Method::proposed,
               "Analyze the following student response and identify the primary emotion "
               "expressed: '{{text}}'"});
  catalog.add({"engagement-v1", Task::engagement, Method::proposed,
               "Evaluate the engagement level of the student based on their participation in "
               "the discussion: '{{text}}'"});
  catalog.add({"behavior-v1", Task::behavior, Method::proposed,
               "Identify signs of confusion or frustration in the student's question: "
               "'{{text}}'"});

  // Base variants: the text plus a one-line task statement.
  catalog.add({"emotion-base-v1", Task::emotion, Method::base,
               "State the primary emotion of the following student response: '{{text}}'"});
  catalog.add({"engagement-base-v1", Task::engagement, Method::base,
               "State the engagement level of the following student response: '{{text}}'"});
  catalog.add({"behavior-base-v1", Task::behavior, Method::base,
               "State whether the following student question shows signs of confusion or "
               "frustration: '{{text}}'"});

  // CoT variants: the task prompt plus a step-by-step instruction with a
  // machine-parsable final line.
  catalog.add({"emotion-cot-v1", Task::emotion, Method::cot,
               "Analyze the following student response and identify the primary emotion "
               "expressed: '{{text}}'." +
                   std::string(kCotSuffix)});
  catalog.add({"engagement-cot-v1", Task::engagement, Method::cot,
               "Evaluate the engagement level of the student based on their participation in "
               "the discussion: '{{text}}'." +
                   std::string(kCotSuffix)});
  catalog.add({"behavior-cot-v1", Task::behavior, Method::cot,
               "Identify signs of confusion or frustration in the student's question: "
               "'{{text}}'." +
                   std::string(kCotSuffix)});

  return catalog;
}

void TemplateCatalog::add(PromptTemplate tmpl) {
  tmpl.validate();
  templates_[tmpl.id] = std::move(tmpl);
}

const PromptTemplate& TemplateCatalog::get(const std::string& id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) throw ConfigError("unknown template id '" + id + "'");
  return it->second;
}

bool TemplateCatalog::has(const std::string& id) const { return templates_.count(id) > 0; }

std::vector<std::string> TemplateCatalog::ids() const {
  std::vector<std::string> out;
  out.reserve(templates_.size());
  for (const auto& [id, _] : templates_) out.push_back(id);
  return out;
}

void TemplateCatalog::load_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw ConfigError("template directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    std::ifstream in(file);
    std::string line;
    PromptTemplate tmpl;
    bool in_body = false;
    std::string body;
    while (std::getline(in, line)) {
      if (in_body) {
        body += line;
        body += '\n';
        continue;
      }
      if (trim(line) == "---") {
        in_body = true;
        continue;
      }
      auto colon = line.find(':');
      if (colon == std::string::npos)
        throw ConfigError("bad front-matter line in " + file.string() + ": " + line);
      std::string key = trim(line.substr(0, colon));
      std::string value = trim(line.substr(colon + 1));
      if (key == "id") {
        tmpl.id = value;
      } else if (key == "task") {
        auto task = task_from_string(value);
        if (!task) throw ConfigError("unknown task '" + value + "' in " + file.string());
        tmpl.task = *task;
      } else if (key == "method") {
        auto method = method_from_string(value);
        if (!method) throw ConfigError("unknown method '" + value + "' in " + file.string());
        tmpl.method = *method;
      } else {
        throw ConfigError("unknown front-matter key '" + key + "' in " + file.string());
      }
    }
    if (!in_body) throw ConfigError("missing '---' separator in " + file.string());
    tmpl.body = trim(body);
    add(std::move(tmpl));
  }
}

std::string render_prompt(const PromptTemplate& tmpl, const InteractionRecord& record,
                          const EmotionTaxonomy& taxonomy,
                          const std::optional<std::string>& prior) {
  tmpl.validate();
  if (trim(record.text).empty()) throw ConfigError("record text must be non-empty");

  const bool wants_prior = tmpl.body.find("{{prior}}") != std::string::npos;
  if (wants_prior && !prior) throw MissingSlotValue("prior");

  std::string out = tmpl.body;
  out = replace_all(out, "{{text}}", record.text);
  out = replace_all(out, "{{taxonomy}}", taxonomy.joined());
  if (wants_prior) out = replace_all(out, "{{prior}}", *prior);

  // Priors still reach templates without a {{prior}} slot as a prefix line,
  // so round k+1 always sees round k's parse.
  if (prior && !wants_prior) out = "Prior assessment: " + *prior + ".\n" + out;
  return out;
}

PipelineSpec build_pipeline(Method method, Task task) {
  PipelineSpec spec{method, task, {}};
  if (method == Method::proposed) {
    switch (task) {
      case Task::emotion: spec.rounds = {"tone-v1", "emotion-v1"}; break;
      case Task::engagement: spec.rounds = {"engagement-v1"}; break;
      case Task::behavior: spec.rounds = {"behavior-v1"}; break;
      case Task::tone: spec.rounds = {"tone-v1"}; break;
      case Task::full_profile:
        spec.rounds = {"tone-v1", "emotion-v1", "engagement-v1", "behavior-v1"};
        break;
    }
    return spec;
  }

  const std::string suffix = method == Method::base ? "-base-v1" : "-cot-v1";
  switch (task) {
    case Task::emotion: spec.rounds = {"emotion" + suffix}; break;
    case Task::engagement: spec.rounds = {"engagement" + suffix}; break;
    case Task::behavior: spec.rounds = {"behavior" + suffix}; break;
    case Task::tone: spec.rounds = {"tone-v1"}; break;
    case Task::full_profile:
      // One round per sub-task; base/cot have no tone probe.
      spec.rounds = {"emotion" + suffix, "engagement" + suffix, "behavior" + suffix};
      break;
  }
  return spec;
}

}  // namespace eduaffect
