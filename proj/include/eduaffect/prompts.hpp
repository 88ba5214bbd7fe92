#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eduaffect/corpus.hpp"
#include "eduaffect/labels.hpp"

namespace eduaffect {

enum class Method { base, cot, proposed };
enum class Task { emotion, engagement, behavior, tone, full_profile };

std::string to_string(Method method);
std::string to_string(Task task);
std::optional<Method> method_from_string(std::string_view word);
std::optional<Task> task_from_string(std::string_view word);

// Prompt body with named slots {{text}}, {{taxonomy}}, {{prior}}.
// {{text}} must appear exactly once.
struct PromptTemplate {
  std::string id;
  Task task = Task::emotion;
  Method method = Method::proposed;
  std::string body;

  // Throws ConfigError when the slot invariants are violated.
  void validate() const;
};

// Ordered prompt rounds implementing one method variant for one task.
struct PipelineSpec {
  Method method = Method::proposed;
  Task task = Task::emotion;
  std::vector<std::string> rounds;  // template ids
};

class TemplateCatalog {
 public:
  // Catalog preloaded with the builtin templates.
  static TemplateCatalog builtins();

  void add(PromptTemplate tmpl);
  const PromptTemplate& get(const std::string& id) const;
  bool has(const std::string& id) const;
  std::vector<std::string> ids() const;

  // Loads extra templates from a directory of text files with a small
  // front-matter header (id/task/method lines, then ---, then the body).
  void load_directory(const std::filesystem::path& dir);

 private:
  std::map<std::string, PromptTemplate> templates_;
};

// Substitutes all slots. Output embeds record.text verbatim. When prior is
// given but the body has no {{prior}} slot, a "Prior assessment: X." line is
// prepended so later rounds always see the earlier parse.
std::string render_prompt(const PromptTemplate& tmpl, const InteractionRecord& record,
                          const EmotionTaxonomy& taxonomy,
                          const std::optional<std::string>& prior = std::nullopt);

PipelineSpec build_pipeline(Method method, Task task);

}  // namespace eduaffect
