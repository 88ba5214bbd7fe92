#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "eduaffect/corpus.hpp"
#include "eduaffect/pipeline.hpp"

namespace eduaffect {

struct AccuracyReport {
  Task task = Task::emotion;
  std::size_t total = 0;
  std::size_t correct = 0;
  std::size_t unparseable = 0;  // failed or unparseable predictions, counted incorrect
  double accuracy = 0.0;
  bool empty_warning = false;
  // gold label -> predicted label ("<failed>" when no prediction) -> count
  std::map<std::string, std::map<std::string, std::size_t>> confusion;
};

struct JudgeReport {
  std::size_t total = 0;       // items with a parsed score
  std::size_t missing = 0;     // items whose judge reply was unparseable
  double mean_score = 0.0;
  std::vector<std::pair<std::string, double>> per_item;
};

struct ComparisonRow {
  std::string model;
  Method method = Method::base;
  std::optional<double> acc_percent;   // [0,100]
  std::optional<double> judge_score;   // [0,1]
  std::string error;                   // set when the whole cell failed
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
};

enum class TableFormat { text, csv, json, latex };

// Exact-match scoring against gold labels; failed or unparseable profiles
// count as incorrect. Throws MissingGold when a scored record has no gold
// label for the task.
AccuracyReport accuracy(const std::vector<BatchItem>& items, const Dataset& golds, Task task);

// The LLM-judge relevance metric: one rubric prompt per item, scores parsed via
// parse_judge_score, unparseable replies excluded from the mean.
JudgeReport judge_score_report(const std::vector<std::pair<InteractionRecord, StudentProfile>>& items,
                               Client& judge, const std::string& judge_model);

std::string judge_rubric_prompt(const InteractionRecord& record, const StudentProfile& profile);

using ClientFactory = std::function<std::shared_ptr<Client>(const std::string& model)>;

// model-major rows, methods in base < cot < proposed order. Per-cell failures
// leave the row's metrics empty and the run continues.
ComparisonTable compare_methods(const Dataset& dataset, const std::vector<std::string>& models,
                                std::vector<Method> methods, Task task,
                                const ClientFactory& client_factory, Client* judge,
                                const std::string& judge_model, int workers = 1);

std::string render_table(const ComparisonTable& table, TableFormat format);
ComparisonTable parse_table_csv(const std::string& csv);

// filter_by_context per tag, one accuracy report per subset, ordered by tag.
std::vector<std::pair<std::string, AccuracyReport>> robustness_by_context(
    const Dataset& dataset, const PipelineSpec& spec, Client& client,
    const TemplateCatalog& catalog, Task task, const std::string& model, int workers = 1);

nlohmann::json accuracy_to_json(const AccuracyReport& report);
nlohmann::json judge_to_json(const JudgeReport& report);

}  // namespace eduaffect
