#include "eduaffect/eval.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <set>
#include <sstream>

#include "eduaffect/errors.hpp"

namespace eduaffect {

namespace {

constexpr const char* kFailedLabel = "<failed>";

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::optional<std::string> gold_value(const GoldLabels& gold, Task task) {
  switch (task) {
    case Task::emotion:
      if (gold.emotion) return *gold.emotion;
      return std::nullopt;
    case Task::engagement:
      if (gold.engagement) return to_string(*gold.engagement);
      return std::nullopt;
    case Task::behavior:
      if (gold.behavior) return to_string(*gold.behavior);
      return std::nullopt;
    default: return std::nullopt;
  }
}

std::optional<std::string> predicted_value(const StudentProfile& profile, Task task) {
  switch (task) {
    case Task::emotion: return profile.emotion;
    case Task::engagement:
      if (profile.engagement) return to_string(*profile.engagement);
      return std::nullopt;
    case Task::behavior:
      if (profile.behavior) return to_string(*profile.behavior);
      return std::nullopt;
    default: return std::nullopt;
  }
}

Dataset labeled_subset(const Dataset& dataset, Task task) {
  Dataset out;
  out.taxonomy = dataset.taxonomy;
  for (const auto& record : dataset.records) {
    if (record.gold && gold_value(*record.gold, task)) out.records.push_back(record);
  }
  return out;
}

// Per-model best ACC rows get the best-method marking.
std::vector<bool> best_flags(const ComparisonTable& table) {
  std::vector<bool> best(table.rows.size(), false);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    if (!row.acc_percent) continue;
    bool is_best = true;
    for (const auto& other : table.rows) {
      if (other.model != row.model || !other.acc_percent) continue;
      if (*other.acc_percent > *row.acc_percent) is_best = false;
    }
    best[i] = is_best;
  }
  return best;
}

std::string csv_field(const std::optional<double>& v) {
  if (!v) return {};
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", *v);
  return buf;
}

}  // namespace

AccuracyReport accuracy(const std::vector<BatchItem>& items, const Dataset& golds, Task task) {
  if (task != Task::emotion && task != Task::engagement && task != Task::behavior)
    throw ConfigError("accuracy is defined for emotion, engagement, and behavior tasks");

  std::map<std::string, const InteractionRecord*> by_id;
  for (const auto& record : golds.records) by_id[record.id] = &record;

  AccuracyReport report;
  report.task = task;
  report.total = items.size();

  for (const auto& item : items) {
    auto it = by_id.find(item.record_id);
    if (it == by_id.end() || !it->second->gold) throw MissingGold(item.record_id);
    auto gold = gold_value(*it->second->gold, task);
    if (!gold) throw MissingGold(item.record_id);

    std::optional<std::string> predicted;
    if (item.error.empty() && item.profile) predicted = predicted_value(*item.profile, task);

    if (!predicted) {
      ++report.unparseable;
      ++report.confusion[*gold][kFailedLabel];
      continue;
    }
    ++report.confusion[*gold][*predicted];
    if (*predicted == *gold) ++report.correct;
  }

  if (report.total == 0) {
    report.empty_warning = true;
    report.accuracy = 0.0;
  } else {
    report.accuracy = static_cast<double>(report.correct) / static_cast<double>(report.total);
  }
  return report;
}

std::string judge_rubric_prompt(const InteractionRecord& record, const StudentProfile& profile) {
  std::string labels;
  auto append = [&labels](const std::string& part) {
    if (!labels.empty()) labels += ", ";
    labels += part;
  };
  if (profile.emotion) append("emotion=" + *profile.emotion);
  if (profile.engagement) append("engagement=" + to_string(*profile.engagement));
  if (profile.behavior) append("behavior(" + to_string(*profile.behavior) + ")");
  if (profile.tone) append("tone=" + to_string(*profile.tone));
  if (labels.empty()) labels = "none";

  return "Rate the contextual relevance of the following emotion/engagement assessment to the "
         "student text on a scale of 0-10. Student text: '" +
         record.text + "'. Assessment: " + labels + ". Reply exactly: Score: n/10.";
}

JudgeReport judge_score_report(
    const std::vector<std::pair<InteractionRecord, StudentProfile>>& items, Client& judge,
    const std::string& judge_model) {
  JudgeReport report;
  long double sum = 0.0L;
  for (const auto& [record, profile] : items) {
    ChatRequest request;
    request.model = judge_model;
    request.messages = {{"user", judge_rubric_prompt(record, profile)}};
    try {
      UnitScore score = parse_judge_score(judge.complete(request).text);
      report.per_item.emplace_back(record.id, score.value);
      sum += score.value;
      ++report.total;
    } catch (const std::exception&) {
      ++report.missing;
    }
  }
  if (report.total > 0) report.mean_score = static_cast<double>(sum / report.total);
  return report;
}

ComparisonTable compare_methods(const Dataset& dataset, const std::vector<std::string>& models,
                                std::vector<Method> methods, Task task,
                                const ClientFactory& client_factory, Client* judge,
                                const std::string& judge_model, int workers) {
  std::sort(methods.begin(), methods.end());
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());

  const Dataset labeled = labeled_subset(dataset, task);
  const TemplateCatalog catalog = TemplateCatalog::builtins();

  ComparisonTable table;
  for (const auto& model : models) {
    for (Method method : methods) {
      ComparisonRow row;
      row.model = model;
      row.method = method;
      try {
        auto client = client_factory(model);
        PipelineSpec spec = build_pipeline(method, task);
        auto items = run_batch(labeled.records, spec, *client, catalog, labeled.taxonomy, model,
                               workers);
        AccuracyReport acc = accuracy(items, labeled, task);
        row.acc_percent = acc.accuracy * 100.0;
        if (judge) {
          std::vector<std::pair<InteractionRecord, StudentProfile>> judge_items;
          for (std::size_t i = 0; i < items.size(); ++i) {
            if (items[i].error.empty() && items[i].profile)
              judge_items.emplace_back(labeled.records[i], *items[i].profile);
          }
          row.judge_score = judge_score_report(judge_items, *judge, judge_model).mean_score;
        }
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

std::string render_table(const ComparisonTable& table, TableFormat format) {
  const auto best = best_flags(table);

  if (format == TableFormat::csv) {
    std::string out = "model,method,acc_percent,judge_score\n";
    for (const auto& row : table.rows) {
      out += row.model + "," + to_string(row.method) + "," + csv_field(row.acc_percent) + "," +
             csv_field(row.judge_score) + "\n";
    }
    return out;
  }

  if (format == TableFormat::json) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const auto& row = table.rows[i];
      nlohmann::json r{{"model", row.model}, {"method", to_string(row.method)}};
      if (row.acc_percent) r["acc_percent"] = *row.acc_percent;
      if (row.judge_score) r["judge_score"] = *row.judge_score;
      if (!row.error.empty()) r["error"] = row.error;
      r["best"] = best[i];
      rows.push_back(std::move(r));
    }
    return nlohmann::json{{"rows", rows}}.dump(2) + "\n";
  }

  if (format == TableFormat::latex) {
    std::string out = "\\begin{tabular}{|c|c|c|c|}\n\\hline\n";
    out += "\\textbf{Model} & \\textbf{Method} & \\textbf{ACC (\\%)} & \\textbf{GPT-4 Score} "
           "\\\\\n\\hline\n";
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const auto& row = table.rows[i];
      std::string acc = row.acc_percent ? format_fixed(*row.acc_percent, 1) : "-";
      std::string score = row.judge_score ? format_fixed(*row.judge_score, 2) : "-";
      if (best[i]) {
        if (row.acc_percent) acc = "\\textbf{" + acc + "}";
        if (row.judge_score) score = "\\textbf{" + score + "}";
      }
      out += row.model + " & " + to_string(row.method) + " & " + acc + " & " + score + " \\\\\n";
      if (i + 1 == table.rows.size() || table.rows[i + 1].model != row.model) out += "\\hline\n";
    }
    out += "\\end{tabular}\n";
    return out;
  }

  // text
  std::vector<std::array<std::string, 4>> cells;
  cells.push_back({"Model", "Method", "ACC (%)", "GPT-4 Score"});
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    std::string acc = row.acc_percent ? format_fixed(*row.acc_percent, 1) : "-";
    if (best[i] && row.acc_percent) acc += " *";
    std::string score = row.judge_score ? format_fixed(*row.judge_score, 2) : "-";
    cells.push_back({row.model, to_string(row.method), acc, score});
  }
  std::array<std::size_t, 4> widths{};
  for (const auto& row : cells) {
    for (int c = 0; c < 4; ++c) widths[c] = std::max(widths[c], row[c].size());
  }
  std::string out;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    for (int c = 0; c < 4; ++c) {
      out += cells[r][c];
      if (c < 3) out += std::string(widths[c] - cells[r][c].size() + 2, ' ');
    }
    out += '\n';
    if (r == 0) {
      for (int c = 0; c < 4; ++c) {
        out += std::string(widths[c], '-');
        if (c < 3) out += "  ";
      }
      out += '\n';
    }
  }
  return out;
}

ComparisonTable parse_table_csv(const std::string& csv) {
  ComparisonTable table;
  std::istringstream in(csv);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::array<std::string, 4> fields{};
    std::size_t start = 0;
    for (int c = 0; c < 4; ++c) {
      auto comma = c < 3 ? line.find(',', start) : line.size();
      if (comma == std::string::npos) throw ConfigError("bad CSV row: " + line);
      fields[c] = line.substr(start, comma - start);
      start = comma + 1;
    }
    ComparisonRow row;
    row.model = fields[0];
    auto method = method_from_string(fields[1]);
    if (!method) throw ConfigError("bad method in CSV row: " + line);
    row.method = *method;
    if (!fields[2].empty()) row.acc_percent = std::stod(fields[2]);
    if (!fields[3].empty()) row.judge_score = std::stod(fields[3]);
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<std::pair<std::string, AccuracyReport>> robustness_by_context(
    const Dataset& dataset, const PipelineSpec& spec, Client& client,
    const TemplateCatalog& catalog, Task task, const std::string& model, int workers) {
  const Dataset labeled = labeled_subset(dataset, task);
  std::set<std::string> tags;
  for (const auto& record : labeled.records) tags.insert(record.context);

  std::vector<std::pair<std::string, AccuracyReport>> reports;
  for (const auto& tag : tags) {
    Dataset subset = filter_by_context(labeled, tag);
    auto items = run_batch(subset.records, spec, client, catalog, labeled.taxonomy, model,
                           workers);
    reports.emplace_back(tag, accuracy(items, subset, task));
  }
  return reports;
}

nlohmann::json accuracy_to_json(const AccuracyReport& report) {
  nlohmann::json confusion = nlohmann::json::object();
  for (const auto& [gold, row] : report.confusion) {
    for (const auto& [predicted, count] : row) confusion[gold][predicted] = count;
  }
  return nlohmann::json{{"task", to_string(report.task)},
                        {"total", report.total},
                        {"correct", report.correct},
                        {"unparseable", report.unparseable},
                        {"accuracy", report.accuracy},
                        {"empty_warning", report.empty_warning},
                        {"confusion", confusion}};
}

nlohmann::json judge_to_json(const JudgeReport& report) {
  nlohmann::json per_item = nlohmann::json::array();
  for (const auto& [id, score] : report.per_item) {
    per_item.push_back({{"id", id}, {"score", score}});
  }
  return nlohmann::json{{"total", report.total},
                        {"missing", report.missing},
                        {"mean_score", report.mean_score},
                        {"per_item", per_item}};
}

}  // namespace eduaffect
