#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "eduaffect/config.hpp"
#include "eduaffect/corpus.hpp"
#include "eduaffect/errors.hpp"
#include "eduaffect/eval.hpp"
#include "eduaffect/llm.hpp"
#include "eduaffect/pipeline.hpp"
#include "eduaffect/prompts.hpp"

namespace {

using namespace eduaffect;

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

struct CommonOpts {
  std::string config_path;
  std::string input;
  std::string output;
  std::string method = "proposed";
  std::string task = "emotion";
  std::string model;
  bool mock = false;
};

RunConfig load_config(const std::string& path) {
  if (!path.empty()) return RunConfig::load(path);
  if (std::filesystem::exists("edu-affect.config")) return RunConfig::load("edu-affect.config");
  return RunConfig::defaults();
}

std::shared_ptr<Client> make_client(const RunConfig& config, bool mock,
                                    std::shared_ptr<DiskCache>& cache) {
  if (mock) return std::make_shared<MockClient>();
  if (!cache) cache = std::make_shared<DiskCache>(config.cache_dir);
  return std::make_shared<HttpClient>(config.provider(config.default_provider), cache);
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw ConfigError("cannot open output file: " + path);
  return file;
}

Method parse_method(const std::string& word) {
  auto method = method_from_string(word);
  if (!method) throw ConfigError("unknown method '" + word + "'");
  return *method;
}

Task parse_task(const std::string& word) {
  auto task = task_from_string(word);
  if (!task) throw ConfigError("unknown task '" + word + "'");
  return *task;
}

int cmd_analyze(const CommonOpts& opts, bool trace) {
  RunConfig config = load_config(opts.config_path);
  Dataset dataset = load_dataset(opts.input, config.taxonomy);
  std::shared_ptr<DiskCache> cache;
  auto client = make_client(config, opts.mock, cache);
  std::string model = opts.model.empty() ? config.default_model : opts.model;

  PipelineSpec spec = build_pipeline(parse_method(opts.method), parse_task(opts.task));
  TemplateCatalog catalog = TemplateCatalog::builtins();
  auto items = run_batch(dataset.records, spec, *client, catalog, dataset.taxonomy, model,
                         config.workers);

  std::ofstream file;
  std::ostream& out = open_output(opts.output, file);
  std::size_t failures = 0;
  for (const auto& item : items) {
    if (!item.error.empty()) {
      ++failures;
      std::cerr << "record " << item.record_id << ": " << item.error << "\n";
    }
    if (item.profile) out << profile_to_json(*item.profile, trace).dump() << "\n";
  }
  if (failures > 0) {
    std::cerr << failures << " of " << items.size() << " records failed\n";
    return kExitPartial;
  }
  return kExitOk;
}

int cmd_evaluate(const CommonOpts& opts, const std::string& judge_model_flag, bool no_judge) {
  RunConfig config = load_config(opts.config_path);
  Dataset dataset = load_dataset(opts.input, config.taxonomy);
  Task task = parse_task(opts.task);
  std::shared_ptr<DiskCache> cache;
  auto client = make_client(config, opts.mock, cache);
  std::string model = opts.model.empty() ? config.default_model : opts.model;

  PipelineSpec spec = build_pipeline(parse_method(opts.method), task);
  TemplateCatalog catalog = TemplateCatalog::builtins();
  auto items = run_batch(dataset.records, spec, *client, catalog, dataset.taxonomy, model,
                         config.workers);
  AccuracyReport acc = accuracy(items, dataset, task);

  nlohmann::json report{{"model", model},
                        {"method", opts.method},
                        {"accuracy", accuracy_to_json(acc)}};

  if (!no_judge) {
    std::string judge_model = !judge_model_flag.empty() ? judge_model_flag
                              : !config.judge_model.empty() ? config.judge_model
                                                            : model;
    auto judge = make_client(config, opts.mock, cache);
    std::vector<std::pair<InteractionRecord, StudentProfile>> judge_items;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (items[i].error.empty() && items[i].profile)
        judge_items.emplace_back(dataset.records[i], *items[i].profile);
    }
    report["judge"] = judge_to_json(judge_score_report(judge_items, *judge, judge_model));
  }

  std::ofstream file;
  std::ostream& out = open_output(opts.output, file);
  out << report.dump(2) << "\n";
  return kExitOk;
}

int cmd_compare(const CommonOpts& opts, const std::string& models_csv,
                const std::string& methods_csv, const std::string& format_word) {
  RunConfig config = load_config(opts.config_path);
  Dataset dataset = load_dataset(opts.input, config.taxonomy);
  Task task = parse_task(opts.task);

  std::vector<std::string> models;
  {
    std::istringstream in(models_csv);
    std::string m;
    while (std::getline(in, m, ',')) {
      if (!m.empty()) models.push_back(m);
    }
  }
  if (models.empty()) models.push_back(config.default_model);

  std::vector<Method> methods;
  {
    std::istringstream in(methods_csv);
    std::string m;
    while (std::getline(in, m, ',')) {
      if (!m.empty()) methods.push_back(parse_method(m));
    }
  }
  if (methods.empty()) methods = {Method::base, Method::cot, Method::proposed};

  TableFormat format;
  if (format_word == "text") format = TableFormat::text;
  else if (format_word == "csv") format = TableFormat::csv;
  else if (format_word == "json") format = TableFormat::json;
  else if (format_word == "latex") format = TableFormat::latex;
  else throw ConfigError("unknown format '" + format_word + "'");

  std::shared_ptr<DiskCache> cache;
  ClientFactory factory = [&](const std::string&) { return make_client(config, opts.mock, cache); };
  auto judge = make_client(config, opts.mock, cache);
  std::string judge_model = config.judge_model.empty() ? (models.empty() ? config.default_model
                                                                         : models.front())
                                                       : config.judge_model;

  ComparisonTable table =
      compare_methods(dataset, models, methods, task, factory, judge.get(), judge_model,
                      config.workers);

  std::ofstream file;
  std::ostream& out = open_output(opts.output, file);
  out << render_table(table, format);

  for (const auto& row : table.rows) {
    if (!row.error.empty()) {
      std::cerr << "cell " << row.model << "/" << to_string(row.method) << " failed: "
                << row.error << "\n";
    }
  }
  bool any_failed = std::any_of(table.rows.begin(), table.rows.end(),
                                [](const ComparisonRow& r) { return !r.error.empty(); });
  return any_failed ? kExitPartial : kExitOk;
}

int cmd_cache(const std::string& config_path, const std::string& action) {
  RunConfig config = load_config(config_path);
  DiskCache cache(config.cache_dir);
  if (action == "stats") {
    auto stats = cache.stats();
    std::cout << "entries: " << stats.entries << "\nbytes: " << stats.bytes << "\n";
    return kExitOk;
  }
  if (action == "clear") {
    cache.clear();
    std::cout << "cache cleared\n";
    return kExitOk;
  }
  if (action == "verify") {
    auto corrupt = cache.verify();
    std::cout << "corrupt entries: " << corrupt.size() << "\n";
    for (const auto& path : corrupt) std::cout << path.string() << "\n";
    return corrupt.empty() ? kExitOk : kExitPartial;
  }
  throw ConfigError("unknown cache action '" + action + "' (want stats, clear, or verify)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Student emotion and engagement analysis via multi-round LLM prompting"};
  app.require_subcommand(1);

  CommonOpts opts;
  app.add_option("--config", opts.config_path, "config file (default ./edu-affect.config)");

  bool trace = false;
  auto* analyze = app.add_subcommand("analyze", "run a pipeline over a dataset, emit profiles");
  analyze->add_option("--input", opts.input, "dataset JSONL")->required();
  analyze->add_option("--output", opts.output, "output file (default stdout)");
  analyze->add_option("--method", opts.method, "base | cot | proposed");
  analyze->add_option("--task", opts.task, "emotion | engagement | behavior | full_profile");
  analyze->add_option("--model", opts.model, "model id");
  analyze->add_flag("--trace", trace, "include full round traces");
  analyze->add_flag("--mock", opts.mock, "use the deterministic mock backend");

  std::string judge_model;
  bool no_judge = false;
  auto* evaluate = app.add_subcommand("evaluate", "accuracy + judge report against gold labels");
  evaluate->add_option("--input", opts.input, "dataset JSONL with gold labels")->required();
  evaluate->add_option("--output", opts.output, "output file (default stdout)");
  evaluate->add_option("--method", opts.method, "base | cot | proposed");
  evaluate->add_option("--task", opts.task, "emotion | engagement | behavior");
  evaluate->add_option("--model", opts.model, "model id");
  evaluate->add_option("--judge-model", judge_model, "model id for the judge");
  evaluate->add_flag("--no-judge", no_judge, "skip the judge metric");
  evaluate->add_flag("--mock", opts.mock, "use the deterministic mock backend");

  std::string models_csv, methods_csv, format_word = "text";
  auto* compare = app.add_subcommand("compare", "model x method comparison table");
  compare->add_option("--input", opts.input, "dataset JSONL with gold labels")->required();
  compare->add_option("--output", opts.output, "output file (default stdout)");
  compare->add_option("--models", models_csv, "comma-separated model ids");
  compare->add_option("--methods", methods_csv, "comma-separated methods");
  compare->add_option("--task", opts.task, "emotion | engagement | behavior");
  compare->add_option("--format", format_word, "text | csv | json | latex");
  compare->add_flag("--mock", opts.mock, "use the deterministic mock backend");

  std::string cache_action;
  auto* cache_cmd = app.add_subcommand("cache", "inspect or manage the completion cache");
  cache_cmd->add_option("action", cache_action, "stats | clear | verify")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (app.got_subcommand(analyze)) return cmd_analyze(opts, trace);
    if (app.got_subcommand(evaluate)) return cmd_evaluate(opts, judge_model, no_judge);
    if (app.got_subcommand(compare)) return cmd_compare(opts, models_csv, methods_csv, format_word);
    if (app.got_subcommand(cache_cmd)) return cmd_cache(opts.config_path, cache_action);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DatasetLoadError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const MissingGold& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPartial;
  }
  return kExitConfig;
}
