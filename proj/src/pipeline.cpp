#include "eduaffect/pipeline.hpp"

#include <atomic>
#include <thread>

namespace eduaffect {

namespace {

template <typename T>
void fold_field(std::optional<T>& slot, const T& value) {
  if (slot && !(*slot == value))
    throw ConflictUnresolvable("two rounds of the same task disagree");
  slot = value;
}

}  // namespace

ProfileFields aggregate(const std::vector<ParsedRound>& rounds) {
  if (rounds.empty()) throw ConfigError("aggregate requires at least one round");
  ProfileFields fields;
  for (const auto& round : rounds) {
    switch (round.task) {
      case Task::emotion: fold_field(fields.emotion, std::get<std::string>(round.value)); break;
      case Task::engagement:
        fold_field(fields.engagement, std::get<EngagementLevel>(round.value));
        break;
      case Task::behavior: fold_field(fields.behavior, std::get<BehaviorFlags>(round.value)); break;
      case Task::tone: fold_field(fields.tone, std::get<ToneLabel>(round.value)); break;
      case Task::full_profile: throw ConfigError("full_profile is not a round task");
    }
  }
  return fields;
}

StudentProfile run_pipeline(const InteractionRecord& record, const PipelineSpec& spec,
                            Client& client, const TemplateCatalog& catalog,
                            const EmotionTaxonomy& taxonomy, const std::string& model) {
  StudentProfile profile;
  profile.record_id = record.id;
  profile.method = spec.method;

  std::vector<ParsedRound> parsed_rounds;
  std::optional<std::string> prior;

  for (std::size_t k = 0; k < spec.rounds.size(); ++k) {
    const PromptTemplate& tmpl = catalog.get(spec.rounds[k]);
    RoundResult round;
    round.round_index = static_cast<int>(k);
    round.template_id = tmpl.id;
    round.prompt = render_prompt(tmpl, record, taxonomy, prior);

    ChatRequest request;
    request.model = model;
    request.messages = {{"user", round.prompt}};

    try {
      round.completion = client.complete(request);
    } catch (const std::exception& e) {
      round.error = e.what();
      profile.trace.push_back(round);
      throw RoundFailed(static_cast<int>(k), round.error, profile.trace);
    }

    try {
      round.parsed = parse_round(tmpl.task, round.completion.text, taxonomy);
    } catch (const std::exception& e) {
      round.error = e.what();
      profile.trace.push_back(round);
      throw RoundFailed(static_cast<int>(k), round.error, profile.trace);
    }

    prior = round.parsed->value_string();
    parsed_rounds.push_back(*round.parsed);
    profile.trace.push_back(std::move(round));
  }

  ProfileFields fields = aggregate(parsed_rounds);
  profile.tone = fields.tone;
  profile.emotion = fields.emotion;
  profile.engagement = fields.engagement;
  profile.behavior = fields.behavior;
  return profile;
}

std::vector<BatchItem> run_batch(const std::vector<InteractionRecord>& records,
                                 const PipelineSpec& spec, Client& client,
                                 const TemplateCatalog& catalog, const EmotionTaxonomy& taxonomy,
                                 const std::string& model, int workers) {
  std::vector<BatchItem> items(records.size());
  if (records.empty()) return items;
  workers = std::max(1, std::min<int>(workers, static_cast<int>(records.size())));

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < records.size(); i = next.fetch_add(1)) {
      items[i].record_id = records[i].id;
      try {
        items[i].profile = run_pipeline(records[i], spec, client, catalog, taxonomy, model);
      } catch (const RoundFailed& e) {
        items[i].error = e.what();
        // Keep the partial trace visible to callers that want it.
        StudentProfile partial;
        partial.record_id = records[i].id;
        partial.method = spec.method;
        partial.trace = e.trace();
        items[i].profile = std::move(partial);
      } catch (const std::exception& e) {
        items[i].error = e.what();
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return items;
}

nlohmann::json profile_to_json(const StudentProfile& profile, bool include_trace) {
  nlohmann::json j{{"record_id", profile.record_id}, {"method", to_string(profile.method)}};
  if (profile.tone) j["tone"] = to_string(*profile.tone);
  if (profile.emotion) j["emotion"] = *profile.emotion;
  if (profile.engagement) j["engagement"] = to_string(*profile.engagement);
  if (profile.behavior) {
    j["behavior"] = {{"confusion", profile.behavior->confusion},
                     {"frustration", profile.behavior->frustration}};
  }
  if (include_trace) {
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& round : profile.trace) {
      nlohmann::json r{{"round_index", round.round_index},
                       {"template_id", round.template_id},
                       {"prompt", round.prompt},
                       {"completion",
                        {{"text", round.completion.text},
                         {"model", round.completion.model},
                         {"cached", round.completion.cached}}}};
      if (round.parsed) r["parsed"] = round.parsed->value_string();
      if (!round.error.empty()) r["error"] = round.error;
      trace.push_back(std::move(r));
    }
    j["trace"] = std::move(trace);
  }
  return j;
}

}  // namespace eduaffect
