#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "eduaffect/corpus.hpp"
#include "eduaffect/errors.hpp"
#include "eduaffect/llm.hpp"
#include "eduaffect/parse.hpp"
#include "eduaffect/prompts.hpp"

namespace eduaffect {

struct RoundResult {
  int round_index = 0;
  std::string template_id;
  std::string prompt;
  Completion completion;
  std::optional<ParsedRound> parsed;
  std::string error;  // set when the round failed; parsed is empty then
};

// Aggregated typed result for one record plus the full round trace.
struct StudentProfile {
  std::string record_id;
  Method method = Method::proposed;
  std::optional<ToneLabel> tone;
  std::optional<std::string> emotion;
  std::optional<EngagementLevel> engagement;
  std::optional<BehaviorFlags> behavior;
  std::vector<RoundResult> trace;
};

// Execution stops at the first unrecoverable error; the partial trace rides
// along in the exception.
class RoundFailed : public Error {
 public:
  RoundFailed(int round_index, const std::string& cause, std::vector<RoundResult> trace)
      : Error("round " + std::to_string(round_index) + " failed: " + cause),
        round_index_(round_index),
        cause_(cause),
        trace_(std::move(trace)) {}

  int round_index() const { return round_index_; }
  const std::string& cause() const { return cause_; }
  const std::vector<RoundResult>& trace() const { return trace_; }

 private:
  int round_index_;
  std::string cause_;
  std::vector<RoundResult> trace_;
};

struct ProfileFields {
  std::optional<ToneLabel> tone;
  std::optional<std::string> emotion;
  std::optional<EngagementLevel> engagement;
  std::optional<BehaviorFlags> behavior;
};

// Folds parsed rounds into profile fields. Specific beats general: the
// emotion round overrides tone-only inference; tone is kept as an auxiliary
// field. Throws ConflictUnresolvable when two rounds of the same task
// disagree.
ProfileFields aggregate(const std::vector<ParsedRound>& rounds);

// Runs the spec's rounds strictly in order, threading round k's parsed value
// into round k+1 as {{prior}}.
StudentProfile run_pipeline(const InteractionRecord& record, const PipelineSpec& spec,
                            Client& client, const TemplateCatalog& catalog,
                            const EmotionTaxonomy& taxonomy, const std::string& model);

struct BatchItem {
  std::string record_id;
  std::optional<StudentProfile> profile;
  std::string error;  // set when the whole pipeline failed for this record
};

// Processes records with a bounded worker pool; output order matches input
// order. Rounds within one record stay sequential.
std::vector<BatchItem> run_batch(const std::vector<InteractionRecord>& records,
                                 const PipelineSpec& spec, Client& client,
                                 const TemplateCatalog& catalog, const EmotionTaxonomy& taxonomy,
                                 const std::string& model, int workers = 1);

nlohmann::json profile_to_json(const StudentProfile& profile, bool include_trace = false);

}  // namespace eduaffect
