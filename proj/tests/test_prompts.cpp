#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "eduaffect/prompts.hpp"
#include "helpers.hpp"

using namespace eduaffect;

namespace {

const char* kCanonicalText =
    "I am really struggling to understand this topic, and it's making me feel frustrated.";
const char* kCanonicalPrompt =
    "Analyze the following student response and identify the primary emotion expressed: 'I am "
    "really struggling to understand this topic, and it's making me feel frustrated.'";

InteractionRecord canonical_record() {
  return InteractionRecord{"p1", kCanonicalText, Modality::written_response, "ref", std::nullopt};
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("builtin catalog carries the three prompt families") {
  TemplateCatalog catalog = TemplateCatalog::builtins();
  CHECK(catalog.get("emotion-v1").body.rfind(
            "Analyze the following student response and identify the primary emotion expressed:",
            0) == 0);
  CHECK(catalog.get("engagement-v1").body.rfind(
            "Evaluate the engagement level of the student based on their participation in the "
            "discussion:",
            0) == 0);
  CHECK(catalog.get("behavior-v1").body.rfind(
            "Identify signs of confusion or frustration in the student's question:", 0) == 0);
  CHECK(catalog.has("tone-v1"));
  for (const auto& suffix : {"-cot-v1"}) {
    for (const auto& task : {"emotion", "engagement", "behavior"}) {
      const auto& tmpl = catalog.get(std::string(task) + suffix);
      CHECK(tmpl.body.find("Think step by step") != std::string::npos);
      CHECK(tmpl.body.find("Answer: X") != std::string::npos);
    }
  }
}

TEST_CASE("every builtin body contains {{text}} exactly once") {
  TemplateCatalog catalog = TemplateCatalog::builtins();
  for (const auto& id : catalog.ids()) {
    CHECK(count(catalog.get(id).body, "{{text}}") == 1);
  }
}

TEST_CASE("emotion-v1 renders the canonical example prompt verbatim") {
  TemplateCatalog catalog = TemplateCatalog::builtins();
  std::string rendered = render_prompt(catalog.get("emotion-v1"), canonical_record(),
                                       EmotionTaxonomy::default_taxonomy());
  CHECK(rendered == kCanonicalPrompt);
}

TEST_CASE("a prior reaches the round-2 prompt") {
  TemplateCatalog catalog = TemplateCatalog::builtins();
  std::string rendered = render_prompt(catalog.get("emotion-v1"), canonical_record(),
                                       EmotionTaxonomy::default_taxonomy(), "negative");
  CHECK(rendered.find("negative") != std::string::npos);
  CHECK(rendered.find(kCanonicalText) != std::string::npos);
}

TEST_CASE("prior handling follows the slot rules") {
  EmotionTaxonomy taxonomy = EmotionTaxonomy::default_taxonomy();
  PromptTemplate no_prior{"t1", Task::emotion, Method::base, "Classify: '{{text}}'"};
  CHECK_NOTHROW(render_prompt(no_prior, canonical_record(), taxonomy));

  PromptTemplate with_prior{"t2", Task::emotion, Method::proposed,
                            "Tone was {{prior}}. Classify: '{{text}}'"};
  CHECK(render_prompt(with_prior, canonical_record(), taxonomy, "negative").find("Tone was negative") !=
        std::string::npos);
  try {
    render_prompt(with_prior, canonical_record(), taxonomy);
    FAIL("expected MissingSlotValue");
  } catch (const MissingSlotValue& e) {
    CHECK(e.slot() == "prior");
  }
}

TEST_CASE("taxonomy slot substitutes the label list") {
  PromptTemplate tmpl{"t3", Task::emotion, Method::base,
                      "Pick one of {{taxonomy}} for: '{{text}}'"};
  std::string rendered =
      render_prompt(tmpl, canonical_record(), EmotionTaxonomy::default_taxonomy());
  CHECK(rendered.find("joy, satisfaction, curiosity, confusion, frustration, anxiety, boredom, "
                      "neutral") != std::string::npos);
}

TEST_CASE("rendering is pure and embeds the text verbatim") {
  TemplateCatalog catalog = TemplateCatalog::builtins();
  EmotionTaxonomy taxonomy = EmotionTaxonomy::default_taxonomy();
  InteractionRecord record = canonical_record();
  for (const auto& id : catalog.ids()) {
    std::string a = render_prompt(catalog.get(id), record, taxonomy);
    std::string b = render_prompt(catalog.get(id), record, taxonomy);
    CHECK(a == b);
    CHECK(a.find(record.text) != std::string::npos);
    CHECK(a.size() >= record.text.size());
  }
}

TEST_CASE("build_pipeline round structure") {
  PipelineSpec proposed_emotion = build_pipeline(Method::proposed, Task::emotion);
  REQUIRE(proposed_emotion.rounds.size() == 2);
  CHECK(proposed_emotion.rounds[0] == "tone-v1");
  CHECK(proposed_emotion.rounds[1] == "emotion-v1");

  CHECK(build_pipeline(Method::base, Task::emotion).rounds.size() == 1);

  PipelineSpec full = build_pipeline(Method::proposed, Task::full_profile);
  CHECK(full.rounds == std::vector<std::string>{"tone-v1", "emotion-v1", "engagement-v1",
                                                "behavior-v1"});

  for (Task task : {Task::emotion, Task::engagement, Task::behavior, Task::tone}) {
    CHECK(build_pipeline(Method::base, task).rounds.size() == 1);
    CHECK(build_pipeline(Method::cot, task).rounds.size() == 1);
  }
}

TEST_CASE("templates load from a directory with front-matter") {
  testutil::TempDir dir;
  {
    std::ofstream out(dir.path / "custom.prompt");
    out << "id: custom-emotion\n"
        << "task: emotion\n"
        << "method: proposed\n"
        << "---\n"
        << "Pick one of {{taxonomy}}: '{{text}}'\n";
  }
  TemplateCatalog catalog = TemplateCatalog::builtins();
  catalog.load_directory(dir.path);
  const auto& tmpl = catalog.get("custom-emotion");
  CHECK(tmpl.task == Task::emotion);
  CHECK(render_prompt(tmpl, canonical_record(), EmotionTaxonomy::default_taxonomy())
            .find(kCanonicalText) != std::string::npos);
}

TEST_CASE("template validation rejects bad slot usage") {
  PromptTemplate missing_text{"bad1", Task::emotion, Method::base, "no slot here"};
  CHECK_THROWS_AS(missing_text.validate(), ConfigError);
  PromptTemplate double_text{"bad2", Task::emotion, Method::base, "{{text}} {{text}}"};
  CHECK_THROWS_AS(double_text.validate(), ConfigError);
  PromptTemplate unknown{"bad3", Task::emotion, Method::base, "{{text}} {{mood}}"};
  CHECK_THROWS_AS(unknown.validate(), ConfigError);
}

TEST_CASE("taxonomy invariants") {
  EmotionTaxonomy taxonomy = EmotionTaxonomy::default_taxonomy();
  CHECK_NOTHROW(taxonomy.validate());
  CHECK(taxonomy.contains("neutral"));

  EmotionTaxonomy no_neutral{{"joy"}};
  CHECK_THROWS_AS(no_neutral.validate(), ConfigError);
  EmotionTaxonomy duplicated{{"joy", "joy", "neutral"}};
  CHECK_THROWS_AS(duplicated.validate(), ConfigError);
  EmotionTaxonomy uppercase{{"Joy", "neutral"}};
  CHECK_THROWS_AS(uppercase.validate(), ConfigError);
}
