#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "eduaffect/corpus.hpp"
#include "eduaffect/errors.hpp"
#include "eduaffect/labels.hpp"
#include "eduaffect/parse.hpp"

namespace testutil {

inline std::filesystem::path fixtures_dir() { return EDU_FIXTURES_DIR; }

inline std::filesystem::path fixture(const std::string& name) { return fixtures_dir() / name; }

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct TempDir {
  std::filesystem::path path;

  TempDir() {
    auto base = std::filesystem::temp_directory_path();
    std::mt19937_64 rng{std::random_device{}()};
    path = base / ("eduaffect-test-" + std::to_string(rng()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

struct CmdResult {
  int exit_code = -1;
  std::string out;
};

// Runs a shell command, capturing stdout; stderr goes to err_file if given.
inline CmdResult run_cmd(const std::string& cmd, const std::string& err_file = "/dev/null") {
  CmdResult result;
  std::string full = cmd + " 2>" + err_file;
  FILE* pipe = popen(full.c_str(), "r");
  if (!pipe) return result;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) result.out.append(buf, n);
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

// Deterministic synthetic-record generator mirroring the mock backend's
// keyword rules; gold labels are derived with the same rules the oracle
// dataset generator uses, independently of the library under test.
struct RecordGen {
  std::mt19937 rng;

  explicit RecordGen(unsigned seed) : rng(seed) {}

  eduaffect::InteractionRecord make(const std::string& id, const std::string& context) {
    static const std::vector<std::pair<std::string, std::string>> pool = {
        {"frustration", "This worksheet is making me feel frustrated."},
        {"confusion", "I am confused by the second example."},
        {"boredom", "The review session felt boring today."},
        {"anxiety", "I am anxious about the midterm."},
        {"joy", "I really enjoy these group discussions."},
        {"neutral", "I turned in my draft yesterday."},
    };
    auto& [label, text] = pool[rng() % pool.size()];
    eduaffect::InteractionRecord record;
    record.id = id;
    record.text = text;
    record.modality = static_cast<eduaffect::Modality>(rng() % 3);
    record.context = context;
    eduaffect::GoldLabels gold;
    gold.emotion = label;
    record.gold = gold;
    return record;
  }
};

struct CorpusRunResult {
  std::size_t total = 0;
  std::size_t failures = 0;
  std::vector<std::string> messages;
};

// Runs the committed parser regression corpus against the live parsers.
inline CorpusRunResult run_parser_corpus(const std::filesystem::path& path) {
  using namespace eduaffect;
  CorpusRunResult result;
  EmotionTaxonomy taxonomy = EmotionTaxonomy::default_taxonomy();
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++result.total;
    nlohmann::json j = nlohmann::json::parse(line);
    std::string parser = j.at("parser");
    std::string text = j.at("text");

    std::string got_error;
    nlohmann::json got;
    try {
      if (parser == "emotion") {
        got = parse_emotion(text, taxonomy);
      } else if (parser == "engagement") {
        got = to_string(parse_engagement(text));
      } else if (parser == "behavior") {
        BehaviorFlags flags = parse_behavior(text);
        got = {{"confusion", flags.confusion}, {"frustration", flags.frustration}};
      } else if (parser == "tone") {
        got = to_string(parse_tone(text));
      } else if (parser == "judge") {
        got = parse_judge_score(text).value;
      } else {
        got_error = "unknown parser kind";
      }
    } catch (const Unparseable&) {
      got_error = "Unparseable";
    } catch (const Ambiguous&) {
      got_error = "Ambiguous";
    } catch (const OutOfRange&) {
      got_error = "OutOfRange";
    }

    bool ok;
    if (j.contains("expect_error")) {
      ok = got_error == j.at("expect_error").get<std::string>();
    } else {
      ok = got_error.empty() && got == j.at("expect");
    }
    if (!ok) {
      ++result.failures;
      result.messages.push_back(parser + " fixture failed: " + text);
    }
  }
  return result;
}

}  // namespace testutil
