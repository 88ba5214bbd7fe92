#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace eduaffect {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// One invalid line found while loading a dataset.
// kind is one of "MalformedLine", "DuplicateId", "UnknownLabel".
struct LineError {
  std::size_t line = 0;  // 1-based
  std::string kind;
  std::string detail;
};

class DatasetLoadError : public Error {
 public:
  explicit DatasetLoadError(std::vector<LineError> errors)
      : Error(summarize(errors)), errors_(std::move(errors)) {}

  const std::vector<LineError>& errors() const { return errors_; }

 private:
  static std::string summarize(const std::vector<LineError>& errs) {
    std::string msg = "dataset load failed with " + std::to_string(errs.size()) + " error(s)";
    if (!errs.empty()) {
      msg += "; first: line " + std::to_string(errs.front().line) + " " + errs.front().kind +
             ": " + errs.front().detail;
    }
    return msg;
  }

  std::vector<LineError> errors_;
};

class MissingSlotValue : public Error {
 public:
  explicit MissingSlotValue(std::string slot)
      : Error("missing value for slot '" + slot + "'"), slot_(std::move(slot)) {}
  const std::string& slot() const { return slot_; }

 private:
  std::string slot_;
};

class ProviderError : public Error {
 public:
  ProviderError(int status, std::string body)
      : Error("provider error, status " + std::to_string(status) + ": " + body),
        status_(status),
        body_(std::move(body)) {}
  int status() const { return status_; }
  const std::string& body() const { return body_; }

 private:
  int status_;
  std::string body_;
};

class AuthMissing : public Error {
 public:
  explicit AuthMissing(std::string env_var)
      : Error("API key environment variable '" + env_var + "' is not set"),
        env_var_(std::move(env_var)) {}
  const std::string& env_var() const { return env_var_; }

 private:
  std::string env_var_;
};

class TimeoutError : public Error {
 public:
  using Error::Error;
};

class Unparseable : public Error {
 public:
  explicit Unparseable(std::string text)
      : Error("unparseable completion: " + text), text_(std::move(text)) {}
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

class Ambiguous : public Error {
 public:
  explicit Ambiguous(std::vector<std::string> labels)
      : Error(summarize(labels)), labels_(std::move(labels)) {}
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  static std::string summarize(const std::vector<std::string>& labels) {
    std::string msg = "ambiguous completion, candidate labels:";
    for (const auto& l : labels) msg += " " + l;
    return msg;
  }

  std::vector<std::string> labels_;
};

class OutOfRange : public Error {
 public:
  explicit OutOfRange(double value)
      : Error("score out of range: " + std::to_string(value)), value_(value) {}
  double value() const { return value_; }

 private:
  double value_;
};

class MissingGold : public Error {
 public:
  explicit MissingGold(std::string record_id)
      : Error("no gold label for record '" + record_id + "'"), record_id_(std::move(record_id)) {}
  const std::string& record_id() const { return record_id_; }

 private:
  std::string record_id_;
};

class ConflictUnresolvable : public Error {
 public:
  using Error::Error;
};

}  // namespace eduaffect
