#ifndef RADLABEL_LLM_H_
#define RADLABEL_LLM_H_

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "radlabel/ingest.h"
#include "radlabel/schema.h"
#include "radlabel/types.h"

namespace radlabel {

struct PromptConfig {
  std::string model;
  std::optional<double> temperature;  // unset: endpoint default
  std::optional<int> max_tokens;
  std::string base_url;  // e.g. http://localhost:8000/v1
  std::string api_key;
  int max_attempts = 3;
  std::chrono::milliseconds backoff{200};  // doubled after every failed attempt
  int concurrency = 4;
  std::chrono::seconds timeout{120};

  static constexpr double kLowTemperature = 0.1;

  // Fills base_url and api_key from RL_LLM_BASE_URL / RL_LLM_API_KEY when
  // they are empty.
  void apply_environment();
  // Throws DataError when temperature or attempt/concurrency bounds are off.
  void validate() const;
};

struct Prompt {
  std::string system;
  std::string user;
};

// Zero-shot classification instructions listing the schema's labels and the
// JSON answer template.
std::string classification_system_prompt(const LabelSchema &schema);

// Throws DataError when the record has no findings.
Prompt build_prompt(const ReportRecord &record, const LabelSchema &schema);

enum class ParseStatus { kStrict, kSalvaged, kFailed };
const char *to_string(ParseStatus status);

struct ParseOutcome {
  bool ok = false;
  LabelVector vector;
  std::string pseudo_id;  // strict parses only
  std::string reason;     // failure reason when !ok
};

// Accepts exactly one JSON object {"ID": ..., "Decisions": {15 booleans}}.
ParseOutcome parse_strict(const std::string &raw, const LabelSchema &schema);

// Pulls "<Label>" <sep> <True|False|true|false|1|0> pairs out of free text.
// Fails with "missing:<labels>", "conflict:<label>" or "duplicate:<label>".
ParseOutcome parse_salvage(const std::string &raw, const LabelSchema &schema);

// Strict-parsable rendering of a vector.
std::string serialize_decisions(const LabelVector &v, const std::string &id,
                                const LabelSchema &schema);

struct RawCompletion {
  std::string report_id;
  std::string raw;
  ParseStatus status = ParseStatus::kFailed;
  int attempts = 0;
  std::string reason;   // why parsing or transport failed
  std::string warning;  // e.g. "id-mismatch"
};

// One chat-completion call. Implementations throw TransportError, marked
// non-retryable for failures a retry cannot fix.
class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  virtual std::string complete(const Prompt &prompt) = 0;
};

// POSTs {model, messages, temperature} to <base_url>/chat/completions with a
// bearer token and returns choices[0].message.content.
std::unique_ptr<CompletionBackend> make_http_backend(const PromptConfig &config);

struct LlmRun {
  PredictionSet predictions;
  std::vector<RawCompletion> completions;  // corpus order
  int transport_failures = 0;
};

// Labels every report through the backend with at most config.concurrency
// calls in flight. Transport errors are retried with exponential backoff;
// parse failures never are.
LlmRun llm_label_corpus(const Corpus &corpus, CompletionBackend &backend,
                        const PromptConfig &config, const LabelSchema &schema,
                        const std::string &labeler_name);

void write_audit_log(const std::vector<RawCompletion> &completions,
                     const std::string &path);

}  // namespace radlabel

#endif  // RADLABEL_LLM_H_
