#include "radlabel/llm.h"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <thread>

#include "json.hpp"
#include "radlabel/errors.h"
#include "radlabel/text.h"

namespace radlabel {

using nlohmann::json;

void PromptConfig::apply_environment() {
  if (base_url.empty()) {
    if (const char *env = std::getenv("RL_LLM_BASE_URL")) base_url = env;
  }
  if (api_key.empty()) {
    if (const char *env = std::getenv("RL_LLM_API_KEY")) api_key = env;
  }
}

void PromptConfig::validate() const {
  if (temperature && (*temperature < 0.0 || *temperature > 2.0)) {
    throw DataError("temperature must lie in [0, 2]");
  }
  if (max_attempts < 1) throw DataError("max attempts must be at least 1");
  if (concurrency < 1) throw DataError("concurrency must be at least 1");
  if (max_tokens && *max_tokens < 1) throw DataError("max tokens must be positive");
}

std::string classification_system_prompt(const LabelSchema &schema) {
  std::vector<std::string> listed;
  for (const OrganSystem &organ : schema.organs()) {
    for (const std::string &label : organ.disease_labels) listed.push_back(label);
    for (const std::string &label : organ.prompt_only_labels) listed.push_back(label);
    listed.push_back(organ.normal_label);
  }
  std::string out =
      "You are an honest radiology report classifier. Identify if only the disease "
      "labels in the provided DISEASE_LIST are present in the report.\n\nDISEASE_LIST: [";
  for (std::size_t i = 0; i < listed.size(); ++i) {
    out += (i ? ", '" : "'") + listed[i] + "'";
  }
  out +=
      "].\n\nDo not hallucinate. Respond True if disease label is present, False if not. "
      "JSON format output template:\n\n{\n  'ID': Subject ID,\n  Decisions: {\n";
  const std::vector<std::string> &labels = schema.labels();
  constexpr std::size_t kPerLine = 4;
  for (std::size_t i = 0; i < labels.size(); i += kPerLine) {
    out += "    ";
    for (std::size_t k = i; k < std::min(labels.size(), i + kPerLine); ++k) {
      out += (k > i ? ", '" : "'") + labels[k] + "': True/False";
    }
    out += i + kPerLine < labels.size() ? ",\n" : "\n";
  }
  out +=
      "  }\n}.\n\nRespond only in JSON dictionary. Do not use other variables. Do not "
      "give explanation. End generation after JSON dictionary is created.";
  return out;
}

Prompt build_prompt(const ReportRecord &record, const LabelSchema &schema) {
  if (!record.findings) {
    throw DataError("report '" + record.report_id + "' has no findings");
  }
  return {classification_system_prompt(schema),
          "Subject ID: " + record.report_id + "\nFindings:\n" + *record.findings};
}

const char *to_string(ParseStatus status) {
  switch (status) {
    case ParseStatus::kStrict: return "strict";
    case ParseStatus::kSalvaged: return "salvaged";
    case ParseStatus::kFailed: return "failed";
  }
  return "failed";
}

ParseOutcome parse_strict(const std::string &raw, const LabelSchema &schema) {
  ParseOutcome out;
  json doc;
  try {
    doc = json::parse(raw);
  } catch (const json::parse_error &) {
    out.reason = "not a JSON document";
    return out;
  }
  if (!doc.is_object() || doc.size() != 2 || !doc.contains("ID") ||
      !doc.contains("Decisions")) {
    out.reason = "expected exactly the keys ID and Decisions";
    return out;
  }
  const json &id = doc["ID"];
  if (id.is_string()) {
    out.pseudo_id = id.get<std::string>();
  } else if (id.is_number_integer()) {
    out.pseudo_id = std::to_string(id.get<long long>());
  } else {
    out.reason = "ID is neither a string nor an integer";
    return out;
  }
  const json &decisions = doc["Decisions"];
  if (!decisions.is_object() || decisions.size() != schema.labels().size()) {
    out.reason = "Decisions must hold exactly the schema labels";
    return out;
  }
  for (const std::string &label : schema.labels()) {
    auto it = decisions.find(label);
    if (it == decisions.end() || !it->is_boolean()) {
      out.reason = "missing or non-boolean '" + label + "'";
      return out;
    }
    out.vector.decisions[label] = it->get<bool>();
  }
  for (const OrganSystem &organ : schema.organs()) out.vector.uncertain[organ.name] = false;
  out.ok = true;
  return out;
}

namespace {

std::string regex_escape(const std::string &text) {
  static const std::string kSpecial = R"(\^$.|?*+()[]{}/)";
  std::string out;
  for (char c : text) {
    if (kSpecial.find(c) != std::string::npos) out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

ParseOutcome parse_salvage(const std::string &raw, const LabelSchema &schema) {
  ParseOutcome out;
  std::vector<std::string> missing;
  for (const std::string &label : schema.labels()) {
    const std::regex pattern(
        R"((?:^|[^A-Za-z0-9_])['"]?)" + regex_escape(label) +
        R"(['"]?\s*[:=]\s*['"]?(True|False|true|false|1|0)['"]?(?=$|[^A-Za-z0-9_/.]|\.(?![0-9])))");
    std::optional<bool> value;
    int hits = 0;
    for (auto it = std::sregex_iterator(raw.begin(), raw.end(), pattern);
         it != std::sregex_iterator(); ++it) {
      const std::string token = (*it)[1].str();
      bool v = token == "True" || token == "true" || token == "1";
      if (value && *value != v) {
        out.reason = "conflict:" + label;
        return out;
      }
      value = v;
      ++hits;
    }
    if (!value) {
      missing.push_back(label);
      continue;
    }
    if (hits > 1) {
      out.reason = "duplicate:" + label;
      return out;
    }
    out.vector.decisions[label] = *value;
  }
  if (!missing.empty()) {
    out.reason = "missing:";
    for (std::size_t i = 0; i < missing.size(); ++i) {
      out.reason += (i ? "," : "") + missing[i];
    }
    out.vector = {};
    return out;
  }
  for (const OrganSystem &organ : schema.organs()) out.vector.uncertain[organ.name] = false;
  out.ok = true;
  return out;
}

std::string serialize_decisions(const LabelVector &v, const std::string &id,
                                const LabelSchema &schema) {
  json decisions = json::object();
  for (const std::string &label : schema.labels()) decisions[label] = v.get(label);
  return json{{"ID", id}, {"Decisions", std::move(decisions)}}.dump();
}

namespace {

struct Outcome {
  RawCompletion completion;
  std::optional<LabelVector> vector;
  bool transport_failure = false;
};

Outcome label_one(const ReportRecord &input, CompletionBackend &backend,
                  const PromptConfig &config, const LabelSchema &schema) {
  Outcome result;
  RawCompletion &c = result.completion;
  c.report_id = input.report_id;
  ReportRecord record = input.findings_state == FindingsState::kUnsectioned
                            ? extract_findings(input)
                            : input;
  if (!record.findings) {
    c.reason = "no-findings";
    return result;
  }
  const Prompt prompt = build_prompt(record, schema);
  auto delay = config.backoff;
  for (c.attempts = 1;; ++c.attempts) {
    try {
      c.raw = backend.complete(prompt);
      break;
    } catch (const TransportError &e) {
      if (!e.retryable() || c.attempts >= config.max_attempts) {
        c.reason = std::string("transport: ") + e.what();
        result.transport_failure = true;
        return result;
      }
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
  }

  ParseOutcome strict = parse_strict(c.raw, schema);
  if (strict.ok && strict.pseudo_id == record.report_id) {
    c.status = ParseStatus::kStrict;
    result.vector = std::move(strict.vector);
    return result;
  }
  if (strict.ok) c.warning = "id-mismatch";
  ParseOutcome salvage = parse_salvage(c.raw, schema);
  if (salvage.ok) {
    c.status = ParseStatus::kSalvaged;
    result.vector = std::move(salvage.vector);
  } else if (strict.ok) {
    c.status = ParseStatus::kSalvaged;
    result.vector = std::move(strict.vector);
  } else {
    c.status = ParseStatus::kFailed;
    c.reason = salvage.reason;
  }
  return result;
}

}  // namespace

LlmRun llm_label_corpus(const Corpus &corpus, CompletionBackend &backend,
                        const PromptConfig &config, const LabelSchema &schema,
                        const std::string &labeler_name) {
  config.validate();
  const std::size_t n = corpus.reports.size();
  std::vector<Outcome> outcomes(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      outcomes[i] = label_one(corpus.reports[i], backend, config, schema);
    }
  };
  const std::size_t threads =
      std::min<std::size_t>(static_cast<std::size_t>(config.concurrency), n);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread &t : pool) t.join();

  LlmRun run;
  run.predictions.labeler_name = labeler_name;
  for (Outcome &o : outcomes) {
    const std::string &id = o.completion.report_id;
    if (o.vector) {
      run.predictions.predictions[id] = std::move(*o.vector);
      run.predictions.status[id] = to_string(o.completion.status);
    } else {
      std::string reason = o.completion.reason;
      if (o.completion.status == ParseStatus::kFailed && !o.transport_failure &&
          reason != "no-findings") {
        reason = "parse: " + reason;
      }
      run.predictions.errors.push_back({id, reason});
    }
    if (o.transport_failure) ++run.transport_failures;
    run.completions.push_back(std::move(o.completion));
  }
  return run;
}

void write_audit_log(const std::vector<RawCompletion> &completions,
                     const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  for (const RawCompletion &c : completions) {
    json row = {{"report_id", c.report_id},
                {"raw", c.raw},
                {"status", to_string(c.status)},
                {"attempts", c.attempts}};
    if (!c.reason.empty()) row["reason"] = c.reason;
    if (!c.warning.empty()) row["warning"] = c.warning;
    out << row.dump() << '\n';
  }
}

}  // namespace radlabel
