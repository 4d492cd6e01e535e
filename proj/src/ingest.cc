#include "radlabel/ingest.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>

#include "json.hpp"
#include "radlabel/errors.h"
#include "radlabel/text.h"

namespace radlabel {

using nlohmann::json;

const ReportRecord *Corpus::find(const std::string &report_id) const {
  for (const ReportRecord &r : reports) {
    if (r.report_id == report_id) return &r;
  }
  return nullptr;
}

ReportFormat parse_report_format(const std::string &name) {
  if (name == "jsonl") return ReportFormat::kJsonl;
  if (name == "csv") return ReportFormat::kCsv;
  throw DataError("unknown report format '" + name + "'");
}

ColumnMapping ColumnMapping::Load(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DataError("mapping: cannot open " + path);
  ColumnMapping mapping;
  try {
    json doc = json::parse(in);
    static const std::set<std::string> kFields = {"report_id", "patient_id",
                                                  "text", "findings"};
    for (const auto &[source, field] : doc.items()) {
      std::string name = field.get<std::string>();
      if (!kFields.count(name)) {
        throw DataError("mapping: unknown canonical field '" + name + "'");
      }
      mapping.source_to_field[source] = name;
    }
  } catch (const json::exception &e) {
    throw DataError("mapping: " + path + ": " + e.what());
  }
  return mapping;
}

std::string ColumnMapping::field_for(const std::string &column) const {
  auto it = source_to_field.find(column);
  return it == source_to_field.end() ? column : it->second;
}

namespace {

std::string scalar_to_string(const json &value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  if (value.is_null()) return "";
  return value.dump();
}

// Builds a record from canonical fields; returns an error message instead
// when a required field is missing.
std::string make_record(std::map<std::string, std::string> fields,
                        bool has_findings, ReportRecord *out) {
  if (fields["text"].empty() && has_findings) fields["text"] = fields["findings"];
  for (const char *required : {"report_id", "patient_id", "text"}) {
    if (fields[required].empty()) {
      return std::string("missing field '") + required + "'";
    }
  }
  out->report_id = fields["report_id"];
  out->patient_id = fields["patient_id"];
  out->raw_text = fields["text"];
  if (has_findings && !fields["findings"].empty()) {
    if (out->raw_text.find(fields["findings"]) == std::string::npos) {
      return "findings is not contained in text";
    }
    out->findings = fields["findings"];
    out->findings_state = FindingsState::kPresent;
  }
  return "";
}

}  // namespace

LoadResult load_reports(const std::string &path, ReportFormat format,
                        const ColumnMapping &mapping) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open reports file " + path);
  LoadResult result;
  result.corpus.source = path;
  std::set<std::string> seen;

  auto accept = [&](std::size_t line, std::map<std::string, std::string> fields,
                    bool has_findings) {
    ReportRecord record;
    std::string problem = make_record(std::move(fields), has_findings, &record);
    if (!problem.empty()) {
      result.row_errors.push_back({line, problem});
      return;
    }
    if (!seen.insert(record.report_id).second) {
      throw DataError("duplicate report_id '" + record.report_id + "' (line " +
                      std::to_string(line) + ")");
    }
    result.corpus.reports.push_back(std::move(record));
  };

  if (format == ReportFormat::kJsonl) {
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
      ++number;
      if (trim(line).empty()) continue;
      json row;
      try {
        row = json::parse(line);
      } catch (const json::parse_error &e) {
        result.row_errors.push_back({number, std::string("invalid JSON: ") + e.what()});
        continue;
      }
      if (!row.is_object()) {
        result.row_errors.push_back({number, "row is not a JSON object"});
        continue;
      }
      std::map<std::string, std::string> fields;
      bool has_findings = false;
      for (const auto &[key, value] : row.items()) {
        std::string field = mapping.field_for(key);
        if (field == "findings" && !value.is_null()) has_findings = true;
        fields[field] = scalar_to_string(value);
      }
      accept(number, std::move(fields), has_findings);
    }
  } else {
    std::vector<CsvRecord> records = read_csv(in);
    if (!records.empty()) {
      std::vector<std::string> header;
      for (const std::string &column : records.front().fields) {
        header.push_back(mapping.field_for(std::string(trim(column))));
      }
      for (std::size_t r = 1; r < records.size(); ++r) {
        const CsvRecord &rec = records[r];
        if (rec.fields.size() != header.size()) {
          result.row_errors.push_back(
              {rec.line, "expected " + std::to_string(header.size()) +
                             " fields, got " + std::to_string(rec.fields.size())});
          continue;
        }
        std::map<std::string, std::string> fields;
        bool has_findings = false;
        for (std::size_t c = 0; c < header.size(); ++c) {
          if (header[c] == "findings") has_findings = true;
          fields[header[c]] = rec.fields[c];
        }
        accept(rec.line, std::move(fields), has_findings);
      }
    }
  }
  if (result.corpus.reports.empty() && result.row_errors.empty()) {
    result.warnings.push_back("no reports found in " + path);
  }
  return result;
}

namespace {

const char *state_name(FindingsState state) {
  switch (state) {
    case FindingsState::kUnsectioned: return "unsectioned";
    case FindingsState::kPresent: return "present";
    case FindingsState::kMissing: return "missing";
  }
  return "unsectioned";
}

FindingsState parse_state(const std::string &name) {
  if (name == "present") return FindingsState::kPresent;
  if (name == "missing") return FindingsState::kMissing;
  if (name == "unsectioned") return FindingsState::kUnsectioned;
  throw DataError("unknown findings_state '" + name + "'");
}

}  // namespace

void write_corpus(const Corpus &corpus, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  for (const ReportRecord &r : corpus.reports) {
    json row = {{"report_id", r.report_id},
                {"patient_id", r.patient_id},
                {"text", r.raw_text},
                {"findings", r.findings ? json(*r.findings) : json(nullptr)},
                {"findings_state", state_name(r.findings_state)}};
    out << row.dump() << '\n';
  }
}

Corpus read_corpus(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus " + path);
  Corpus corpus;
  corpus.source = path;
  std::set<std::string> seen;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    try {
      json row = json::parse(line);
      ReportRecord r;
      r.report_id = scalar_to_string(row.at("report_id"));
      r.patient_id = scalar_to_string(row.at("patient_id"));
      r.raw_text = row.at("text").get<std::string>();
      if (row.contains("findings") && !row["findings"].is_null()) {
        r.findings = row["findings"].get<std::string>();
      }
      r.findings_state = row.contains("findings_state")
                             ? parse_state(row["findings_state"].get<std::string>())
                             : (r.findings ? FindingsState::kPresent
                                           : FindingsState::kUnsectioned);
      if (!seen.insert(r.report_id).second) {
        throw DataError("duplicate report_id '" + r.report_id + "'");
      }
      corpus.reports.push_back(std::move(r));
    } catch (const json::exception &e) {
      throw DataError(path + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return corpus;
}

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

struct HeaderHit {
  std::size_t begin = std::string::npos;  // start of the alias
  std::size_t content = 0;                // first byte after the header
};

// Earliest occurrence at or after `from` of any alias used as a section
// header: either "ALIAS:" or the alias alone on its own line.
HeaderHit find_header(const std::string &lower, std::size_t from,
                      const std::vector<std::string> &aliases) {
  HeaderHit best;
  for (const std::string &alias_raw : aliases) {
    std::string alias = to_lower(alias_raw);
    std::size_t pos = from;
    while ((pos = lower.find(alias, pos)) != std::string::npos) {
      std::size_t after = pos + alias.size();
      bool left_ok = pos == 0 || !is_word_char(lower[pos - 1]);
      bool right_ok = after >= lower.size() || !is_word_char(lower[after]);
      if (left_ok && right_ok) {
        std::size_t k = after;
        while (k < lower.size() && (lower[k] == ' ' || lower[k] == '\t')) ++k;
        std::size_t content = std::string::npos;
        if (k < lower.size() && lower[k] == ':') {
          content = k + 1;
        } else if (k >= lower.size() || lower[k] == '\n' || lower[k] == '\r') {
          std::size_t line_start = lower.rfind('\n', pos == 0 ? 0 : pos - 1);
          line_start = (line_start == std::string::npos || pos == 0) ? 0 : line_start + 1;
          if (trim(std::string_view(lower).substr(line_start, pos - line_start)).empty()) {
            content = k;
          }
        }
        if (content != std::string::npos) {
          if (pos < best.begin) best = {pos, content};
          break;
        }
      }
      pos = after;
    }
  }
  return best;
}

}  // namespace

ReportRecord extract_findings(ReportRecord record, const SectionConfig &config) {
  const std::string lower = to_lower(record.raw_text);
  HeaderHit header = find_header(lower, 0, config.findings_headers);
  if (header.begin == std::string::npos) {
    record.findings.reset();
    record.findings_state = FindingsState::kMissing;
    return record;
  }
  HeaderHit stop = find_header(lower, header.content, config.terminator_headers);
  std::size_t end = stop.begin == std::string::npos ? lower.size() : stop.begin;
  std::string_view body =
      std::string_view(record.raw_text).substr(header.content, end - header.content);
  record.findings = std::string(trim(body));
  record.findings_state = FindingsState::kPresent;
  return record;
}

std::vector<Sentence> segment_sentences(std::string_view findings,
                                        const SegmenterConfig &config) {
  std::vector<Sentence> sentences;
  std::set<std::string> protect;
  for (const std::string &a : config.protected_abbreviations) protect.insert(to_lower(a));

  auto emit = [&](std::size_t begin, std::size_t end) {
    while (begin < end && std::isspace(static_cast<unsigned char>(findings[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(findings[end - 1]))) --end;
    if (begin == end) return;
    Sentence s;
    s.text = std::string(findings.substr(begin, end - begin));
    s.index = sentences.size();
    s.begin = begin;
    s.end = end;
    sentences.push_back(std::move(s));
  };

  std::size_t start = 0;
  for (std::size_t i = 0; i < findings.size(); ++i) {
    char c = findings[i];
    if (c == '\n' && config.split_on_newlines) {
      emit(start, i);
      start = i + 1;
      continue;
    }
    if (c != '.' && c != '!' && c != '?') continue;
    bool at_boundary = i + 1 == findings.size() ||
                       std::isspace(static_cast<unsigned char>(findings[i + 1]));
    if (!at_boundary) continue;
    if (c == '.') {
      std::size_t w = i;
      while (w > start && !std::isspace(static_cast<unsigned char>(findings[w - 1]))) --w;
      std::string word = to_lower(findings.substr(w, i + 1 - w));
      if (protect.count(word)) continue;
      // "1. " opening a sentence is a list marker.
      std::string_view digits = findings.substr(w, i - w);
      bool numbered = !digits.empty() && digits.size() <= 3 &&
                      std::all_of(digits.begin(), digits.end(), [](char d) {
                        return std::isdigit(static_cast<unsigned char>(d));
                      }) &&
                      trim(findings.substr(start, w - start)).empty();
      if (numbered) continue;
    }
    emit(start, i + 1);
    start = i + 1;
  }
  emit(start, findings.size());
  return sentences;
}

std::vector<TermScore> tfidf_suggest_terms(const Corpus &corpus,
                                           std::size_t top_k,
                                           const TfidfOptions &options) {
  if (corpus.reports.empty()) throw DataError("tfidf: corpus is empty");
  if (top_k == 0) throw DataError("tfidf: top_k must be at least 1");
  std::set<std::string> stop;
  for (const std::string &w : options.stopwords) stop.insert(to_lower(w));

  std::unordered_map<std::string, std::size_t> tf;
  std::unordered_map<std::string, std::size_t> df;
  for (const ReportRecord &r : corpus.reports) {
    const std::string &text = r.findings ? *r.findings : r.raw_text;
    std::vector<Token> tokens = word_tokens(text);
    std::set<std::string> in_doc;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const std::string &t = tokens[i].text;
      if (stop.count(t)) continue;
      ++tf[t];
      in_doc.insert(t);
      if (options.include_bigrams && i + 1 < tokens.size() &&
          !stop.count(tokens[i + 1].text)) {
        std::string bigram = t + " " + tokens[i + 1].text;
        ++tf[bigram];
        in_doc.insert(bigram);
      }
    }
    for (const std::string &t : in_doc) ++df[t];
  }

  const double n = static_cast<double>(corpus.reports.size());
  std::vector<TermScore> scores;
  scores.reserve(tf.size());
  for (const auto &[term, count] : tf) {
    double freq = static_cast<double>(count);
    double idf = std::log((1.0 + n) / (1.0 + static_cast<double>(df[term])));
    scores.push_back({term, freq * idf + freq, df[term], count});
  }
  std::sort(scores.begin(), scores.end(), [](const TermScore &a, const TermScore &b) {
    if (a.tfidf != b.tfidf) return a.tfidf > b.tfidf;
    return a.term < b.term;
  });
  if (scores.size() > top_k) scores.resize(top_k);
  return scores;
}

}  // namespace radlabel
