#ifndef RADLABEL_INGEST_H_
#define RADLABEL_INGEST_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "radlabel/types.h"

namespace radlabel {

struct Corpus {
  std::vector<ReportRecord> reports;
  std::string source;

  const ReportRecord *find(const std::string &report_id) const;
};

enum class ReportFormat { kJsonl, kCsv };

ReportFormat parse_report_format(const std::string &name);

// Renames source columns to canonical fields (report_id, patient_id, text,
// findings). Columns absent from the map are read under their own name.
struct ColumnMapping {
  std::map<std::string, std::string> source_to_field;

  static ColumnMapping Load(const std::string &path);
  std::string field_for(const std::string &column) const;
};

struct RowError {
  std::size_t line = 0;
  std::string message;
};

struct LoadResult {
  Corpus corpus;
  std::vector<RowError> row_errors;
  std::vector<std::string> warnings;
};

// Rows missing a required field become row errors; a duplicated report_id
// aborts the load with DataError.
LoadResult load_reports(const std::string &path, ReportFormat format,
                        const ColumnMapping &mapping = {});

// Sectioned corpus files written by the ingest step (JSONL, one record per
// line, findings_state preserved).
void write_corpus(const Corpus &corpus, const std::string &path);
Corpus read_corpus(const std::string &path);

struct SectionConfig {
  std::vector<std::string> findings_headers = {"FINDINGS", "FINDING"};
  std::vector<std::string> terminator_headers = {
      "IMPRESSION", "IMPRESSIONS", "CONCLUSION", "CONCLUSIONS",
      "RECOMMENDATION", "RECOMMENDATIONS"};
};

// Sets findings to the trimmed text between the first Findings header and the
// next terminator header. Without a Findings header the record comes back
// with findings_state == kMissing.
ReportRecord extract_findings(ReportRecord record,
                              const SectionConfig &config = {});

struct Sentence {
  std::string text;
  std::size_t index = 0;
  std::size_t begin = 0;  // span into the findings text
  std::size_t end = 0;
};

struct SegmenterConfig {
  // Tokens (lowercase, with their trailing period) that never end a sentence.
  std::vector<std::string> protected_abbreviations = {
      "dr.", "vs.", "approx.", "e.g.", "i.e.", "cf.", "mr.", "mrs.", "ms.",
      "st.", "fig.", "etc.", "incl.", "hx.", "pt."};
  bool split_on_newlines = true;
};

std::vector<Sentence> segment_sentences(std::string_view findings,
                                        const SegmenterConfig &config = {});

struct TermScore {
  std::string term;
  double tfidf = 0.0;
  std::size_t document_frequency = 0;
  std::size_t term_frequency = 0;
};

struct TfidfOptions {
  bool include_bigrams = false;
  std::vector<std::string> stopwords;
};

// score(t) = tf(t) * ln((1 + N) / (1 + df(t))) + tf(t), tf summed over the
// corpus. Uses the findings text when present, the raw text otherwise.
std::vector<TermScore> tfidf_suggest_terms(const Corpus &corpus,
                                           std::size_t top_k,
                                           const TfidfOptions &options = {});

}  // namespace radlabel

#endif  // RADLABEL_INGEST_H_
