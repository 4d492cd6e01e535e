#ifndef RADLABEL_ANNOTATE_H_
#define RADLABEL_ANNOTATE_H_

#include <cstdint>
#include <cstdio>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "radlabel/schema.h"
#include "radlabel/types.h"

namespace radlabel {

enum class ReportStatus { kPending, kDone, kSkipped };

const char *to_string(ReportStatus status);

struct AnnotationSession {
  std::string session_id;
  std::string annotator_id;
  std::vector<std::string> queue;
  std::vector<ReportStatus> status;  // parallel to queue
  std::size_t cursor = 0;            // first pending position, queue.size() when none

  std::size_t count(ReportStatus s) const;
  // Report under the cursor, if any is still pending.
  std::optional<std::string> next() const;
};

// Wire shape shared by the log and the HTTP API:
//   {"report_id", "annotator_id", "labels": {label: "negative" | "positive" |
//    "subjective_mention"}, "note"?, "label_notes"?: {label: text}, "sequence"?}
nlohmann::json annotation_to_json(const TriStateAnnotation &a);
TriStateAnnotation annotation_from_json(const nlohmann::json &j);
nlohmann::json session_to_json(const AnnotationSession &s);

// Empty iff `a` covers exactly the schema labels. Otherwise one message
// naming the missing and unknown labels.
std::string annotation_coverage_error(const TriStateAnnotation &a, const LabelSchema &schema);

// Append-only JSONL event log of sessions, annotations and skips, with an
// in-memory index rebuilt from the log on open. Every mutating call is
// serialized and flushed to disk before it returns.
class AnnotationStore {
 public:
  // `known_reports`, when non-empty, restricts which ids sessions may hold.
  explicit AnnotationStore(std::string log_path,
                           std::set<std::string> known_reports = {},
                           const LabelSchema &schema = LabelSchema::Default());
  ~AnnotationStore();
  AnnotationStore(const AnnotationStore &) = delete;
  AnnotationStore &operator=(const AnnotationStore &) = delete;

  // Throws DataError for an empty list, duplicate ids or unknown ids (all
  // unknown ids are listed).
  AnnotationSession start_session(const std::string &annotator_id,
                                  const std::vector<std::string> &report_ids);
  // Latest session of `annotator_id` whose queue equals `report_ids`.
  std::optional<AnnotationSession> find_session(const std::string &annotator_id,
                                                const std::vector<std::string> &report_ids) const;
  std::optional<AnnotationSession> session(const std::string &session_id) const;
  std::vector<AnnotationSession> sessions() const;

  // Validates coverage, stamps the annotator and sequence, appends, marks the
  // report done. Throws DataError (unknown session, report outside the
  // queue, annotator mismatch, coverage) without touching the log.
  TriStateAnnotation submit(const std::string &session_id, TriStateAnnotation annotation);
  void skip(const std::string &session_id, const std::string &report_id);

  // Every annotation in log order.
  std::vector<TriStateAnnotation> annotations() const;
  const std::string &path() const { return path_; }
  const std::vector<std::string> &warnings() const { return warnings_; }

 private:
  void replay();
  void apply(const nlohmann::json &event);
  void append(nlohmann::json event);
  AnnotationSession &session_ref(const std::string &session_id);

  std::string path_;
  std::set<std::string> known_;
  const LabelSchema &schema_;
  std::FILE *file_ = nullptr;
  mutable std::mutex mu_;
  std::uint64_t sequence_ = 0;
  std::map<std::string, AnnotationSession> sessions_;
  std::vector<std::string> session_order_;
  std::vector<TriStateAnnotation> annotations_;
  std::vector<std::string> warnings_;
};

enum class ViewKind { kActionable, kMention };

const char *to_string(ViewKind kind);
ViewKind parse_view_kind(const std::string &name);

// Latest annotation per report (optionally for one annotator), mapped to
// binary labels: positive -> 1, negative -> 0, subjective_mention -> 0 in
// the actionable view and 1 in the mention view.
ReferenceLabels derive_view(const std::vector<TriStateAnnotation> &log, ViewKind kind,
                            const std::optional<std::string> &annotator = std::nullopt,
                            const LabelSchema &schema = LabelSchema::Default());

// Labels CSV of a view; see write_reference_csv.
void export_reference(const ReferenceLabels &view, const std::string &path,
                      const LabelSchema &schema = LabelSchema::Default());
std::string reference_csv_text(const ReferenceLabels &view,
                               const LabelSchema &schema = LabelSchema::Default());

struct SubjectivityRow {
  std::string label;
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::size_t subjective = 0;

  std::size_t total() const { return positive + negative + subjective; }
  double subjective_rate() const;
};

// Per-label tri-state distribution over the latest annotation of every
// (report, annotator) pair, in schema order.
std::vector<SubjectivityRow> subjectivity_report(const std::vector<TriStateAnnotation> &log,
                                                 const LabelSchema &schema = LabelSchema::Default());
void write_subjectivity_csv(const std::vector<SubjectivityRow> &rows, const std::string &path);

}  // namespace radlabel

#endif  // RADLABEL_ANNOTATE_H_
