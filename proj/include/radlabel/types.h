#ifndef RADLABEL_TYPES_H_
#define RADLABEL_TYPES_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "radlabel/schema.h"

namespace radlabel {

enum class FindingsState {
  kUnsectioned,  // sectioning has not run yet
  kPresent,
  kMissing,      // no Findings header was found
};

struct ReportRecord {
  std::string report_id;
  std::string patient_id;
  std::string raw_text;
  std::optional<std::string> findings;
  FindingsState findings_state = FindingsState::kUnsectioned;

  bool operator==(const ReportRecord &) const = default;
};

// Binary decisions keyed by canonical label, plus per-organ uncertainty.
struct LabelVector {
  std::map<std::string, bool> decisions;
  std::map<std::string, bool> uncertain;

  bool get(const std::string &label) const;
  bool is_uncertain(const std::string &organ) const;

  bool operator==(const LabelVector &) const = default;
};

// All-zero vector over every label of the schema, no uncertainty.
LabelVector empty_vector(const LabelSchema &schema);

struct PredictionError {
  std::string report_id;
  std::string reason;

  bool operator==(const PredictionError &) const = default;
};

// One labeler's output over a corpus. Reports either carry a prediction or
// sit in the error ledger, never both.
struct PredictionSet {
  std::string labeler_name;
  std::map<std::string, LabelVector> predictions;
  // Optional per-report provenance ("strict", "salvaged", "rule"...).
  std::map<std::string, std::string> status;
  std::vector<PredictionError> errors;

  bool has_error(const std::string &report_id) const;
  // Every report id seen by the labeler, predictions and errors alike.
  std::vector<std::string> all_ids() const;

  bool operator==(const PredictionSet &) const = default;
};

// Reference (ground-truth) labels keyed by report id.
using ReferenceLabels = std::map<std::string, LabelVector>;

enum class TriState { kNegative, kPositive, kSubjectiveMention };

const char *to_string(TriState value);
// Throws DataError for anything other than the three canonical spellings.
TriState parse_tristate(const std::string &text);

struct TriStateAnnotation {
  std::string report_id;
  std::string annotator_id;
  std::map<std::string, TriState> labels;
  std::string note;
  std::map<std::string, std::string> label_notes;
  std::uint64_t sequence = 0;  // assigned by the log on append

  bool operator==(const TriStateAnnotation &) const = default;
};

// Restricts every prediction to `keep`. Throws DataError naming the first
// label that is not canonical.
PredictionSet project_labels(const PredictionSet &pred,
                             const std::vector<std::string> &keep,
                             const LabelSchema &schema = LabelSchema::Default());

// Empty iff `v` covers exactly the schema labels, uncertain organs are all
// zero and no organ is both normal and diseased.
std::vector<std::string> validate_label_vector(const LabelVector &v,
                                               const LabelSchema &schema);

// Number of organs in `v` flagged normal while also carrying a disease.
int count_normal_conflicts(const LabelVector &v, const LabelSchema &schema);

}  // namespace radlabel

#endif  // RADLABEL_TYPES_H_
