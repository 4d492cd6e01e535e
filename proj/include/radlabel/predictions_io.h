#ifndef RADLABEL_PREDICTIONS_IO_H_
#define RADLABEL_PREDICTIONS_IO_H_

#include <map>
#include <string>

#include "radlabel/schema.h"
#include "radlabel/types.h"

namespace radlabel {

// Predictions JSONL: one object per report,
//   {"report_id", "labeler", "decisions": {...}, "status", "uncertain"?}
// Error-ledger entries carry "status": "error" and a "reason" instead of
// decisions.
void write_predictions(const PredictionSet &set, const std::string &path);
PredictionSet read_predictions(const std::string &path);

// Labels CSV: report_id followed by one 0/1 column per label in schema order.
// Reading accepts any subset of the schema's label columns.
void write_reference_csv(const ReferenceLabels &labels, const std::string &path,
                         const LabelSchema &schema = LabelSchema::Default());
ReferenceLabels read_reference_csv(const std::string &path,
                                   const LabelSchema &schema = LabelSchema::Default());

}  // namespace radlabel

#endif  // RADLABEL_PREDICTIONS_IO_H_
