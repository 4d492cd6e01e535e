#ifndef RADLABEL_SAMPLING_H_
#define RADLABEL_SAMPLING_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "radlabel/ingest.h"
#include "radlabel/schema.h"
#include "radlabel/types.h"

namespace radlabel {

enum class Side { kTrain, kTest };

const char *to_string(Side side);

struct LabelDeviation {
  std::string label;
  double overall_rate = 0.0;  // positive reports / all reports
  double test_rate = 0.0;     // positive test reports / test reports
  double deviation = 0.0;     // |test_rate - overall_rate|
};

struct SplitAssignment {
  std::map<std::string, Side> patient_side;
  std::map<std::string, Side> report_side;
  std::vector<LabelDeviation> deviations;
  std::vector<std::string> warnings;

  double max_deviation() const;
};

// Patient-level iterative stratification. Each pass takes the label with the
// fewest positive reports among unassigned patients and places those patients
// (in seeded order) on the side with the larger remaining demand for it,
// breaking ties by remaining capacity and then by the seed. Patients without
// positives fill remaining capacity last. Throws DataError if a report has no
// labels or train_fraction is outside (0, 1).
SplitAssignment stratified_patient_split(const Corpus &corpus, const ReferenceLabels &labels,
                                         double train_fraction, std::uint64_t seed,
                                         const LabelSchema &schema = LabelSchema::Default());

// report_id,patient_id,side in corpus order.
void write_split_csv(const SplitAssignment &split, const Corpus &corpus,
                     const std::string &path);
// label,overall_rate,test_rate,deviation.
void write_deviation_csv(const SplitAssignment &split, const std::string &path);

// Category letter for an index: A, B, ... Z, then "C26", "C27", ...
std::string category_letter(int index);

// Category index sum_i pred_i * 2^(k-1-i) over the k sets, for every report
// predicted (not errored) by all of them.
std::map<std::string, int> combination_assign(const std::vector<PredictionSet> &preds,
                                              const std::string &label);

struct CategoryPrevalence {
  int index = 0;
  std::string letter;
  std::vector<int> pattern;  // one bit per model, first model first
  double average_prevalence = 0.0;  // percent, mean over labels
};

struct DisagreementSample {
  std::vector<std::string> report_ids;  // sorted, unique
  std::vector<std::string> models;
  std::vector<std::string> labels;
  std::vector<std::vector<std::size_t>> category_counts;  // [label][category]
  std::size_t covered = 0;                                // reports in every set
  std::vector<CategoryPrevalence> prevalence;
};

// For every label and category, a seeded uniform sample of
// min(quota, category size) reports; the union across labels is returned.
DisagreementSample sample_disagreement_set(const std::vector<PredictionSet> &preds,
                                           std::size_t quota, std::uint64_t seed,
                                           const LabelSchema &schema = LabelSchema::Default());

// Share of the all-zero plus all-one categories, in the table's unit.
double full_agreement_rate(const std::vector<CategoryPrevalence> &table);

// category,<model...>,average_prevalence (percent).
void write_category_prevalence_csv(const std::vector<CategoryPrevalence> &table,
                                   const std::vector<std::string> &models,
                                   const std::string &path);
std::vector<CategoryPrevalence> read_category_prevalence_csv(const std::string &path);

// Seeded uniform sample of n ids from `ids` minus `exclude`, without
// replacement, returned sorted. Throws DataError when n exceeds the pool.
std::vector<std::string> random_supplement(const std::vector<std::string> &ids,
                                           const std::set<std::string> &exclude,
                                           std::size_t n, std::uint64_t seed);

}  // namespace radlabel

#endif  // RADLABEL_SAMPLING_H_
