#ifndef RADLABEL_METRICS_H_
#define RADLABEL_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "radlabel/schema.h"
#include "radlabel/types.h"

namespace radlabel {

using BinarySeries = std::vector<std::uint8_t>;

enum class KappaBand { kPoor, kSlight, kFair, kModerate, kSubstantial, kAlmostPerfect };

const char *to_string(KappaBand band);

// <0 poor, [0,.2] slight, (.2,.4] fair, (.4,.6] moderate, (.6,.8] substantial,
// (.8,1] almost perfect. Throws DataError outside [-1, 1].
KappaBand kappa_band(double kappa);

struct KappaResult {
  std::string label;
  double kappa = 0.0;
  KappaBand band = KappaBand::kPoor;
  // Chance agreement is 1 (both raters constant and equal); kappa is then
  // reported as 1 by convention.
  bool degenerate = false;
  double observed = 0.0;  // p_o
  double expected = 0.0;  // p_e
};

// Throws DataError on empty or unequal-length series.
KappaResult cohen_kappa(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
// Series keyed by report id; the id sets must match.
KappaResult cohen_kappa(const std::map<std::string, bool> &a,
                        const std::map<std::string, bool> &b);

// Linear-interpolation percentile, p in [0, 1]. Throws on empty input.
double percentile(std::vector<double> values, double p);

struct PairAgreement {
  std::string model_a;
  std::string model_b;
  bool available = false;  // false when the two sets share no report
  std::size_t reports = 0;
  std::vector<KappaResult> per_label;
  double median = 0.0;
  double iqr_low = 0.0;
  double iqr_high = 0.0;
};

// Every unordered pair (i < j) in input order, compared on the reports both
// members predicted.
std::vector<PairAgreement> pairwise_kappa_matrix(
    const std::vector<PredictionSet> &sets,
    const LabelSchema &schema = LabelSchema::Default());

// Looks a pair up in either order.
const PairAgreement *find_pair(const std::vector<PairAgreement> &pairs,
                               const std::string &a, const std::string &b);

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  // 2TP / (2TP + FP + FN); 0 with *zero_division set when undefined.
  double f1(bool *zero_division = nullptr) const;
  ConfusionCounts &operator+=(const ConfusionCounts &o);
  bool operator==(const ConfusionCounts &) const = default;
};

// Predictions and truth aligned row by row (reports) and column by column
// (labels). Reports the labeler errored on are listed in `excluded`.
struct EvalTable {
  std::vector<std::string> report_ids;
  std::vector<std::string> labels;
  std::vector<std::uint8_t> pred;   // row-major reports x labels
  std::vector<std::uint8_t> truth;  // same shape
  std::vector<std::string> excluded;

  std::size_t rows() const { return report_ids.size(); }
  std::size_t cols() const { return labels.size(); }
};

// Throws DataError when a truth report is neither predicted nor in the error
// ledger, or a requested label is missing.
EvalTable align_for_eval(const PredictionSet &pred, const ReferenceLabels &truth,
                         std::vector<std::string> labels = {},
                         const LabelSchema &schema = LabelSchema::Default());

struct LabelScore {
  std::string label;
  ConfusionCounts counts;
  double f1 = 0.0;
  bool zero_division = false;
};

struct F1Report {
  std::vector<LabelScore> per_label;
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  bool micro_zero_division = false;
  ConfusionCounts micro_counts;
  std::size_t evaluated = 0;
  std::vector<std::string> excluded;
};

// Per-label, macro and micro F1. The span overload scores a multiset of
// rows (repeats allowed, as in a bootstrap resample).
F1Report f1_scores(const EvalTable &table);
F1Report f1_scores(const EvalTable &table, std::span<const std::size_t> rows);
F1Report f1_scores(const PredictionSet &pred, const ReferenceLabels &truth,
                   const std::vector<std::string> &labels = {});

struct MetricWithCI {
  double point = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int resamples = 0;
  std::uint64_t seed = 0;
  double level = 0.95;
};

// A metric over a multiset of table rows.
using RowMetric =
    std::function<double(const EvalTable &, std::span<const std::size_t>)>;

// Percentile bootstrap: each resample draws rows() indices with replacement
// from stream (seed, resample index) and evaluates every metric on them.
// Returns one MetricWithCI per metric. Throws DataError if resamples < 1.
std::vector<MetricWithCI> bootstrap_ci(const std::vector<RowMetric> &metrics,
                                       const EvalTable &table, int resamples,
                                       std::uint64_t seed, double level = 0.95,
                                       int threads = 1);
MetricWithCI bootstrap_ci(const RowMetric &metric, const EvalTable &table,
                          int resamples, std::uint64_t seed, double level = 0.95);

// Convenience metrics over an EvalTable.
RowMetric macro_f1_metric();
RowMetric micro_f1_metric();
RowMetric label_f1_metric(std::size_t column);

struct ThresholdResult {
  double threshold = 0.5;
  double f1 = 0.0;
  bool degenerate = false;  // constant scores
};

// Sweeps {0, 1} plus midpoints between adjacent distinct scores; a score
// >= threshold predicts positive. Ties go to the lowest threshold.
ThresholdResult select_threshold(std::span<const double> scores,
                                 std::span<const std::uint8_t> truth);
std::map<std::string, ThresholdResult> select_thresholds(
    const std::map<std::string, std::vector<double>> &scores,
    const std::map<std::string, BinarySeries> &truth);

struct PrevalenceRow {
  std::string label;
  std::size_t count = 0;
  std::size_t total = 0;
  double rate = 0.0;
};

std::vector<PrevalenceRow> prevalence_table(
    const std::map<std::string, LabelVector> &labels,
    const LabelSchema &schema = LabelSchema::Default());

// CSV writers; floats carry six decimals.
void write_metrics_csv(const F1Report &report, const std::vector<MetricWithCI> *label_cis,
                       const MetricWithCI *macro_ci, const MetricWithCI *micro_ci,
                       const std::string &path);
void write_kappa_csv(const std::vector<PairAgreement> &pairs, const std::string &path);
void write_prevalence_csv(const std::vector<PrevalenceRow> &rows, const std::string &path);

}  // namespace radlabel

#endif  // RADLABEL_METRICS_H_
