#include "radlabel/metrics.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <thread>

#include "radlabel/errors.h"
#include "radlabel/random.h"
#include "radlabel/text.h"

namespace radlabel {

const char *to_string(KappaBand band) {
  switch (band) {
    case KappaBand::kPoor: return "poor";
    case KappaBand::kSlight: return "slight";
    case KappaBand::kFair: return "fair";
    case KappaBand::kModerate: return "moderate";
    case KappaBand::kSubstantial: return "substantial";
    case KappaBand::kAlmostPerfect: return "almost perfect";
  }
  return "poor";
}

KappaBand kappa_band(double kappa) {
  constexpr double kSlack = 1e-12;
  if (std::isnan(kappa) || kappa < -1.0 - kSlack || kappa > 1.0 + kSlack) {
    throw DataError("kappa out of range: " + std::to_string(kappa));
  }
  if (kappa < 0.0) return KappaBand::kPoor;
  if (kappa <= 0.20) return KappaBand::kSlight;
  if (kappa <= 0.40) return KappaBand::kFair;
  if (kappa <= 0.60) return KappaBand::kModerate;
  if (kappa <= 0.80) return KappaBand::kSubstantial;
  return KappaBand::kAlmostPerfect;
}

KappaResult cohen_kappa(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) throw DataError("kappa: series lengths differ");
  if (a.empty()) throw DataError("kappa: empty series");
  std::size_t both = 0, only_a = 0, only_b = 0, neither = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool x = a[i] != 0;
    const bool y = b[i] != 0;
    if (x && y) ++both;
    else if (x) ++only_a;
    else if (y) ++only_b;
    else ++neither;
  }
  const double n = static_cast<double>(a.size());
  KappaResult r;
  r.observed = static_cast<double>(both + neither) / n;
  const double a1 = static_cast<double>(both + only_a) / n;
  const double b1 = static_cast<double>(both + only_b) / n;
  r.expected = a1 * b1 + (1.0 - a1) * (1.0 - b1);
  const std::size_t all = a.size();
  const bool chance_certain = (both == all) || (neither == all);
  if (chance_certain) {
    r.degenerate = true;
    r.expected = 1.0;
    r.kappa = r.observed == 1.0 ? 1.0 : 0.0;
  } else {
    r.kappa = (r.observed - r.expected) / (1.0 - r.expected);
  }
  r.band = kappa_band(std::clamp(r.kappa, -1.0, 1.0));
  return r;
}

KappaResult cohen_kappa(const std::map<std::string, bool> &a,
                        const std::map<std::string, bool> &b) {
  if (a.size() != b.size()) throw DataError("kappa: series cover different reports");
  BinarySeries x, y;
  auto ib = b.begin();
  for (auto ia = a.begin(); ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first) {
      throw DataError("kappa: unaligned report ids '" + ia->first + "' / '" + ib->first + "'");
    }
    x.push_back(ia->second);
    y.push_back(ib->second);
  }
  return cohen_kappa(x, y);
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw DataError("percentile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

namespace {

// Labels present in a vector, in schema order, then any others by name.
std::vector<std::string> ordered_labels(const LabelVector &v, const LabelSchema &schema) {
  std::vector<std::string> out;
  for (const std::string &label : schema.labels()) {
    if (v.decisions.count(label)) out.push_back(label);
  }
  for (const auto &[label, value] : v.decisions) {
    if (!schema.contains(label)) out.push_back(label);
  }
  return out;
}

bool lookup(const LabelVector &v, const std::string &label, const std::string &id) {
  auto it = v.decisions.find(label);
  if (it == v.decisions.end()) {
    throw DataError("report '" + id + "' has no decision for '" + label + "'");
  }
  return it->second;
}

}  // namespace

std::vector<PairAgreement> pairwise_kappa_matrix(const std::vector<PredictionSet> &sets,
                                                 const LabelSchema &schema) {
  if (sets.size() < 2) throw DataError("agreement needs at least 2 prediction sets");
  std::vector<PairAgreement> pairs;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sets.size(); ++j) {
      const PredictionSet &a = sets[i];
      const PredictionSet &b = sets[j];
      PairAgreement pair;
      pair.model_a = a.labeler_name;
      pair.model_b = b.labeler_name;
      std::vector<std::string> shared;
      for (const auto &[id, v] : a.predictions) {
        if (b.predictions.count(id)) shared.push_back(id);
      }
      pair.reports = shared.size();
      if (shared.empty()) {
        pairs.push_back(std::move(pair));
        continue;
      }
      pair.available = true;
      std::vector<double> kappas;
      for (const std::string &label :
           ordered_labels(a.predictions.at(shared.front()), schema)) {
        BinarySeries x, y;
        for (const std::string &id : shared) {
          x.push_back(lookup(a.predictions.at(id), label, id));
          y.push_back(lookup(b.predictions.at(id), label, id));
        }
        KappaResult k = cohen_kappa(x, y);
        k.label = label;
        kappas.push_back(k.kappa);
        pair.per_label.push_back(std::move(k));
      }
      pair.median = percentile(kappas, 0.5);
      pair.iqr_low = percentile(kappas, 0.25);
      pair.iqr_high = percentile(kappas, 0.75);
      pairs.push_back(std::move(pair));
    }
  }
  return pairs;
}

const PairAgreement *find_pair(const std::vector<PairAgreement> &pairs,
                               const std::string &a, const std::string &b) {
  for (const PairAgreement &p : pairs) {
    if ((p.model_a == a && p.model_b == b) || (p.model_a == b && p.model_b == a)) {
      return &p;
    }
  }
  return nullptr;
}

double ConfusionCounts::f1(bool *zero_division) const {
  const std::size_t denom = 2 * tp + fp + fn;
  if (zero_division) *zero_division = denom == 0;
  if (denom == 0) return 0.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

ConfusionCounts &ConfusionCounts::operator+=(const ConfusionCounts &o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  return *this;
}

EvalTable align_for_eval(const PredictionSet &pred, const ReferenceLabels &truth,
                         std::vector<std::string> labels, const LabelSchema &schema) {
  EvalTable table;
  if (labels.empty() && !truth.empty()) {
    labels = ordered_labels(truth.begin()->second, schema);
  }
  table.labels = labels;
  for (const auto &[id, truth_vector] : truth) {
    auto it = pred.predictions.find(id);
    if (it == pred.predictions.end()) {
      if (pred.has_error(id)) {
        table.excluded.push_back(id);
        continue;
      }
      throw DataError("reference report '" + id + "' missing from predictions '" +
                      pred.labeler_name + "'");
    }
    table.report_ids.push_back(id);
    for (const std::string &label : labels) {
      table.pred.push_back(lookup(it->second, label, id));
      table.truth.push_back(lookup(truth_vector, label, id));
    }
  }
  return table;
}

namespace {

F1Report score_rows(const EvalTable &table, const std::size_t *rows, std::size_t count,
                    bool all_rows) {
  const std::size_t cols = table.cols();
  F1Report report;
  report.excluded = table.excluded;
  std::vector<ConfusionCounts> counts(cols);
  const std::size_t n = all_rows ? table.rows() : count;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t r = all_rows ? k : rows[k];
    const std::uint8_t *p = &table.pred[r * cols];
    const std::uint8_t *t = &table.truth[r * cols];
    for (std::size_t c = 0; c < cols; ++c) {
      if (p[c] && t[c]) ++counts[c].tp;
      else if (p[c]) ++counts[c].fp;
      else if (t[c]) ++counts[c].fn;
      else ++counts[c].tn;
    }
  }
  report.evaluated = n;
  double sum = 0.0;
  for (std::size_t c = 0; c < cols; ++c) {
    LabelScore s;
    s.label = table.labels[c];
    s.counts = counts[c];
    s.f1 = counts[c].f1(&s.zero_division);
    sum += s.f1;
    report.micro_counts += counts[c];
    report.per_label.push_back(std::move(s));
  }
  report.macro_f1 = cols ? sum / static_cast<double>(cols) : 0.0;
  report.micro_f1 = report.micro_counts.f1(&report.micro_zero_division);
  return report;
}

}  // namespace

F1Report f1_scores(const EvalTable &table) { return score_rows(table, nullptr, 0, true); }

F1Report f1_scores(const EvalTable &table, std::span<const std::size_t> rows) {
  return score_rows(table, rows.data(), rows.size(), false);
}

F1Report f1_scores(const PredictionSet &pred, const ReferenceLabels &truth,
                   const std::vector<std::string> &labels) {
  return f1_scores(align_for_eval(pred, truth, labels));
}

RowMetric macro_f1_metric() {
  return [](const EvalTable &t, std::span<const std::size_t> rows) {
    return f1_scores(t, rows).macro_f1;
  };
}

RowMetric micro_f1_metric() {
  return [](const EvalTable &t, std::span<const std::size_t> rows) {
    return f1_scores(t, rows).micro_f1;
  };
}

RowMetric label_f1_metric(std::size_t column) {
  return [column](const EvalTable &t, std::span<const std::size_t> rows) {
    ConfusionCounts c;
    const std::size_t cols = t.cols();
    for (std::size_t r : rows) {
      const bool p = t.pred[r * cols + column];
      const bool y = t.truth[r * cols + column];
      if (p && y) ++c.tp;
      else if (p) ++c.fp;
      else if (y) ++c.fn;
      else ++c.tn;
    }
    return c.f1();
  };
}

std::vector<MetricWithCI> bootstrap_ci(const std::vector<RowMetric> &metrics,
                                       const EvalTable &table, int resamples,
                                       std::uint64_t seed, double level, int threads) {
  if (resamples < 1) throw DataError("bootstrap needs at least 1 resample");
  if (!(level > 0.0 && level < 1.0)) throw DataError("confidence level must be in (0, 1)");
  const std::size_t n = table.rows();
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});

  std::vector<MetricWithCI> out(metrics.size());
  for (std::size_t m = 0; m < metrics.size(); ++m) {
    out[m].point = metrics[m](table, all);
    out[m].resamples = resamples;
    out[m].seed = seed;
    out[m].level = level;
  }
  if (n == 0) {
    for (MetricWithCI &ci : out) ci.ci_low = ci.ci_high = ci.point;
    return out;
  }

  // values[m][r]; each resample owns its slot, so workers never collide.
  std::vector<std::vector<double>> values(metrics.size(),
                                          std::vector<double>(resamples));
  auto run = [&](int first, int step) {
    std::vector<std::size_t> rows(n);
    for (int r = first; r < resamples; r += step) {
      std::mt19937_64 rng = stream_rng(seed, static_cast<std::uint64_t>(r));
      for (std::size_t k = 0; k < n; ++k) rows[k] = uniform_below(rng, n);
      for (std::size_t m = 0; m < metrics.size(); ++m) {
        values[m][r] = metrics[m](table, rows);
      }
    }
  };
  threads = std::max(1, std::min(threads, resamples));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(run, t, threads);
  run(0, threads);
  for (std::thread &t : pool) t.join();

  const double tail = (1.0 - level) / 2.0;
  for (std::size_t m = 0; m < metrics.size(); ++m) {
    out[m].ci_low = percentile(values[m], tail);
    out[m].ci_high = percentile(values[m], 1.0 - tail);
  }
  return out;
}

MetricWithCI bootstrap_ci(const RowMetric &metric, const EvalTable &table, int resamples,
                          std::uint64_t seed, double level) {
  return bootstrap_ci(std::vector<RowMetric>{metric}, table, resamples, seed, level).front();
}

namespace {

double f1_at(std::span<const double> scores, std::span<const std::uint8_t> truth,
             double threshold) {
  ConfusionCounts c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool p = scores[i] >= threshold;
    const bool y = truth[i] != 0;
    if (p && y) ++c.tp;
    else if (p) ++c.fp;
    else if (y) ++c.fn;
    else ++c.tn;
  }
  return c.f1();
}

}  // namespace

ThresholdResult select_threshold(std::span<const double> scores,
                                 std::span<const std::uint8_t> truth) {
  if (scores.size() != truth.size()) throw DataError("scores and truth are not aligned");
  for (double s : scores) {
    if (!(s >= 0.0 && s <= 1.0)) throw DataError("score outside [0, 1]");
  }
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  ThresholdResult best;
  if (sorted.size() <= 1) {
    best.degenerate = true;
    best.threshold = 0.5;
    best.f1 = f1_at(scores, truth, 0.5);
    return best;
  }
  std::vector<double> candidates = {0.0, 1.0};
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    candidates.push_back((sorted[i] + sorted[i + 1]) / 2.0);
  }
  std::sort(candidates.begin(), candidates.end());
  best.f1 = -1.0;
  for (double t : candidates) {
    const double f = f1_at(scores, truth, t);
    if (f > best.f1) {
      best.f1 = f;
      best.threshold = t;
    }
  }
  return best;
}

std::map<std::string, ThresholdResult> select_thresholds(
    const std::map<std::string, std::vector<double>> &scores,
    const std::map<std::string, BinarySeries> &truth) {
  std::map<std::string, ThresholdResult> out;
  for (const auto &[label, series] : scores) {
    auto it = truth.find(label);
    if (it == truth.end()) throw DataError("no truth series for '" + label + "'");
    out[label] = select_threshold(series, it->second);
  }
  return out;
}

std::vector<PrevalenceRow> prevalence_table(const std::map<std::string, LabelVector> &labels,
                                            const LabelSchema &schema) {
  std::vector<PrevalenceRow> rows;
  for (const std::string &label : schema.labels()) {
    PrevalenceRow row;
    row.label = label;
    row.total = labels.size();
    for (const auto &[id, v] : labels) row.count += v.get(label);
    row.rate = row.total ? static_cast<double>(row.count) / static_cast<double>(row.total)
                         : 0.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::ofstream open_out(const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

}  // namespace

void write_metrics_csv(const F1Report &report, const std::vector<MetricWithCI> *label_cis,
                       const MetricWithCI *macro_ci, const MetricWithCI *micro_ci,
                       const std::string &path) {
  std::ofstream out = open_out(path);
  write_csv_row(out, {"label", "tp", "fp", "fn", "tn", "f1", "ci_low", "ci_high"});
  auto counts = [](const ConfusionCounts &c) {
    return std::vector<std::string>{std::to_string(c.tp), std::to_string(c.fp),
                                    std::to_string(c.fn), std::to_string(c.tn)};
  };
  auto ci = [](const MetricWithCI *m) {
    return m ? std::vector<std::string>{format_fixed(m->ci_low), format_fixed(m->ci_high)}
             : std::vector<std::string>{"", ""};
  };
  for (std::size_t i = 0; i < report.per_label.size(); ++i) {
    const LabelScore &s = report.per_label[i];
    std::vector<std::string> row = {s.label};
    for (std::string &c : counts(s.counts)) row.push_back(std::move(c));
    row.push_back(format_fixed(s.f1));
    for (std::string &c : ci(label_cis ? &(*label_cis)[i] : nullptr)) row.push_back(std::move(c));
    write_csv_row(out, row);
  }
  std::vector<std::string> macro = {"macro", "", "", "", "", format_fixed(report.macro_f1)};
  for (std::string &c : ci(macro_ci)) macro.push_back(std::move(c));
  write_csv_row(out, macro);
  std::vector<std::string> micro = {"micro"};
  for (std::string &c : counts(report.micro_counts)) micro.push_back(std::move(c));
  micro.push_back(format_fixed(report.micro_f1));
  for (std::string &c : ci(micro_ci)) micro.push_back(std::move(c));
  write_csv_row(out, micro);
}

void write_kappa_csv(const std::vector<PairAgreement> &pairs, const std::string &path) {
  std::ofstream out = open_out(path);
  write_csv_row(out, {"model_a", "model_b", "label", "kappa", "band", "median", "iqr_low",
                      "iqr_high", "degenerate"});
  for (const PairAgreement &p : pairs) {
    if (!p.available) {
      write_csv_row(out, {p.model_a, p.model_b, "(summary)", "", "unavailable", "", "", "", ""});
      continue;
    }
    for (const KappaResult &k : p.per_label) {
      write_csv_row(out, {p.model_a, p.model_b, k.label, format_fixed(k.kappa),
                          to_string(k.band), "", "", "", k.degenerate ? "1" : "0"});
    }
    write_csv_row(out, {p.model_a, p.model_b, "(summary)", "",
                        to_string(kappa_band(p.median)), format_fixed(p.median),
                        format_fixed(p.iqr_low), format_fixed(p.iqr_high), ""});
  }
}

void write_prevalence_csv(const std::vector<PrevalenceRow> &rows, const std::string &path) {
  std::ofstream out = open_out(path);
  write_csv_row(out, {"label", "count", "total", "rate"});
  for (const PrevalenceRow &r : rows) {
    write_csv_row(out, {r.label, std::to_string(r.count), std::to_string(r.total),
                        format_fixed(r.rate)});
  }
}

}  // namespace radlabel
