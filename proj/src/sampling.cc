#include "radlabel/sampling.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "radlabel/errors.h"
#include "radlabel/random.h"
#include "radlabel/text.h"

namespace radlabel {

const char *to_string(Side side) { return side == Side::kTrain ? "train" : "test"; }

double SplitAssignment::max_deviation() const {
  double worst = 0.0;
  for (const LabelDeviation &d : deviations) worst = std::max(worst, d.deviation);
  return worst;
}

namespace {

template <typename T>
void seeded_shuffle(std::vector<T> &items, std::mt19937_64 &rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[uniform_below(rng, i)]);
  }
}

struct Patient {
  std::string id;
  std::vector<std::size_t> reports;
  std::vector<int> positives;  // positive reports per label
  bool assigned = false;
};

}  // namespace

SplitAssignment stratified_patient_split(const Corpus &corpus, const ReferenceLabels &labels,
                                         double train_fraction, std::uint64_t seed,
                                         const LabelSchema &schema) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw DataError("train fraction must lie strictly between 0 and 1");
  }
  const std::vector<std::string> &names = schema.labels();
  const std::size_t k = names.size();

  std::map<std::string, std::size_t> by_id;
  std::vector<Patient> patients;
  std::vector<int> total_positive(k, 0);
  for (std::size_t r = 0; r < corpus.reports.size(); ++r) {
    const ReportRecord &rec = corpus.reports[r];
    auto lit = labels.find(rec.report_id);
    if (lit == labels.end()) {
      throw DataError("report '" + rec.report_id + "' has no labels");
    }
    auto [pit, fresh] = by_id.emplace(rec.patient_id, patients.size());
    if (fresh) patients.push_back({rec.patient_id, {}, std::vector<int>(k, 0)});
    Patient &p = patients[pit->second];
    p.reports.push_back(r);
    for (std::size_t l = 0; l < k; ++l) {
      if (lit->second.get(names[l])) {
        ++p.positives[l];
        ++total_positive[l];
      }
    }
  }

  SplitAssignment out;
  if (patients.size() == 1) {
    out.warnings.push_back("single patient: every report lands on one side");
  }

  std::mt19937_64 rng = stream_rng(seed, 0);
  seeded_shuffle(patients, rng);

  const double fraction[2] = {train_fraction, 1.0 - train_fraction};
  std::vector<double> demand[2];
  double capacity[2];
  for (int s = 0; s < 2; ++s) {
    demand[s].resize(k);
    for (std::size_t l = 0; l < k; ++l) demand[s][l] = fraction[s] * total_positive[l];
    capacity[s] = fraction[s] * static_cast<double>(corpus.reports.size());
  }

  auto place = [&](Patient &p, int s) {
    p.assigned = true;
    out.patient_side[p.id] = s == 0 ? Side::kTrain : Side::kTest;
    for (std::size_t l = 0; l < k; ++l) demand[s][l] -= p.positives[l];
    capacity[s] -= static_cast<double>(p.reports.size());
  };
  auto pick = [&](double a, double b) -> int {
    if (a != b) return a > b ? 0 : 1;
    if (capacity[0] != capacity[1]) return capacity[0] > capacity[1] ? 0 : 1;
    return static_cast<int>(uniform_below(rng, 2));
  };

  for (;;) {
    std::vector<int> remaining(k, 0);
    for (const Patient &p : patients) {
      if (p.assigned) continue;
      for (std::size_t l = 0; l < k; ++l) remaining[l] += p.positives[l] > 0;
    }
    std::size_t label = k;
    for (std::size_t l = 0; l < k; ++l) {
      if (remaining[l] > 0 && (label == k || remaining[l] < remaining[label])) label = l;
    }
    if (label == k) break;
    for (Patient &p : patients) {
      if (p.assigned || p.positives[label] == 0) continue;
      place(p, pick(demand[0][label], demand[1][label]));
    }
  }
  for (Patient &p : patients) {
    if (!p.assigned) place(p, pick(capacity[0], capacity[1]));
  }

  std::size_t test_reports = 0;
  std::vector<int> test_positive(k, 0);
  for (const Patient &p : patients) {
    const Side side = out.patient_side.at(p.id);
    for (std::size_t r : p.reports) out.report_side[corpus.reports[r].report_id] = side;
    if (side != Side::kTest) continue;
    test_reports += p.reports.size();
    for (std::size_t l = 0; l < k; ++l) test_positive[l] += p.positives[l];
  }
  const double n = static_cast<double>(corpus.reports.size());
  for (std::size_t l = 0; l < k; ++l) {
    LabelDeviation d;
    d.label = names[l];
    d.overall_rate = n > 0 ? total_positive[l] / n : 0.0;
    d.test_rate = test_reports ? static_cast<double>(test_positive[l]) / test_reports : 0.0;
    d.deviation = std::abs(d.test_rate - d.overall_rate);
    out.deviations.push_back(std::move(d));
  }
  if (test_reports == 0 || test_reports == corpus.reports.size()) {
    out.warnings.push_back("one side of the split is empty");
  }
  return out;
}

namespace {

std::ofstream open_out(const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

}  // namespace

void write_split_csv(const SplitAssignment &split, const Corpus &corpus,
                     const std::string &path) {
  std::ofstream out = open_out(path);
  write_csv_row(out, {"report_id", "patient_id", "side"});
  for (const ReportRecord &r : corpus.reports) {
    write_csv_row(out, {r.report_id, r.patient_id, to_string(split.report_side.at(r.report_id))});
  }
}

void write_deviation_csv(const SplitAssignment &split, const std::string &path) {
  std::ofstream out = open_out(path);
  write_csv_row(out, {"label", "overall_rate", "test_rate", "deviation"});
  for (const LabelDeviation &d : split.deviations) {
    write_csv_row(out, {d.label, format_fixed(d.overall_rate), format_fixed(d.test_rate),
                        format_fixed(d.deviation)});
  }
}

std::string category_letter(int index) {
  if (index < 0) throw DataError("negative category index");
  if (index < 26) return std::string(1, static_cast<char>('A' + index));
  return "C" + std::to_string(index);
}

namespace {

constexpr std::size_t kMaxModels = 16;

bool decision(const LabelVector &v, const std::string &label, const std::string &id,
              const std::string &model) {
  auto it = v.decisions.find(label);
  if (it == v.decisions.end()) {
    throw DataError("'" + model + "' has no '" + label + "' decision for report '" + id + "'");
  }
  return it->second;
}

// Reports predicted by every set, sorted.
std::vector<std::string> covered_ids(const std::vector<PredictionSet> &preds) {
  std::vector<std::string> ids;
  for (const auto &[id, v] : preds.front().predictions) {
    bool everywhere = true;
    for (std::size_t m = 1; m < preds.size() && everywhere; ++m) {
      everywhere = preds[m].predictions.count(id) > 0;
    }
    if (everywhere) ids.push_back(id);
  }
  return ids;
}

void check_panel(const std::vector<PredictionSet> &preds) {
  if (preds.empty()) throw DataError("combination categories need at least 1 prediction set");
  if (preds.size() > kMaxModels) throw DataError("too many prediction sets for categories");
}

int category_of(const std::vector<PredictionSet> &preds, const std::string &id,
                const std::string &label) {
  int index = 0;
  for (const PredictionSet &p : preds) {
    index = index * 2 + decision(p.predictions.at(id), label, id, p.labeler_name);
  }
  return index;
}

}  // namespace

std::map<std::string, int> combination_assign(const std::vector<PredictionSet> &preds,
                                              const std::string &label) {
  check_panel(preds);
  std::map<std::string, int> out;
  for (const std::string &id : covered_ids(preds)) out[id] = category_of(preds, id, label);
  return out;
}

DisagreementSample sample_disagreement_set(const std::vector<PredictionSet> &preds,
                                           std::size_t quota, std::uint64_t seed,
                                           const LabelSchema &schema) {
  check_panel(preds);
  DisagreementSample out;
  for (const PredictionSet &p : preds) out.models.push_back(p.labeler_name);
  out.labels = schema.labels();
  const std::size_t categories = std::size_t{1} << preds.size();
  const std::vector<std::string> ids = covered_ids(preds);
  out.covered = ids.size();

  std::set<std::string> chosen;
  for (std::size_t l = 0; l < out.labels.size(); ++l) {
    std::vector<std::vector<std::string>> members(categories);
    for (const std::string &id : ids) members[category_of(preds, id, out.labels[l])].push_back(id);
    std::vector<std::size_t> counts(categories);
    for (std::size_t c = 0; c < categories; ++c) {
      counts[c] = members[c].size();
      std::vector<std::string> &pool = members[c];
      const std::size_t take = std::min(quota, pool.size());
      std::mt19937_64 rng = stream_rng(seed, l * categories + c);
      // Partial Fisher-Yates: the first `take` slots become the sample.
      for (std::size_t i = 0; i < take; ++i) {
        std::swap(pool[i], pool[i + uniform_below(rng, pool.size() - i)]);
        chosen.insert(pool[i]);
      }
    }
    out.category_counts.push_back(std::move(counts));
  }
  out.report_ids.assign(chosen.begin(), chosen.end());

  for (std::size_t c = 0; c < categories; ++c) {
    CategoryPrevalence row;
    row.index = static_cast<int>(c);
    row.letter = category_letter(row.index);
    for (std::size_t m = 0; m < preds.size(); ++m) {
      row.pattern.push_back((c >> (preds.size() - 1 - m)) & 1);
    }
    double sum = 0.0;
    for (const auto &counts : out.category_counts) {
      if (out.covered) sum += 100.0 * counts[c] / static_cast<double>(out.covered);
    }
    row.average_prevalence = out.labels.empty() ? 0.0 : sum / out.labels.size();
    out.prevalence.push_back(std::move(row));
  }
  return out;
}

double full_agreement_rate(const std::vector<CategoryPrevalence> &table) {
  if (table.empty()) throw DataError("empty category table");
  const std::size_t models = table.front().pattern.size();
  const int all_ones = (1 << models) - 1;
  double rate = 0.0;
  for (const CategoryPrevalence &row : table) {
    if (row.index == 0 || row.index == all_ones) rate += row.average_prevalence;
  }
  return rate;
}

void write_category_prevalence_csv(const std::vector<CategoryPrevalence> &table,
                                   const std::vector<std::string> &models,
                                   const std::string &path) {
  std::ofstream out = open_out(path);
  std::vector<std::string> header = {"category"};
  header.insert(header.end(), models.begin(), models.end());
  header.push_back("average_prevalence");
  write_csv_row(out, header);
  for (const CategoryPrevalence &row : table) {
    std::vector<std::string> fields = {row.letter};
    for (int bit : row.pattern) fields.push_back(std::to_string(bit));
    fields.push_back(format_fixed(row.average_prevalence));
    write_csv_row(out, fields);
  }
}

std::vector<CategoryPrevalence> read_category_prevalence_csv(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  const std::vector<CsvRecord> records = read_csv(in);
  if (records.empty() || records.front().fields.size() < 3 ||
      records.front().fields.front() != "category" ||
      records.front().fields.back() != "average_prevalence") {
    throw DataError(path + ": expected header category,<models...>,average_prevalence");
  }
  const std::size_t width = records.front().fields.size();
  const std::size_t models = width - 2;
  std::vector<CategoryPrevalence> table;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const std::vector<std::string> &f = records[r].fields;
    const std::string where = path + ":" + std::to_string(records[r].line);
    if (f.size() != width) throw DataError(where + ": wrong field count");
    CategoryPrevalence row;
    row.letter = f[0];
    for (std::size_t m = 0; m < models; ++m) {
      const std::string bit(trim(f[m + 1]));
      if (bit != "0" && bit != "1") throw DataError(where + ": pattern bits must be 0 or 1");
      row.pattern.push_back(bit == "1");
      row.index = row.index * 2 + row.pattern.back();
    }
    try {
      std::size_t used = 0;
      const std::string value(trim(f.back()));
      row.average_prevalence = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument("trailing text");
    } catch (const std::exception &) {
      throw DataError(where + ": bad prevalence '" + f.back() + "'");
    }
    table.push_back(std::move(row));
  }
  return table;
}

std::vector<std::string> random_supplement(const std::vector<std::string> &ids,
                                           const std::set<std::string> &exclude,
                                           std::size_t n, std::uint64_t seed) {
  std::vector<std::string> pool;
  for (const std::string &id : ids) {
    if (!exclude.count(id)) pool.push_back(id);
  }
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  if (n > pool.size()) {
    throw DataError("supplement of " + std::to_string(n) + " exceeds the " +
                    std::to_string(pool.size()) + " available reports");
  }
  std::mt19937_64 rng = stream_rng(seed, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::swap(pool[i], pool[i + uniform_below(rng, pool.size() - i)]);
  }
  pool.resize(n);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace radlabel
