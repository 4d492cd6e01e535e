// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "radlabel/annotate.h"
#include "radlabel/cli.h"
#include "radlabel/ensemble.h"
#include "radlabel/llm.h"
#include "radlabel/metrics.h"
#include "radlabel/predictions_io.h"
#include "radlabel/rba.h"
#include "radlabel/sampling.h"
#include "radlabel/text.h"
#include "stub_llm.h"
#include "synthetic_models.h"
#include "test_util.h"

using namespace radlabel;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

const LabelSchema &schema() { return LabelSchema::Default(); }

struct Outcome {
  bool pass = true;
  std::string detail;

  void expect(bool ok, const std::string &what) {
    if (ok) return;
    if (pass) detail.clear();
    if (!detail.empty()) detail += "; ";
    pass = false;
    detail += what;
  }
};

int failures = 0;

void run(int number, const char *title, const std::function<Outcome()> &criterion) {
  Outcome o;
  try {
    o = criterion();
  } catch (const std::exception &e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  if (!o.pass) ++failures;
  std::printf("%s criterion %2d: %s (%s)\n", o.pass ? "PASS" : "FAIL", number, title,
              o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char *format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, value);
  return buf;
}

ReportRecord with_findings(const std::string &id, const std::string &findings) {
  return {id, "P-" + id, findings, findings, FindingsState::kPresent};
}

// 1 -----------------------------------------------------------------------

Outcome rba_reference() {
  Outcome o;
  std::ifstream in(testing::source_path("tests/fixtures/rba_reference.jsonl"));
  std::vector<json> rows;
  for (std::string line; std::getline(in, line);) rows.push_back(json::parse(line));
  const auto start = Clock::now();
  const Lexicon lexicon = Lexicon::Default();
  int correct = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const LabelVector v =
        classify_report(with_findings("S" + std::to_string(i), rows[i]["findings"]), lexicon);
    const bool got = v.get(rows[i]["label"]);
    if (got == rows[i]["expected"].get<bool>()) {
      ++correct;
    } else {
      o.expect(false, "mismatch on \"" + rows[i]["findings"].get<std::string>() + "\"");
    }
  }
  const double elapsed = seconds_since(start);
  o.expect(rows.size() == 5, "fixture must hold 5 sentences");
  o.expect(elapsed < 1.0, "took " + fmt("%.3f", elapsed) + " s");
  if (o.pass) {
    o.detail = std::to_string(correct) + "/" + std::to_string(rows.size()) + " in " +
               fmt("%.1f", elapsed * 1e3) + " ms";
  }
  return o;
}

// 2 -----------------------------------------------------------------------

Outcome published_agreement() {
  Outcome o;
  const auto table = read_category_prevalence_csv(
      testing::source_path("tests/fixtures/category_prevalence.csv"));
  const double full = full_agreement_rate(table);
  double sum = 0.0;
  for (const CategoryPrevalence &c : table) sum += c.average_prevalence;
  o.expect(table.size() == 8, "expected 8 categories");
  o.expect(std::abs(full - 81.04) <= 0.005, "A+H = " + fmt("%.4f", full));
  o.expect(std::abs(sum - 100.0) <= 0.01, "sum = " + fmt("%.4f", sum));
  if (o.pass) o.detail = "A+H = " + fmt("%.2f", full) + "%, sum = " + fmt("%.2f", sum) + "%";
  return o;
}

// 3 -----------------------------------------------------------------------

std::pair<BinarySeries, BinarySeries> kappa_table(int both, int a_only, int b_only,
                                                  int neither) {
  BinarySeries a, b;
  auto add = [&](int n, int x, int y) {
    for (int i = 0; i < n; ++i) {
      a.push_back(x);
      b.push_back(y);
    }
  };
  add(both, 1, 1);
  add(a_only, 1, 0);
  add(b_only, 0, 1);
  add(neither, 0, 0);
  return {a, b};
}

Outcome kappa_oracle() {
  Outcome o;
  struct Case {
    int both, a_only, b_only, neither;
    double kappa;
  };
  // Exact rationals from (p_o - p_e) / (1 - p_e).
  const Case cases[] = {
      {40, 10, 10, 40, 0.6},         {20, 5, 10, 15, 0.4},
      {45, 15, 25, 15, 3.0 / 23.0},  {25, 35, 5, 35, 7.0 / 27.0},
      {1, 0, 0, 9, 1.0},             {0, 3, 2, 5, -6.0 / 19.0},
      {5, 5, 5, 5, 0.0},             {0, 10, 10, 0, -1.0},
      {30, 1, 2, 67, 1004.0 / 1079.0}, {3, 7, 11, 79, 8.0 / 53.0},
      {50, 0, 50, 0, 0.0},
  };
  double worst = 0.0;
  for (const Case &c : cases) {
    auto [a, b] = kappa_table(c.both, c.a_only, c.b_only, c.neither);
    worst = std::max(worst, std::abs(cohen_kappa(a, b).kappa - c.kappa));
  }
  o.expect(worst <= 1e-12, "max table error " + fmt("%.3g", worst));

  std::mt19937_64 rng(20240917);
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng() % 200;
    const double pa = (rng() % 1000) / 1000.0, pb = (rng() % 1000) / 1000.0;
    std::bernoulli_distribution da(pa), db(pb);
    BinarySeries a(n), b(n), na(n), nb(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = da(rng);
      b[i] = db(rng);
      na[i] = !a[i];
      nb[i] = !b[i];
    }
    const double k = cohen_kappa(a, b).kappa;
    if (std::abs(k - cohen_kappa(b, a).kappa) > 1e-12) ++violations;
    if (std::abs(k - cohen_kappa(na, nb).kappa) > 1e-12) ++violations;
  }
  o.expect(violations == 0, std::to_string(violations) + " symmetry/inversion violations");
  if (o.pass) {
    o.detail = std::to_string(std::size(cases)) + " tables, max error " + fmt("%.1e", worst) +
               "; 1000 random pairs symmetric and inversion-invariant";
  }
  return o;
}

// 4 -----------------------------------------------------------------------

Outcome bands() {
  Outcome o;
  const std::pair<double, KappaBand> cases[] = {
      {0.87, KappaBand::kAlmostPerfect}, {0.64, KappaBand::kSubstantial},
      {-0.1, KappaBand::kPoor},          {0.0, KappaBand::kSlight},
      {0.20, KappaBand::kSlight},        {0.2000001, KappaBand::kFair},
      {0.40, KappaBand::kFair},          {0.4000001, KappaBand::kModerate},
      {0.60, KappaBand::kModerate},      {0.6000001, KappaBand::kSubstantial},
      {0.80, KappaBand::kSubstantial},   {0.8000001, KappaBand::kAlmostPerfect},
      {1.0, KappaBand::kAlmostPerfect},
  };
  for (const auto &[value, band] : cases) {
    o.expect(kappa_band(value) == band, fmt("%g", value) + " -> " + to_string(kappa_band(value)));
  }
  if (o.pass) {
    o.detail = "0.87 almost perfect, 0.64 substantial, -0.1 poor; 0.2/0.4/0.6/0.8 upper-inclusive";
  }
  return o;
}

// 5 -----------------------------------------------------------------------

Outcome f1_oracle() {
  Outcome o;
  std::mt19937_64 rng(99);
  double worst = 0.0;
  int identity_failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    EvalTable t;
    const std::size_t rows = rng() % 40, cols = 1 + rng() % 15;
    for (std::size_t c = 0; c < cols; ++c) t.labels.push_back(schema().labels()[c]);
    for (std::size_t r = 0; r < rows; ++r) {
      t.report_ids.push_back("R" + std::to_string(r));
      for (std::size_t c = 0; c < cols; ++c) {
        t.pred.push_back(rng() % 3 == 0);
        t.truth.push_back(rng() % 4 == 0);
      }
    }
    // Independent confusion count.
    std::vector<double> per_label;
    double tp_all = 0, fp_all = 0, fn_all = 0;
    for (std::size_t c = 0; c < cols; ++c) {
      double tp = 0, fp = 0, fn = 0;
      for (std::size_t r = 0; r < rows; ++r) {
        const bool p = t.pred[r * cols + c], y = t.truth[r * cols + c];
        tp += p && y;
        fp += p && !y;
        fn += !p && y;
      }
      per_label.push_back(tp + fp + fn == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn));
      tp_all += tp;
      fp_all += fp;
      fn_all += fn;
    }
    const double macro = std::accumulate(per_label.begin(), per_label.end(), 0.0) / cols;
    const double micro =
        tp_all + fp_all + fn_all == 0 ? 0.0 : 2 * tp_all / (2 * tp_all + fp_all + fn_all);
    const F1Report report = f1_scores(t);
    double mean = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      worst = std::max(worst, std::abs(report.per_label[c].f1 - per_label[c]));
      mean += report.per_label[c].f1;
    }
    worst = std::max({worst, std::abs(report.macro_f1 - macro), std::abs(report.micro_f1 - micro)});
    if (std::abs(report.macro_f1 - mean / cols) > 1e-12) ++identity_failures;
    if (cols == 1 && std::abs(report.micro_f1 - report.per_label[0].f1) > 1e-12) {
      ++identity_failures;
    }
  }
  o.expect(worst <= 1e-12, "max error " + fmt("%.3g", worst));
  o.expect(identity_failures == 0, std::to_string(identity_failures) + " identity failures");
  if (o.pass) o.detail = "1000 fixtures, max error " + fmt("%.1e", worst);
  return o;
}

// 6 -----------------------------------------------------------------------

EvalTable synthetic_table(std::size_t rows, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  EvalTable t;
  t.labels = schema().labels();
  for (std::size_t r = 0; r < rows; ++r) {
    t.report_ids.push_back("R" + std::to_string(r));
    for (std::size_t c = 0; c < t.labels.size(); ++c) {
      const bool y = rng() % 100 < 5 + 3 * c;
      const bool p = rng() % 100 < 85 ? y : !y;
      t.truth.push_back(y);
      t.pred.push_back(p);
    }
  }
  return t;
}

Outcome bootstrap() {
  Outcome o;
  const EvalTable table = synthetic_table(500, 3);
  std::vector<RowMetric> metrics;
  for (std::size_t c = 0; c < table.cols(); ++c) metrics.push_back(label_f1_metric(c));
  metrics.push_back(macro_f1_metric());
  metrics.push_back(micro_f1_metric());

  const auto start = Clock::now();
  const auto first = bootstrap_ci(metrics, table, 1000, 77, 0.95, 1);
  const double elapsed = seconds_since(start);
  const auto second = bootstrap_ci(metrics, table, 1000, 77, 0.95, 1);
  bool identical = first.size() == second.size();
  for (std::size_t i = 0; identical && i < first.size(); ++i) {
    identical = std::memcmp(&first[i].ci_low, &second[i].ci_low, sizeof(double)) == 0 &&
                std::memcmp(&first[i].ci_high, &second[i].ci_high, sizeof(double)) == 0;
  }
  o.expect(identical, "CIs differ between identical runs");
  o.expect(elapsed < 10.0, "1000 resamples took " + fmt("%.2f", elapsed) + " s");

  const RowMetric constant = [](const EvalTable &, std::span<const std::size_t>) { return 0.5; };
  const MetricWithCI flat = bootstrap_ci(constant, table, 200, 1);
  o.expect(flat.ci_low == 0.5 && flat.ci_high == 0.5, "constant metric CI not zero-width");
  if (o.pass) {
    const MetricWithCI &macro = first[table.cols()];
    o.detail = "bit-identical; 1000 resamples x 17 metrics on 500 reports in " +
               fmt("%.2f", elapsed) + " s; macro " + fmt("%.3f", macro.point) + " [" +
               fmt("%.3f", macro.ci_low) + ", " + fmt("%.3f", macro.ci_high) +
               "]; constant metric zero-width";
  }
  return o;
}

// 7 -----------------------------------------------------------------------

Outcome split() {
  Outcome o;
  std::mt19937_64 rng(1234);
  Corpus corpus;
  ReferenceLabels labels;
  const std::vector<std::string> &names = schema().labels();
  int id = 0;
  for (int p = 0; p < 1000; ++p) {
    const std::string patient = "P" + std::to_string(p);
    const int reports = 1 + (rng() % 10 < 3 ? 1 + rng() % 3 : 0);
    std::vector<bool> chronic(names.size());
    for (std::size_t c = 0; c < names.size(); ++c) chronic[c] = rng() % 100 < 2 + 2 * (c % 7);
    for (int r = 0; r < reports; ++r) {
      const std::string rid = "R" + std::to_string(id++);
      corpus.reports.push_back(with_findings(rid, "x"));
      corpus.reports.back().patient_id = patient;
      LabelVector v;
      for (std::size_t c = 0; c < names.size(); ++c) {
        v.decisions[names[c]] = chronic[c] || rng() % 100 < 3;
      }
      labels[rid] = v;
    }
  }
  const SplitAssignment s = stratified_patient_split(corpus, labels, 0.8, 42);
  std::map<std::string, std::set<Side>> sides;
  for (const ReportRecord &r : corpus.reports) {
    sides[r.patient_id].insert(s.report_side.at(r.report_id));
  }
  std::size_t overlap = 0;
  for (const auto &[patient, set] : sides) overlap += set.size() > 1;
  o.expect(overlap == 0, std::to_string(overlap) + " patients on both sides");
  o.expect(s.max_deviation() <= 0.02, "max deviation " + fmt("%.4f", s.max_deviation()));
  if (o.pass) {
    o.detail = std::to_string(corpus.reports.size()) + " reports / 1000 patients, no overlap, " +
               "max deviation " + fmt("%.2f", s.max_deviation() * 100) + " pp";
  }
  return o;
}

// 8 -----------------------------------------------------------------------

PredictionSet single(const std::string &name, const std::map<std::string, bool> &bits) {
  PredictionSet p;
  p.labeler_name = name;
  for (const auto &[label, bit] : bits) p.predictions["R"].decisions[label] = bit;
  return p;
}

Outcome ensemble() {
  Outcome o;
  const std::string label = "Kidney Cyst";
  for (int pattern = 0; pattern < 8; ++pattern) {
    const bool a = pattern & 4, b = pattern & 2, c = pattern & 1;
    const PredictionSet vote = majority_vote(
        {single("a", {{label, a}}), single("b", {{label, b}}), single("c", {{label, c}})});
    const bool median = (a && b) || (b && c) || (a && c);
    o.expect(vote.predictions.at("R").get(label) == median,
             "pattern " + std::to_string(pattern));
  }
  std::mt19937_64 rng(5);
  int violations = 0;
  const std::vector<std::string> &names = schema().labels();
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t k = 2 + rng() % 5;
    const TiePolicy tie = static_cast<TiePolicy>(rng() % 2);
    std::vector<PredictionSet> panel;
    for (std::size_t m = 0; m < k; ++m) {
      std::map<std::string, bool> bits;
      for (const std::string &l : names) bits[l] = rng() % 2;
      panel.push_back(single("m" + std::to_string(m), bits));
    }
    const LabelVector base = majority_vote(panel, tie).predictions.at("R");
    std::vector<PredictionSet> shuffled = panel;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    if (majority_vote(shuffled, tie).predictions.at("R").decisions != base.decisions) {
      ++violations;
    }
    std::vector<PredictionSet> raised = panel;
    const std::string &l = names[rng() % names.size()];
    raised[rng() % k].predictions["R"].decisions[l] = true;
    if (base.get(l) && !majority_vote(raised, tie).predictions.at("R").get(l)) ++violations;
  }
  o.expect(violations == 0, std::to_string(violations) + " permutation/monotonicity violations");
  if (o.pass) o.detail = "8/8 patterns equal the bitwise median; 10000 panels invariant";
  return o;
}

// 9 -----------------------------------------------------------------------

std::vector<std::string> malformed_completions(const std::string &valid) {
  std::vector<std::string> out;
  for (int cut = 1; cut <= 20; ++cut) out.push_back(valid.substr(0, valid.size() * cut / 21));
  auto replace_all = [](std::string s, const std::string &from, const std::string &to) {
    for (std::size_t at = s.find(from); at != std::string::npos; at = s.find(from, at + to.size())) {
      s.replace(at, from.size(), to);
    }
    return s;
  };
  out.push_back("```json\n" + valid + "\n```");
  out.push_back("Sure! " + valid + " Hope this helps.");
  out.push_back(replace_all(valid, "true", "yes"));
  out.push_back(replace_all(valid, "false", "no"));
  out.push_back(replace_all(valid, "\"", "'"));
  out.push_back(valid.substr(0, valid.size() - 2) + ",}}");
  out.push_back(replace_all(valid, "\"Kidney Stone\":", "\"Renal Stone\":"));
  out.push_back(replace_all(valid, "\"ID\"", "\"Id\""));
  out.push_back("");
  out.push_back("null");
  out.push_back("[]");
  out.push_back("[" + valid + "]");
  out.push_back(replace_all(replace_all(valid, "true", "True"), "false", "False"));
  out.push_back(replace_all(replace_all(valid, "true", "1"), "false", "0"));
  out.push_back(replace_all(replace_all(valid, "true", "\"true\""), "false", "\"false\""));
  out.push_back(valid.substr(0, valid.size() - 1) + ",\"Extra\":1}");
  out.push_back("{\"result\":" + valid + "}");
  out.push_back("\x01\x02\xff garbage");
  out.push_back(replace_all(valid, "Kidney", "kidney"));
  out.push_back(replace_all(valid, "\"Decisions\"", "\"Labels\""));
  out.push_back("I cannot determine the findings for this report.");
  out.push_back(valid + valid);
  out.push_back(replace_all(valid, ":true", ":maybe"));
  out.push_back(replace_all(valid, ":false", ":null"));
  return out;
}

Outcome llm_protocol() {
  Outcome o;
  const std::string expected_prompt =
      testing::read_file(testing::source_path("tests/fixtures/classification_prompt.txt"));
  std::mt19937_64 rng(8);
  std::map<std::string, std::string> answers;
  Corpus corpus;
  std::vector<std::string> valids;
  for (int i = 0; i < 100; ++i) {
    LabelVector v;
    for (const std::string &l : schema().labels()) v.decisions[l] = rng() % 3 == 0;
    valids.push_back(serialize_decisions(v, "V" + std::to_string(i), schema()));
  }
  const std::vector<std::string> malformed = malformed_completions(valids[0]);
  for (std::size_t i = 0; i < malformed.size(); ++i) {
    const std::string id = "M" + std::to_string(i);
    answers[id] = malformed[i];
    corpus.reports.push_back(with_findings(id, "Lungs are clear."));
  }
  for (std::size_t i = 0; i < valids.size(); ++i) {
    const std::string id = "V" + std::to_string(i);
    answers[id] = i % 2 ? json::parse(valids[i]).dump(2) : valids[i];
    corpus.reports.push_back(with_findings(id, "Kidneys are unremarkable."));
  }
  testing::StubLlm stub([&](const std::string &, const std::string &id) {
    return std::optional<std::string>(answers.at(id));
  });

  PromptConfig config;
  config.model = "stub";
  config.base_url = stub.url();
  config.concurrency = 3;
  auto backend = make_http_backend(config);
  const LlmRun result = llm_label_corpus(corpus, *backend, config, schema(), "stub");

  const std::set<std::string> prompts = stub.system_prompts();
  o.expect(prompts.size() == 1 && *prompts.begin() == expected_prompt,
           "system prompt differs from the fixture");
  o.expect(result.predictions.predictions.size() + result.predictions.errors.size() ==
               corpus.reports.size(),
           "predictions + errors != corpus");
  o.expect(result.completions.size() == corpus.reports.size(), "missing audit records");
  std::map<std::string, int> statuses;
  int strict_checked = 0;
  for (const RawCompletion &c : result.completions) {
    ++statuses[to_string(c.status)];
    const ParseOutcome strict = parse_strict(c.raw, schema());
    if (!strict.ok) continue;
    ++strict_checked;
    const ParseOutcome salvage = parse_salvage(c.raw, schema());
    o.expect(salvage.ok && salvage.vector.decisions == strict.vector.decisions,
             "salvage differs from strict for " + c.report_id);
  }
  for (std::size_t i = 0; i < valids.size(); ++i) {
    const auto it = result.predictions.status.find("V" + std::to_string(i));
    o.expect(it != result.predictions.status.end() && it->second == "strict",
             "valid completion V" + std::to_string(i) + " not strict");
  }
  if (o.pass) {
    o.detail = "prompt byte-identical; " + std::to_string(malformed.size()) +
               " malformed + " + std::to_string(valids.size()) + " valid completions: ";
    for (const auto &[status, n] : statuses) o.detail += status + "=" + std::to_string(n) + " ";
    o.detail += "conserved; salvage==strict on " + std::to_string(strict_checked);
  }
  return o;
}

// 10 ----------------------------------------------------------------------

Outcome views() {
  Outcome o;
  const auto dir = testing::scratch_dir("acceptance_views");
  std::mt19937_64 rng(10);
  AnnotationStore store((dir / "log.jsonl").string());
  std::vector<std::string> ids;
  for (int i = 0; i < 300; ++i) ids.push_back("A" + std::to_string(1000 + i));
  const std::string sid = store.start_session("reader", ids).session_id;
  const std::set<std::string> subjective_prone = {"Kidney Lesion", "Lung Atelectasis",
                                                  "Liver Lesion"};
  std::map<std::string, std::map<std::string, TriState>> truth;
  for (const std::string &id : ids) {
    TriStateAnnotation a;
    a.report_id = id;
    for (const std::string &l : schema().labels()) {
      const int roll = rng() % 100;
      TriState t = roll < 15 ? TriState::kPositive : TriState::kNegative;
      if (subjective_prone.count(l) && roll >= 15 && roll < 40) t = TriState::kSubjectiveMention;
      a.labels[l] = t;
    }
    truth[id] = a.labels;
    store.submit(sid, a);
  }
  const ReferenceLabels actionable = derive_view(store.annotations(), ViewKind::kActionable);
  const ReferenceLabels mention = derive_view(store.annotations(), ViewKind::kMention);
  std::size_t differing = 0, subjective = 0;
  for (const auto &[id, labels] : truth) {
    for (const auto &[l, t] : labels) {
      const bool differs = actionable.at(id).get(l) != mention.at(id).get(l);
      const bool is_subjective = t == TriState::kSubjectiveMention;
      differing += differs;
      subjective += is_subjective;
      o.expect(differs == is_subjective, "views disagree off a subjective entry at " + id);
    }
  }

  // Labeler that reports every mention as a finding.
  PredictionSet happy;
  happy.labeler_name = "mention-happy";
  testing::SyntheticModel model;
  model.flip_rate = 0.02;
  for (const auto &[id, labels] : truth) {
    const ParseOutcome p = parse_strict(
        testing::synthetic_completion(labels, "mention-happy", id, model), schema());
    happy.predictions[id] = p.vector;
  }
  const F1Report act = f1_scores(happy, actionable);
  const F1Report men = f1_scores(happy, mention);
  std::string gains;
  for (std::size_t c = 0; c < act.per_label.size(); ++c) {
    const std::string &l = act.per_label[c].label;
    if (!subjective_prone.count(l)) continue;
    o.expect(men.per_label[c].f1 > act.per_label[c].f1, l + " mention F1 not higher");
    gains += l + " " + fmt("%.3f", act.per_label[c].f1) + "->" + fmt("%.3f", men.per_label[c].f1) +
             "; ";
  }
  if (o.pass) {
    o.detail = std::to_string(differing) + " differing cells == " + std::to_string(subjective) +
               " subjective entries; " + gains + "macro " + fmt("%.3f", act.macro_f1) + "->" +
               fmt("%.3f", men.macro_f1);
  }
  return o;
}

// 11 ----------------------------------------------------------------------

Outcome end_to_end() {
  Outcome o;
  const auto dir = testing::scratch_dir("acceptance_e2e");
  auto at = [&](const std::string &name) { return (dir / name).string(); };
  auto fixture = [](const std::string &name) {
    return testing::source_path("data/fixtures/synthetic/" + name);
  };
  const auto truth = std::make_shared<testing::TriStateTruth>(
      testing::load_tristate_truth(fixture("annotations.jsonl")));
  testing::StubLlm stub([truth](const std::string &model, const std::string &id) {
    testing::SyntheticModel m;
    m = model == "llm-a" ? testing::SyntheticModel{0.03, true, 0.02, 0.05}
                         : testing::SyntheticModel{0.05, false, 0.0, 0.0};
    return std::optional<std::string>(testing::synthetic_completion(truth->at(id), model, id, m));
  });

  std::ostringstream sink, err;
  std::vector<std::string> failed;
  auto step = [&](const std::vector<std::string> &args) {
    if (run_cli(args, sink, err) != 0) failed.push_back(args[0]);
  };
  const auto start = Clock::now();
  step({"ingest", "--reports", fixture("reports.jsonl"), "--format", "jsonl", "--out",
        at("corpus.jsonl")});
  step({"rba", "--corpus", at("corpus.jsonl"), "--out", at("rba.jsonl")});
  for (const std::string model : {"llm-a", "llm-b"}) {
    step({"llm", "--corpus", at("corpus.jsonl"), "--model", model, "--base-url", stub.url(),
          "--out", at(model + ".jsonl"), "--audit", at(model + ".audit.jsonl")});
  }
  step({"vote", "--preds", at("rba.jsonl"), at("llm-a.jsonl"), at("llm-b.jsonl"), "--out",
        at("vote.jsonl")});
  step({"agree", "--preds", at("rba.jsonl"), at("llm-a.jsonl"), at("llm-b.jsonl"), "--out",
        at("kappa.csv")});
  for (const std::string preds : {"rba", "llm-a", "llm-b", "vote"}) {
    step({"eval", "--preds", at(preds + ".jsonl"), "--truth", fixture("truth_actionable.csv"),
          "--bootstrap", "1000", "--seed", "1", "--out", at("metrics_" + preds + ".csv")});
  }
  const double elapsed = seconds_since(start);
  for (const std::string &f : failed) o.expect(false, f + " failed: " + err.str());
  o.expect(elapsed < 30.0, "took " + fmt("%.1f", elapsed) + " s");

  auto rows = [](const std::string &path) {
    std::istringstream in(testing::read_file(path));
    std::vector<std::vector<std::string>> out;
    for (CsvRecord &r : read_csv(in)) out.push_back(std::move(r.fields));
    return out;
  };
  auto numeric = [](const std::string &cell) {
    if (cell.empty()) return true;
    char *end = nullptr;
    std::strtod(cell.c_str(), &end);
    return *end == '\0';
  };
  const auto kappa = rows(at("kappa.csv"));
  o.expect(!kappa.empty() && kappa[0].size() == 9 && kappa[0][0] == "model_a",
           "kappa.csv header");
  o.expect(kappa.size() == 1 + 3 * 16, "kappa.csv rows");
  for (std::size_t i = 1; i < kappa.size(); ++i) {
    o.expect(kappa[i].size() == 9 && numeric(kappa[i][3]) && numeric(kappa[i][5]),
             "kappa.csv row " + std::to_string(i));
  }
  std::string summary;
  for (const std::string preds : {"rba", "llm-a", "llm-b", "vote"}) {
    const auto m = rows(at("metrics_" + preds + ".csv"));
    o.expect(m.size() == 18 && m[0].size() == 8 && m[0][0] == "label",
             "metrics_" + preds + ".csv shape");
    for (std::size_t i = 1; i < m.size(); ++i) {
      for (std::size_t c = 1; c < m[i].size(); ++c) {
        o.expect(numeric(m[i][c]), "metrics_" + preds + ".csv non-numeric cell");
      }
    }
    if (m.size() == 18) summary += preds + " macro " + m[16][5] + "; ";
    const json meta = json::parse(testing::read_file(at("metrics_" + preds + ".csv.meta.json")));
    o.expect(meta["resamples"] == 1000 && meta["ci_method"] == "percentile",
             "metrics_" + preds + " meta");
  }
  if (summary.size() >= 2) summary.resize(summary.size() - 2);
  if (o.pass) o.detail = "7 stages in " + fmt("%.1f", elapsed) + " s; " + summary;
  return o;
}

}  // namespace

int main() {
  run(1, "rule-based labeler reference sentences", rba_reference);
  run(2, "published category prevalences", published_agreement);
  run(3, "Cohen's kappa oracle", kappa_oracle);
  run(4, "kappa band mapping", bands);
  run(5, "F1 oracle", f1_oracle);
  run(6, "bootstrap determinism and runtime", bootstrap);
  run(7, "patient-level split invariants", split);
  run(8, "ensemble truth table and properties", ensemble);
  run(9, "LLM protocol against a stub endpoint", llm_protocol);
  run(10, "actionable vs mention views", views);
  run(11, "end-to-end pipeline on the fixture corpus", end_to_end);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
