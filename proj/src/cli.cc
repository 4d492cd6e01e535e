#include "radlabel/cli.h"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "radlabel/annotate.h"
#include "radlabel/annotate_server.h"
#include "radlabel/ensemble.h"
#include "radlabel/errors.h"
#include "radlabel/ingest.h"
#include "radlabel/llm.h"
#include "radlabel/metrics.h"
#include "radlabel/predictions_io.h"
#include "radlabel/rba.h"
#include "radlabel/sampling.h"
#include "radlabel/text.h"

namespace radlabel {

using nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string &what) : std::runtime_error(what) {}
};

std::vector<std::string> split_list(const std::string &text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::string t(trim(item));
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

std::vector<std::string> read_id_list(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open id list " + path);
  std::vector<std::string> ids;
  std::set<std::string> seen;
  std::string line;
  while (std::getline(in, line)) {
    std::string id(trim(line));
    if (id.empty()) continue;
    if (!seen.insert(id).second) throw DataError(path + ": duplicate id '" + id + "'");
    ids.push_back(id);
  }
  return ids;
}

void write_id_list(const std::vector<std::string> &ids, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  for (const std::string &id : ids) out << id << '\n';
}

void write_json(const json &doc, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << doc.dump(2) << '\n';
}

std::vector<PredictionSet> read_panel(const std::vector<std::string> &paths) {
  std::vector<PredictionSet> panel;
  for (const std::string &p : paths) panel.push_back(read_predictions(p));
  return panel;
}

bool ends_with(const std::string &s, const std::string &suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Reports every labeler in the panel predicted, in id order.
std::vector<std::string> covered_ids(const std::vector<PredictionSet> &panel) {
  std::vector<std::string> out;
  if (panel.empty()) return out;
  for (const auto &[id, v] : panel.front().predictions) {
    bool all = true;
    for (const PredictionSet &p : panel) all = all && p.predictions.count(id);
    if (all) out.push_back(id);
  }
  return out;
}

struct IngestArgs {
  std::string reports, format, map, out;
  bool skip_bad_rows = false;
};

int cmd_ingest(const IngestArgs &a, std::ostream &out) {
  const ColumnMapping mapping = a.map.empty() ? ColumnMapping{} : ColumnMapping::Load(a.map);
  LoadResult loaded = load_reports(a.reports, parse_report_format(a.format), mapping);
  for (const std::string &w : loaded.warnings) warn(w);
  if (!loaded.row_errors.empty()) {
    std::string lines;
    for (std::size_t i = 0; i < loaded.row_errors.size() && i < 5; ++i) {
      if (i) lines += "; ";
      lines += "line " + std::to_string(loaded.row_errors[i].line) + ": " +
               loaded.row_errors[i].message;
    }
    if (!a.skip_bad_rows) {
      throw DataError(std::to_string(loaded.row_errors.size()) + " malformed row(s) in " +
                      a.reports + " (" + lines + ")");
    }
    warn("skipped " + std::to_string(loaded.row_errors.size()) + " malformed row(s): " + lines);
  }
  std::size_t missing = 0;
  for (ReportRecord &r : loaded.corpus.reports) {
    if (r.findings_state == FindingsState::kUnsectioned) r = extract_findings(std::move(r));
    if (r.findings_state == FindingsState::kMissing) ++missing;
  }
  write_corpus(loaded.corpus, a.out);
  out << json{{"reports", loaded.corpus.reports.size()},
              {"skipped_rows", loaded.row_errors.size()},
              {"no_findings", missing}}.dump()
      << '\n';
  return kExitOk;
}

struct RbaArgs {
  std::string corpus, lexicon, out, name = "rba";
};

int cmd_rba(const RbaArgs &a, std::ostream &out) {
  const Corpus corpus = read_corpus(a.corpus);
  const Lexicon lexicon = a.lexicon.empty() ? Lexicon::Default() : load_lexicon(a.lexicon);
  PredictionSet set = rba_label_corpus(corpus, lexicon);
  set.labeler_name = a.name;
  write_predictions(set, a.out);
  out << json{{"predictions", set.predictions.size()}, {"errors", set.errors.size()}}.dump()
      << '\n';
  return kExitOk;
}

struct LlmArgs {
  std::string corpus, model, out, audit, base_url, name;
  std::optional<double> temperature;
  std::optional<int> max_tokens;
  int concurrency = 4;
  int attempts = 3;
  int timeout = 120;
};

int cmd_llm(const LlmArgs &a, std::ostream &out) {
  const Corpus corpus = read_corpus(a.corpus);
  PromptConfig config;
  config.model = a.model;
  config.temperature = a.temperature;
  config.max_tokens = a.max_tokens;
  config.base_url = a.base_url;
  config.concurrency = a.concurrency;
  config.max_attempts = a.attempts;
  config.timeout = std::chrono::seconds(a.timeout);
  config.apply_environment();
  config.validate();
  if (config.base_url.empty()) {
    throw UsageError("no endpoint: pass --base-url or set RL_LLM_BASE_URL");
  }
  std::unique_ptr<CompletionBackend> backend = make_http_backend(config);
  const std::string name = a.name.empty() ? a.model : a.name;
  LlmRun run = llm_label_corpus(corpus, *backend, config, LabelSchema::Default(), name);
  write_predictions(run.predictions, a.out);
  write_audit_log(run.completions, a.audit);
  std::map<std::string, int> statuses;
  for (const RawCompletion &c : run.completions) ++statuses[to_string(c.status)];
  out << json{{"predictions", run.predictions.predictions.size()},
              {"errors", run.predictions.errors.size()},
              {"statuses", statuses},
              {"transport_failures", run.transport_failures}}.dump()
      << '\n';
  if (!corpus.reports.empty() &&
      run.transport_failures == static_cast<int>(corpus.reports.size())) {
    throw TransportError("endpoint " + config.base_url + " unreachable for every report", false);
  }
  if (run.transport_failures > 0) {
    warn(std::to_string(run.transport_failures) + " report(s) failed in transport");
  }
  return kExitOk;
}

struct VoteArgs {
  std::vector<std::string> preds;
  std::string tie = "negative", out;
};

int cmd_vote(const VoteArgs &a, std::ostream &out) {
  const PredictionSet set = majority_vote(read_panel(a.preds), parse_tie_policy(a.tie));
  write_predictions(set, a.out);
  out << json{{"labeler", set.labeler_name},
              {"predictions", set.predictions.size()},
              {"excluded", set.errors.size()}}.dump()
      << '\n';
  return kExitOk;
}

struct AgreeArgs {
  std::vector<std::string> preds;
  std::string out;
};

int cmd_agree(const AgreeArgs &a, std::ostream &out) {
  if (a.preds.size() < 2) throw UsageError("agree needs at least 2 prediction files");
  const std::vector<PairAgreement> pairs = pairwise_kappa_matrix(read_panel(a.preds));
  write_kappa_csv(pairs, a.out);
  json summary = json::array();
  for (const PairAgreement &p : pairs) {
    json row = {{"a", p.model_a}, {"b", p.model_b}, {"available", p.available}};
    if (p.available) row["median"] = p.median;
    summary.push_back(row);
  }
  out << summary.dump() << '\n';
  return kExitOk;
}

struct EvalArgs {
  std::string preds, truth, labels, out;
  int bootstrap = 0;
  std::optional<std::uint64_t> seed;
  double level = 0.95;
  int threads = 0;
};

int cmd_eval(const EvalArgs &a, std::ostream &out) {
  if (a.bootstrap < 0) throw UsageError("--bootstrap must be non-negative");
  if (a.bootstrap > 0 && !a.seed) throw UsageError("--bootstrap requires --seed");
  if (!(a.level > 0.0 && a.level < 1.0)) throw UsageError("--level must lie in (0, 1)");
  const PredictionSet pred = read_predictions(a.preds);
  const ReferenceLabels truth = read_reference_csv(a.truth);
  std::vector<std::string> labels = split_list(a.labels);
  for (const std::string &l : labels) {
    if (!LabelSchema::Default().contains(l)) throw DataError("unknown label '" + l + "'");
  }
  const EvalTable table = align_for_eval(pred, truth, labels);
  const F1Report report = f1_scores(table);

  json meta = {{"labeler", pred.labeler_name},
               {"predictions", a.preds},
               {"truth", a.truth},
               {"labels", table.labels},
               {"evaluated", table.rows()},
               {"excluded", table.excluded}};
  if (a.bootstrap > 0) {
    std::vector<RowMetric> metrics;
    for (std::size_t c = 0; c < table.cols(); ++c) metrics.push_back(label_f1_metric(c));
    metrics.push_back(macro_f1_metric());
    metrics.push_back(micro_f1_metric());
    const int threads =
        a.threads > 0 ? a.threads : std::max(1u, std::thread::hardware_concurrency());
    const std::vector<MetricWithCI> cis =
        bootstrap_ci(metrics, table, a.bootstrap, *a.seed, a.level, threads);
    const std::vector<MetricWithCI> label_cis(cis.begin(), cis.begin() + table.cols());
    write_metrics_csv(report, &label_cis, &cis[table.cols()], &cis[table.cols() + 1], a.out);
    meta["ci_method"] = "percentile";
    meta["resamples"] = a.bootstrap;
    meta["seed"] = *a.seed;
    meta["level"] = a.level;
  } else {
    write_metrics_csv(report, nullptr, nullptr, nullptr, a.out);
    meta["ci_method"] = nullptr;
  }
  write_json(meta, a.out + ".meta.json");
  out << json{{"macro_f1", report.macro_f1},
              {"micro_f1", report.micro_f1},
              {"evaluated", report.evaluated},
              {"excluded", report.excluded.size()}}.dump()
      << '\n';
  return kExitOk;
}

struct SplitArgs {
  std::string corpus, labels, out;
  double train_frac = 0.8;
  std::optional<std::uint64_t> seed;
};

int cmd_split(const SplitArgs &a, std::ostream &out) {
  const Corpus corpus = read_corpus(a.corpus);
  ReferenceLabels labels;
  if (ends_with(a.labels, ".jsonl")) {
    const PredictionSet set = read_predictions(a.labels);
    labels = set.predictions;
    std::size_t unlabeled = 0;
    for (const ReportRecord &r : corpus.reports) {
      if (labels.count(r.report_id)) continue;
      LabelVector none;
      for (const std::string &l : LabelSchema::Default().labels()) none.decisions[l] = false;
      labels[r.report_id] = std::move(none);
      ++unlabeled;
    }
    if (unlabeled) {
      warn(std::to_string(unlabeled) + " report(s) without predictions split as all-negative");
    }
  } else {
    labels = read_reference_csv(a.labels);
  }
  const SplitAssignment split = stratified_patient_split(corpus, labels, a.train_frac, *a.seed);
  for (const std::string &w : split.warnings) warn(w);
  write_split_csv(split, corpus, a.out);
  write_deviation_csv(split, a.out + ".deviation.csv");
  std::size_t test = 0;
  for (const auto &[id, side] : split.report_side) test += side == Side::kTest;
  out << json{{"reports", split.report_side.size()},
              {"test_reports", test},
              {"patients", split.patient_side.size()},
              {"max_deviation", split.max_deviation()}}.dump()
      << '\n';
  return kExitOk;
}

struct SampleArgs {
  std::vector<std::string> preds;
  std::size_t quota = 10;
  std::size_t supplement = 0;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int cmd_sample(const SampleArgs &a, std::ostream &out) {
  if (a.preds.size() < 2) throw UsageError("sample needs at least 2 prediction files");
  const std::vector<PredictionSet> panel = read_panel(a.preds);
  const DisagreementSample sample = sample_disagreement_set(panel, a.quota, *a.seed);
  std::vector<std::string> ids = sample.report_ids;
  std::vector<std::string> extra;
  if (a.supplement > 0) {
    const std::set<std::string> taken(ids.begin(), ids.end());
    extra = random_supplement(covered_ids(panel), taken, a.supplement, *a.seed);
    ids.insert(ids.end(), extra.begin(), extra.end());
    std::sort(ids.begin(), ids.end());
  }
  write_id_list(ids, a.out);
  write_category_prevalence_csv(sample.prevalence, sample.models, a.out + ".categories.csv");
  out << json{{"sampled", sample.report_ids.size()},
              {"supplement", extra.size()},
              {"covered", sample.covered},
              {"full_agreement", full_agreement_rate(sample.prevalence)}}.dump()
      << '\n';
  return kExitOk;
}

struct ServeArgs {
  std::string corpus, ids, store = "annotations.jsonl", annotator, static_dir,
                           host = "127.0.0.1";
  std::vector<std::string> preds;
  int port = 8642;
  bool show_predictions = false;
};

int cmd_serve(const ServeArgs &a, std::ostream &out) {
  const Corpus corpus = read_corpus(a.corpus);
  std::set<std::string> known;
  for (const ReportRecord &r : corpus.reports) known.insert(r.report_id);
  const std::vector<std::string> queue = read_id_list(a.ids);
  if (queue.empty()) throw DataError(a.ids + " lists no report ids");
  std::vector<std::string> unknown;
  for (const std::string &id : queue) {
    if (!known.count(id)) unknown.push_back(id);
  }
  if (!unknown.empty()) {
    std::string names;
    for (const std::string &id : unknown) names += (names.empty() ? "" : ", ") + id;
    throw DataError("ids not in the corpus: " + names);
  }
  AnnotationStore store(a.store, known);
  for (const std::string &w : store.warnings()) warn(w);

  json banner = json::object();
  if (!a.annotator.empty()) {
    std::optional<AnnotationSession> s = store.find_session(a.annotator, queue);
    if (!s) s = store.start_session(a.annotator, queue);
    banner["session_id"] = s->session_id;
  }
  ServerOptions options;
  options.host = a.host;
  options.port = a.port;
  options.show_predictions = a.show_predictions;
  options.static_dir = a.static_dir;
  options.queue = queue;
  AnnotationServer server(store, corpus, read_panel(a.preds), options);
  const int port = server.bind();
  banner["url"] = "http://" + a.host + ":" + std::to_string(port);
  out << banner.dump() << std::endl;
  server.listen();
  return kExitOk;
}

struct ExportArgs {
  std::string store = "annotations.jsonl", view, out, annotator;
};

int cmd_export(const ExportArgs &a, std::ostream &out) {
  const ViewKind kind = parse_view_kind(a.view);
  AnnotationStore store(a.store);
  for (const std::string &w : store.warnings()) warn(w);
  std::optional<std::string> annotator;
  if (!a.annotator.empty()) annotator = a.annotator;
  const ReferenceLabels view = derive_view(store.annotations(), kind, annotator);
  export_reference(view, a.out);
  out << json{{"view", to_string(kind)}, {"reports", view.size()}}.dump() << '\n';
  return kExitOk;
}

struct SubjectivityArgs {
  std::string store = "annotations.jsonl", out;
};

int cmd_subjectivity(const SubjectivityArgs &a, std::ostream &out) {
  AnnotationStore store(a.store);
  const std::vector<SubjectivityRow> rows = subjectivity_report(store.annotations());
  write_subjectivity_csv(rows, a.out);
  out << json{{"labels", rows.size()}}.dump() << '\n';
  return kExitOk;
}

struct TermsArgs {
  std::string corpus, out;
  std::size_t top_k = 50;
  bool bigrams = false;
};

int cmd_terms(const TermsArgs &a, std::ostream &out) {
  const Corpus corpus = read_corpus(a.corpus);
  if (corpus.reports.empty()) throw DataError("corpus " + a.corpus + " is empty");
  if (a.top_k < 1) throw UsageError("--top-k must be at least 1");
  TfidfOptions options;
  options.include_bigrams = a.bigrams;
  const std::vector<TermScore> terms = tfidf_suggest_terms(corpus, a.top_k, options);
  std::ofstream file(a.out, std::ios::binary);
  if (!file) throw DataError("cannot write " + a.out);
  file << "term,tfidf,document_frequency,term_frequency\n";
  char score[64];
  for (const TermScore &t : terms) {
    std::snprintf(score, sizeof(score), "%.6f", t.tfidf);
    file << csv_escape(t.term) << ',' << score << ',' << t.document_frequency << ','
         << t.term_frequency << '\n';
  }
  out << json{{"terms", terms.size()}}.dump() << '\n';
  return kExitOk;
}

void report(std::ostream &err, const std::string &kind, const std::string &message) {
  err << json{{"error", kind}, {"message", message}}.dump() << std::endl;
}

}  // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app("Radiology report labeling, agreement and evaluation toolkit", "radlabel");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  IngestArgs ingest;
  CLI::App *ingest_cmd = app.add_subcommand("ingest", "Load reports and extract findings");
  ingest_cmd->add_option("--reports", ingest.reports, "Report file")->required();
  ingest_cmd->add_option("--format", ingest.format, "jsonl or csv")
      ->required()
      ->check(CLI::IsMember({"jsonl", "csv"}));
  ingest_cmd->add_option("--map", ingest.map, "Column mapping JSON");
  ingest_cmd->add_option("--out", ingest.out, "Corpus JSONL")->required();
  ingest_cmd->add_flag("--skip-bad-rows", ingest.skip_bad_rows,
                       "Drop malformed rows instead of failing");

  RbaArgs rba;
  CLI::App *rba_cmd = app.add_subcommand("rba", "Label a corpus with the rule-based labeler");
  rba_cmd->add_option("--corpus", rba.corpus)->required();
  rba_cmd->add_option("--lexicon", rba.lexicon, "Lexicon JSON (built-in default if omitted)");
  rba_cmd->add_option("--name", rba.name, "Labeler name")->capture_default_str();
  rba_cmd->add_option("--out", rba.out)->required();

  LlmArgs llm;
  CLI::App *llm_cmd = app.add_subcommand("llm", "Label a corpus with a chat-completion model");
  llm_cmd->add_option("--corpus", llm.corpus)->required();
  llm_cmd->add_option("--model", llm.model)->required();
  llm_cmd->add_option("--temperature", llm.temperature);
  llm_cmd->add_option("--max-tokens", llm.max_tokens);
  llm_cmd->add_option("--concurrency", llm.concurrency)->capture_default_str();
  llm_cmd->add_option("--attempts", llm.attempts, "Attempts per report")->capture_default_str();
  llm_cmd->add_option("--timeout", llm.timeout, "Seconds per request")->capture_default_str();
  llm_cmd->add_option("--base-url", llm.base_url, "Endpoint (default $RL_LLM_BASE_URL)");
  llm_cmd->add_option("--name", llm.name, "Labeler name (default: the model)");
  llm_cmd->add_option("--out", llm.out)->required();
  llm_cmd->add_option("--audit", llm.audit, "Raw completion log")->required();

  VoteArgs vote;
  CLI::App *vote_cmd = app.add_subcommand("vote", "Majority vote over prediction files");
  vote_cmd->add_option("--preds", vote.preds)->required()->expected(2, 1 << 20);
  vote_cmd->add_option("--tie", vote.tie)
      ->check(CLI::IsMember({"negative", "positive", "reject-even"}))
      ->capture_default_str();
  vote_cmd->add_option("--out", vote.out)->required();

  AgreeArgs agree;
  CLI::App *agree_cmd = app.add_subcommand("agree", "Pairwise Cohen's kappa per label");
  agree_cmd->add_option("--preds", agree.preds)->required()->expected(2, 1 << 20);
  agree_cmd->add_option("--out", agree.out)->required();

  EvalArgs eval;
  CLI::App *eval_cmd = app.add_subcommand("eval", "F1 against reference labels");
  eval_cmd->add_option("--preds", eval.preds)->required();
  eval_cmd->add_option("--truth", eval.truth)->required();
  eval_cmd->add_option("--labels", eval.labels, "Comma-separated label subset");
  eval_cmd->add_option("--bootstrap", eval.bootstrap, "Resamples (0 disables)");
  eval_cmd->add_option("--seed", eval.seed);
  eval_cmd->add_option("--level", eval.level)->capture_default_str();
  eval_cmd->add_option("--threads", eval.threads, "Bootstrap threads (0 = all cores)");
  eval_cmd->add_option("--out", eval.out)->required();

  SplitArgs split;
  CLI::App *split_cmd = app.add_subcommand("split", "Patient-level stratified split");
  split_cmd->add_option("--corpus", split.corpus)->required();
  split_cmd->add_option("--labels", split.labels, "Labels CSV or predictions JSONL")
      ->required();
  split_cmd->add_option("--train-frac", split.train_frac)->required();
  split_cmd->add_option("--seed", split.seed)->required();
  split_cmd->add_option("--out", split.out)->required();

  SampleArgs sample;
  CLI::App *sample_cmd = app.add_subcommand("sample", "Disagreement-stratified sampling");
  sample_cmd->add_option("--preds", sample.preds)->required()->expected(2, 16);
  sample_cmd->add_option("--quota", sample.quota, "Reports per label and category")
      ->capture_default_str();
  sample_cmd->add_option("--supplement", sample.supplement, "Extra random reports");
  sample_cmd->add_option("--seed", sample.seed)->required();
  sample_cmd->add_option("--out", sample.out)->required();

  CLI::App *annotate_cmd = app.add_subcommand("annotate", "Annotation service");
  annotate_cmd->require_subcommand(1);
  ServeArgs serve;
  CLI::App *serve_cmd = annotate_cmd->add_subcommand("serve", "Serve the annotation API");
  serve_cmd->add_option("--corpus", serve.corpus)->required();
  serve_cmd->add_option("--ids", serve.ids, "Report ids, one per line")->required();
  serve_cmd->add_option("--store", serve.store, "Annotation log")->capture_default_str();
  serve_cmd->add_option("--host", serve.host)->capture_default_str();
  serve_cmd->add_option("--port", serve.port)->capture_default_str();
  serve_cmd->add_flag("--show-predictions", serve.show_predictions);
  serve_cmd->add_option("--preds", serve.preds, "Prediction files shown as context");
  serve_cmd->add_option("--annotator", serve.annotator, "Open or resume this annotator's session");
  serve_cmd->add_option("--static", serve.static_dir, "UI asset directory");

  ExportArgs exp;
  CLI::App *export_cmd = app.add_subcommand("export", "Export reference labels from annotations");
  export_cmd->add_option("--view", exp.view)
      ->required()
      ->check(CLI::IsMember({"actionable", "mention"}));
  export_cmd->add_option("--store", exp.store)->capture_default_str();
  export_cmd->add_option("--annotator", exp.annotator);
  export_cmd->add_option("--out", exp.out)->required();

  SubjectivityArgs subj;
  CLI::App *subj_cmd = app.add_subcommand("subjectivity", "Per-label tri-state counts");
  subj_cmd->add_option("--store", subj.store)->capture_default_str();
  subj_cmd->add_option("--out", subj.out)->required();

  TermsArgs terms;
  CLI::App *terms_cmd = app.add_subcommand("terms", "Suggest lexicon terms by TF-IDF");
  terms_cmd->add_option("--corpus", terms.corpus)->required();
  terms_cmd->add_option("--top-k", terms.top_k)->capture_default_str();
  terms_cmd->add_flag("--bigrams", terms.bigrams);
  terms_cmd->add_option("--out", terms.out)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError &e) {
    report(err, "usage", e.what());
    return kExitUsage;
  }

  try {
    if (*ingest_cmd) return cmd_ingest(ingest, out);
    if (*rba_cmd) return cmd_rba(rba, out);
    if (*llm_cmd) return cmd_llm(llm, out);
    if (*vote_cmd) return cmd_vote(vote, out);
    if (*agree_cmd) return cmd_agree(agree, out);
    if (*eval_cmd) return cmd_eval(eval, out);
    if (*split_cmd) return cmd_split(split, out);
    if (*sample_cmd) return cmd_sample(sample, out);
    if (*serve_cmd) return cmd_serve(serve, out);
    if (*export_cmd) return cmd_export(exp, out);
    if (*subj_cmd) return cmd_subjectivity(subj, out);
    if (*terms_cmd) return cmd_terms(terms, out);
  } catch (const UsageError &e) {
    report(err, "usage", e.what());
    return kExitUsage;
  } catch (const DataError &e) {
    report(err, "data", e.what());
    return kExitData;
  } catch (const TransportError &e) {
    report(err, "transport", e.what());
    return kExitTransport;
  } catch (const json::exception &e) {
    report(err, "data", e.what());
    return kExitData;
  } catch (const std::exception &e) {
    report(err, "internal", e.what());
    return kExitInternal;
  }
  report(err, "usage", "no subcommand given");
  return kExitUsage;
}

}  // namespace radlabel
