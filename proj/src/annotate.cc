#include "radlabel/annotate.h"

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "radlabel/errors.h"
#include "radlabel/predictions_io.h"
#include "radlabel/text.h"

namespace radlabel {

using nlohmann::json;

const char *to_string(ReportStatus status) {
  switch (status) {
    case ReportStatus::kPending: return "pending";
    case ReportStatus::kDone: return "done";
    case ReportStatus::kSkipped: return "skipped";
  }
  return "pending";
}

std::size_t AnnotationSession::count(ReportStatus s) const {
  return static_cast<std::size_t>(std::count(status.begin(), status.end(), s));
}

std::optional<std::string> AnnotationSession::next() const {
  if (cursor >= queue.size()) return std::nullopt;
  return queue[cursor];
}

json annotation_to_json(const TriStateAnnotation &a) {
  json labels = json::object();
  for (const auto &[label, value] : a.labels) labels[label] = to_string(value);
  json j = {{"report_id", a.report_id}, {"annotator_id", a.annotator_id}, {"labels", labels}};
  if (!a.note.empty()) j["note"] = a.note;
  if (!a.label_notes.empty()) j["label_notes"] = a.label_notes;
  if (a.sequence) j["sequence"] = a.sequence;
  return j;
}

TriStateAnnotation annotation_from_json(const json &j) {
  if (!j.is_object()) throw DataError("annotation must be a JSON object");
  TriStateAnnotation a;
  try {
    a.report_id = j.at("report_id").get<std::string>();
    a.annotator_id = j.value("annotator_id", "");
    for (const auto &[label, value] : j.at("labels").items()) {
      a.labels[label] = parse_tristate(value.get<std::string>());
    }
    a.note = j.value("note", "");
    if (j.contains("label_notes")) {
      a.label_notes = j["label_notes"].get<std::map<std::string, std::string>>();
    }
    a.sequence = j.value("sequence", std::uint64_t{0});
  } catch (const json::exception &e) {
    throw DataError(std::string("malformed annotation: ") + e.what());
  }
  return a;
}

json session_to_json(const AnnotationSession &s) {
  json queue = json::array();
  for (std::size_t i = 0; i < s.queue.size(); ++i) {
    queue.push_back({{"report_id", s.queue[i]}, {"status", to_string(s.status[i])}});
  }
  return {{"session_id", s.session_id},
          {"annotator_id", s.annotator_id},
          {"queue", queue},
          {"cursor", s.cursor},
          {"total", s.queue.size()},
          {"counts",
           {{"pending", s.count(ReportStatus::kPending)},
            {"done", s.count(ReportStatus::kDone)},
            {"skipped", s.count(ReportStatus::kSkipped)}}}};
}

std::string annotation_coverage_error(const TriStateAnnotation &a, const LabelSchema &schema) {
  std::vector<std::string> missing, unknown;
  for (const std::string &label : schema.labels()) {
    if (!a.labels.count(label)) missing.push_back(label);
  }
  for (const auto &[label, value] : a.labels) {
    if (!schema.contains(label)) unknown.push_back(label);
  }
  for (const auto &[label, note] : a.label_notes) {
    if (!schema.contains(label)) unknown.push_back(label);
  }
  if (missing.empty() && unknown.empty()) return "";
  auto join = [](const std::vector<std::string> &v) {
    std::string out;
    for (const std::string &s : v) out += (out.empty() ? "" : ", ") + s;
    return out;
  };
  std::string msg = "annotation for '" + a.report_id + "'";
  if (!missing.empty()) msg += " is missing labels: " + join(missing);
  if (!unknown.empty()) msg += (missing.empty() ? " has" : "; has") + std::string(" unknown labels: ") + join(unknown);
  return msg;
}

namespace {

void refresh_cursor(AnnotationSession &s) {
  s.cursor = s.queue.size();
  for (std::size_t i = 0; i < s.queue.size(); ++i) {
    if (s.status[i] == ReportStatus::kPending) {
      s.cursor = i;
      return;
    }
  }
}

std::size_t position_of(const AnnotationSession &s, const std::string &report_id) {
  auto it = std::find(s.queue.begin(), s.queue.end(), report_id);
  if (it == s.queue.end()) {
    throw DataError("report '" + report_id + "' is not in session '" + s.session_id + "'");
  }
  return static_cast<std::size_t>(it - s.queue.begin());
}

}  // namespace

AnnotationStore::AnnotationStore(std::string log_path, std::set<std::string> known_reports,
                                 const LabelSchema &schema)
    : path_(std::move(log_path)), known_(std::move(known_reports)), schema_(schema) {
  const std::filesystem::path parent = std::filesystem::path(path_).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  replay();
  file_ = std::fopen(path_.c_str(), "ab");
  if (!file_) throw DataError("cannot open annotation log " + path_);
}

AnnotationStore::~AnnotationStore() {
  if (file_) std::fclose(file_);
}

void AnnotationStore::replay() {
  std::ifstream in(path_, std::ios::binary);
  if (!in) return;
  const std::string content{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  in.close();
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < content.size()) {
    const std::size_t end = content.find('\n', pos);
    const bool terminated = end != std::string::npos;
    const std::string line = content.substr(pos, terminated ? end - pos : std::string::npos);
    ++line_no;
    try {
      if (!trim(line).empty()) apply(json::parse(line));
    } catch (const std::exception &e) {
      if (terminated) {
        throw DataError(path_ + ":" + std::to_string(line_no) + ": " + e.what());
      }
      // An unterminated final line is a write that never completed (and was
      // never acknowledged): drop it.
      std::filesystem::resize_file(path_, pos);
      warnings_.push_back(path_ + ": discarded incomplete final entry");
      break;
    }
    pos = terminated ? end + 1 : content.size();
  }
  if (!content.empty() && content.back() != '\n' && warnings_.empty()) {
    std::ofstream(path_, std::ios::binary | std::ios::app) << '\n';
  }
}

void AnnotationStore::apply(const json &event) {
  const std::string type = event.at("event").get<std::string>();
  sequence_ = std::max(sequence_, event.at("sequence").get<std::uint64_t>());
  if (type == "session") {
    AnnotationSession s;
    s.session_id = event.at("session_id").get<std::string>();
    s.annotator_id = event.at("annotator_id").get<std::string>();
    s.queue = event.at("report_ids").get<std::vector<std::string>>();
    s.status.assign(s.queue.size(), ReportStatus::kPending);
    if (!sessions_.emplace(s.session_id, s).second) {
      throw DataError("duplicate session '" + s.session_id + "'");
    }
    session_order_.push_back(s.session_id);
    return;
  }
  AnnotationSession &s = session_ref(event.at("session_id").get<std::string>());
  if (type == "annotation") {
    TriStateAnnotation a = annotation_from_json(event);
    s.status[position_of(s, a.report_id)] = ReportStatus::kDone;
    annotations_.push_back(std::move(a));
  } else if (type == "skip") {
    std::size_t at = position_of(s, event.at("report_id").get<std::string>());
    if (s.status[at] == ReportStatus::kPending) s.status[at] = ReportStatus::kSkipped;
  } else {
    throw DataError("unknown event '" + type + "'");
  }
  refresh_cursor(s);
}

void AnnotationStore::append(json event) {
  event["sequence"] = sequence_ + 1;
  const std::string line = event.dump() + "\n";
  if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() ||
      std::fflush(file_) != 0 || ::fsync(::fileno(file_)) != 0) {
    throw DataError("failed to write annotation log " + path_);
  }
  apply(event);
}

AnnotationSession &AnnotationStore::session_ref(const std::string &session_id) {
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw DataError("unknown session '" + session_id + "'");
  return it->second;
}

AnnotationSession AnnotationStore::start_session(const std::string &annotator_id,
                                                 const std::vector<std::string> &report_ids) {
  if (annotator_id.empty()) throw DataError("annotator id must not be empty");
  if (report_ids.empty()) throw DataError("a session needs at least one report");
  std::set<std::string> seen;
  std::vector<std::string> unknown;
  for (const std::string &id : report_ids) {
    if (!seen.insert(id).second) throw DataError("report '" + id + "' listed twice");
    if (!known_.empty() && !known_.count(id)) unknown.push_back(id);
  }
  if (!unknown.empty()) {
    std::string msg = "unknown report ids:";
    for (const std::string &id : unknown) msg += " " + id;
    throw DataError(msg);
  }
  std::lock_guard<std::mutex> lock(mu_);
  const std::string id = "s" + std::to_string(session_order_.size() + 1);
  append({{"event", "session"},
          {"session_id", id},
          {"annotator_id", annotator_id},
          {"report_ids", report_ids}});
  return sessions_.at(id);
}

std::optional<AnnotationSession> AnnotationStore::find_session(
    const std::string &annotator_id, const std::vector<std::string> &report_ids) const {
  std::lock_guard<std::mutex> lock(mu_);
  for (auto it = session_order_.rbegin(); it != session_order_.rend(); ++it) {
    const AnnotationSession &s = sessions_.at(*it);
    if (s.annotator_id == annotator_id && s.queue == report_ids) return s;
  }
  return std::nullopt;
}

std::optional<AnnotationSession> AnnotationStore::session(const std::string &session_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) return std::nullopt;
  return it->second;
}

std::vector<AnnotationSession> AnnotationStore::sessions() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<AnnotationSession> out;
  for (const std::string &id : session_order_) out.push_back(sessions_.at(id));
  return out;
}

TriStateAnnotation AnnotationStore::submit(const std::string &session_id,
                                           TriStateAnnotation annotation) {
  std::lock_guard<std::mutex> lock(mu_);
  AnnotationSession &s = session_ref(session_id);
  position_of(s, annotation.report_id);
  if (annotation.annotator_id.empty()) annotation.annotator_id = s.annotator_id;
  if (annotation.annotator_id != s.annotator_id) {
    throw DataError("annotator '" + annotation.annotator_id + "' does not own session '" +
                    session_id + "'");
  }
  const std::string problem = annotation_coverage_error(annotation, schema_);
  if (!problem.empty()) throw DataError(problem);
  annotation.sequence = 0;
  json event = annotation_to_json(annotation);
  event["event"] = "annotation";
  event["session_id"] = session_id;
  append(std::move(event));
  annotation.sequence = sequence_;
  return annotation;
}

void AnnotationStore::skip(const std::string &session_id, const std::string &report_id) {
  std::lock_guard<std::mutex> lock(mu_);
  position_of(session_ref(session_id), report_id);
  append({{"event", "skip"}, {"session_id", session_id}, {"report_id", report_id}});
}

std::vector<TriStateAnnotation> AnnotationStore::annotations() const {
  std::lock_guard<std::mutex> lock(mu_);
  return annotations_;
}

const char *to_string(ViewKind kind) {
  return kind == ViewKind::kActionable ? "actionable" : "mention";
}

ViewKind parse_view_kind(const std::string &name) {
  if (name == "actionable") return ViewKind::kActionable;
  if (name == "mention") return ViewKind::kMention;
  throw DataError("unknown view '" + name + "' (expected actionable or mention)");
}

ReferenceLabels derive_view(const std::vector<TriStateAnnotation> &log, ViewKind kind,
                            const std::optional<std::string> &annotator,
                            const LabelSchema &schema) {
  std::map<std::string, const TriStateAnnotation *> latest;
  for (const TriStateAnnotation &a : log) {
    if (annotator && a.annotator_id != *annotator) continue;
    const TriStateAnnotation *&slot = latest[a.report_id];
    if (!slot || a.sequence >= slot->sequence) slot = &a;
  }
  ReferenceLabels view;
  for (const auto &[id, a] : latest) {
    LabelVector v;
    for (const std::string &label : schema.labels()) v.decisions[label] = false;
    for (const auto &[label, value] : a->labels) {
      if (!schema.contains(label)) continue;
      v.decisions[label] = value == TriState::kPositive ||
                           (value == TriState::kSubjectiveMention && kind == ViewKind::kMention);
    }
    view[id] = std::move(v);
  }
  return view;
}

void export_reference(const ReferenceLabels &view, const std::string &path,
                      const LabelSchema &schema) {
  write_reference_csv(view, path, schema);
}

std::string reference_csv_text(const ReferenceLabels &view, const LabelSchema &schema) {
  std::ostringstream out;
  std::vector<std::string> header = {"report_id"};
  for (const std::string &label : schema.labels()) header.push_back(label);
  write_csv_row(out, header);
  for (const auto &[id, v] : view) {
    std::vector<std::string> row = {id};
    for (const std::string &label : schema.labels()) row.push_back(v.get(label) ? "1" : "0");
    write_csv_row(out, row);
  }
  return out.str();
}

double SubjectivityRow::subjective_rate() const {
  return total() ? static_cast<double>(subjective) / static_cast<double>(total()) : 0.0;
}

std::vector<SubjectivityRow> subjectivity_report(const std::vector<TriStateAnnotation> &log,
                                                 const LabelSchema &schema) {
  std::map<std::pair<std::string, std::string>, const TriStateAnnotation *> latest;
  for (const TriStateAnnotation &a : log) {
    const TriStateAnnotation *&slot = latest[{a.report_id, a.annotator_id}];
    if (!slot || a.sequence >= slot->sequence) slot = &a;
  }
  std::vector<SubjectivityRow> rows;
  for (const std::string &label : schema.labels()) {
    SubjectivityRow row;
    row.label = label;
    for (const auto &[key, a] : latest) {
      auto it = a->labels.find(label);
      if (it == a->labels.end()) continue;
      switch (it->second) {
        case TriState::kPositive: ++row.positive; break;
        case TriState::kNegative: ++row.negative; break;
        case TriState::kSubjectiveMention: ++row.subjective; break;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_subjectivity_csv(const std::vector<SubjectivityRow> &rows, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  write_csv_row(out, {"label", "positive", "negative", "subjective_mention", "total",
                      "subjective_rate"});
  for (const SubjectivityRow &r : rows) {
    write_csv_row(out, {r.label, std::to_string(r.positive), std::to_string(r.negative),
                        std::to_string(r.subjective), std::to_string(r.total()),
                        format_fixed(r.subjective_rate())});
  }
}

}  // namespace radlabel
