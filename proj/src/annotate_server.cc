#include "radlabel/annotate_server.h"

#include <map>

#include "httplib.h"
#include "json.hpp"
#include "radlabel/errors.h"

namespace radlabel {

using nlohmann::json;

namespace {

constexpr const char *kPlaceholderPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>radlabel annotate</title></head>
<body>
<h1>radlabel annotation service</h1>
<p>No UI assets are mounted. Start the server with <code>--static DIR</code> to serve
them, or use the JSON API directly:</p>
<ul>
<li><code>POST /api/sessions</code></li>
<li><code>GET /api/session/{id}</code></li>
<li><code>GET /api/session/{id}/next</code></li>
<li><code>POST /api/session/{id}/annotations</code></li>
<li><code>POST /api/session/{id}/skip</code></li>
<li><code>GET /api/export?view=actionable|mention</code></li>
<li><code>GET /api/subjectivity</code></li>
<li><code>GET /api/schema</code></li>
</ul>
</body></html>
)";

struct Document {
  std::string text;
  bool findings_missing = false;
};

void reply(httplib::Response &res, int status, const json &body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response &res, int status, const std::string &kind,
                 const std::string &message) {
  reply(res, status, {{"error", kind}, {"message", message}});
}

}  // namespace

struct AnnotationServer::Impl {
  AnnotationStore &store;
  const LabelSchema &schema;
  std::map<std::string, Document> documents;
  std::vector<PredictionSet> predictions;
  ServerOptions options;
  httplib::Server server;
  int port = 0;

  Impl(AnnotationStore &s, const Corpus &corpus, std::vector<PredictionSet> preds,
       ServerOptions opts, const LabelSchema &sch)
      : store(s), schema(sch), predictions(std::move(preds)), options(std::move(opts)) {
    for (const ReportRecord &r : corpus.reports) {
      const ReportRecord sectioned =
          r.findings_state == FindingsState::kUnsectioned ? extract_findings(r) : r;
      documents[r.report_id] = sectioned.findings ? Document{*sectioned.findings, false}
                                                  : Document{r.raw_text, true};
    }
    routes();
  }

  // Looks the session up and checks the optional annotator header.
  std::optional<AnnotationSession> authorize(const httplib::Request &req,
                                             httplib::Response &res) {
    const std::string id = req.path_params.at("id");
    std::optional<AnnotationSession> s = store.session(id);
    if (!s) {
      reply_error(res, 404, "not-found", "unknown session '" + id + "'");
      return std::nullopt;
    }
    const std::string who = req.get_header_value("X-Annotator-Id");
    if (!who.empty() && who != s->annotator_id) {
      reply_error(res, 403, "forbidden",
                  "annotator '" + who + "' does not own session '" + id + "'");
      return std::nullopt;
    }
    return s;
  }

  json next_payload(const AnnotationSession &s) const {
    json out = {{"session_id", s.session_id}, {"total", s.queue.size()},
                {"counts", session_to_json(s)["counts"]}};
    std::optional<std::string> next = s.next();
    out["done"] = !next.has_value();
    if (!next) return out;
    out["report_id"] = *next;
    out["position"] = s.cursor;
    auto doc = documents.find(*next);
    out["findings"] = doc == documents.end() ? "" : doc->second.text;
    out["findings_missing"] = doc == documents.end() || doc->second.findings_missing;
    if (options.show_predictions) {
      json preds = json::object();
      for (const PredictionSet &p : predictions) {
        auto it = p.predictions.find(*next);
        if (it == p.predictions.end()) continue;
        preds[p.labeler_name] = it->second.decisions;
      }
      out["predictions"] = preds;
    }
    return out;
  }

  void routes() {
    server.set_exception_handler(
        [](const httplib::Request &, httplib::Response &res, std::exception_ptr ep) {
          try {
            std::rethrow_exception(ep);
          } catch (const DataError &e) {
            reply_error(res, 400, "data", e.what());
          } catch (const json::exception &e) {
            reply_error(res, 400, "data", e.what());
          } catch (const std::exception &e) {
            reply_error(res, 500, "internal", e.what());
          }
        });

    server.Get("/api/schema", [this](const httplib::Request &, httplib::Response &res) {
      json organs = json::array();
      for (const OrganSystem &o : schema.organs()) {
        organs.push_back({{"name", o.name},
                          {"disease_labels", o.disease_labels},
                          {"normal_label", o.normal_label}});
      }
      reply(res, 200,
            {{"organ_systems", organs},
             {"labels", schema.labels()},
             {"values", {"negative", "positive", "subjective_mention"}}});
    });

    server.Get("/api/sessions", [this](const httplib::Request &req, httplib::Response &res) {
      json out = json::array();
      const std::string who = req.get_param_value("annotator");
      for (const AnnotationSession &s : store.sessions()) {
        if (who.empty() || s.annotator_id == who) out.push_back(session_to_json(s));
      }
      reply(res, 200, out);
    });

    server.Post("/api/sessions", [this](const httplib::Request &req, httplib::Response &res) {
      const json body = req.body.empty() ? json::object() : json::parse(req.body);
      std::string annotator = body.value("annotator_id", "");
      if (annotator.empty()) annotator = req.get_header_value("X-Annotator-Id");
      if (annotator.empty()) throw DataError("annotator_id is required");
      if (!body.contains("report_ids")) {
        if (options.queue.empty()) throw DataError("no report queue is configured");
        if (auto existing = store.find_session(annotator, options.queue)) {
          reply(res, 200, session_to_json(*existing));
          return;
        }
        reply(res, 201, session_to_json(store.start_session(annotator, options.queue)));
        return;
      }
      const auto ids = body.at("report_ids").get<std::vector<std::string>>();
      reply(res, 201, session_to_json(store.start_session(annotator, ids)));
    });

    server.Get("/api/session/:id", [this](const httplib::Request &req, httplib::Response &res) {
      if (auto s = authorize(req, res)) reply(res, 200, session_to_json(*s));
    });

    server.Get("/api/session/:id/next",
               [this](const httplib::Request &req, httplib::Response &res) {
                 if (auto s = authorize(req, res)) reply(res, 200, next_payload(*s));
               });

    server.Post("/api/session/:id/annotations",
                [this](const httplib::Request &req, httplib::Response &res) {
                  auto s = authorize(req, res);
                  if (!s) return;
                  TriStateAnnotation a = annotation_from_json(json::parse(req.body));
                  if (a.annotator_id.empty()) a.annotator_id = req.get_header_value("X-Annotator-Id");
                  const std::string problem = annotation_coverage_error(a, schema);
                  if (!problem.empty()) {
                    json missing = json::array();
                    for (const std::string &label : schema.labels()) {
                      if (!a.labels.count(label)) missing.push_back(label);
                    }
                    reply(res, 400, {{"error", "incomplete"}, {"message", problem},
                                     {"missing", missing}});
                    return;
                  }
                  const TriStateAnnotation stored = store.submit(s->session_id, a);
                  const AnnotationSession after = *store.session(s->session_id);
                  reply(res, 200, {{"ok", true},
                                   {"sequence", stored.sequence},
                                   {"session", session_to_json(after)},
                                   {"next", next_payload(after)}});
                });

    server.Post("/api/session/:id/skip",
                [this](const httplib::Request &req, httplib::Response &res) {
                  auto s = authorize(req, res);
                  if (!s) return;
                  const json body = json::parse(req.body);
                  store.skip(s->session_id, body.at("report_id").get<std::string>());
                  reply(res, 200, session_to_json(*store.session(s->session_id)));
                });

    server.Get("/api/export", [this](const httplib::Request &req, httplib::Response &res) {
      const ViewKind kind = parse_view_kind(req.get_param_value("view"));
      std::optional<std::string> annotator;
      if (req.has_param("annotator")) annotator = req.get_param_value("annotator");
      const ReferenceLabels view = derive_view(store.annotations(), kind, annotator, schema);
      res.set_content(reference_csv_text(view, schema), "text/csv");
    });

    server.Get("/api/subjectivity", [this](const httplib::Request &, httplib::Response &res) {
      json rows = json::array();
      for (const SubjectivityRow &r : subjectivity_report(store.annotations(), schema)) {
        rows.push_back({{"label", r.label},
                        {"positive", r.positive},
                        {"negative", r.negative},
                        {"subjective_mention", r.subjective},
                        {"total", r.total()},
                        {"subjective_rate", r.subjective_rate()}});
      }
      reply(res, 200, rows);
    });

    if (!options.static_dir.empty()) {
      if (!server.set_mount_point("/", options.static_dir)) {
        throw DataError("static directory '" + options.static_dir + "' does not exist");
      }
    } else {
      server.Get("/", [](const httplib::Request &, httplib::Response &res) {
        res.set_content(kPlaceholderPage, "text/html");
      });
    }
  }
};

AnnotationServer::AnnotationServer(AnnotationStore &store, const Corpus &corpus,
                                   std::vector<PredictionSet> predictions,
                                   ServerOptions options, const LabelSchema &schema)
    : impl_(std::make_unique<Impl>(store, corpus, std::move(predictions), std::move(options),
                                   schema)) {}

AnnotationServer::~AnnotationServer() = default;

int AnnotationServer::bind() {
  Impl &d = *impl_;
  if (d.options.port == 0) {
    d.port = d.server.bind_to_any_port(d.options.host);
  } else {
    d.port = d.server.bind_to_port(d.options.host, d.options.port) ? d.options.port : -1;
  }
  if (d.port <= 0) {
    throw DataError("cannot bind " + d.options.host + ":" + std::to_string(d.options.port));
  }
  return d.port;
}

void AnnotationServer::listen() { impl_->server.listen_after_bind(); }

void AnnotationServer::stop() { impl_->server.stop(); }

void AnnotationServer::wait_until_ready() { impl_->server.wait_until_ready(); }

}  // namespace radlabel
