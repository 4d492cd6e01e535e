#ifndef RADLABEL_ANNOTATE_SERVER_H_
#define RADLABEL_ANNOTATE_SERVER_H_

#include <memory>
#include <string>
#include <vector>

#include "radlabel/annotate.h"
#include "radlabel/ingest.h"
#include "radlabel/types.h"

namespace radlabel {

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8642;  // 0 picks a free port
  bool show_predictions = false;
  std::string static_dir;  // UI assets; a placeholder page when empty
  std::vector<std::string> queue;  // report ids offered to new sessions
};

// HTTP+JSON front of an AnnotationStore:
//   GET  /api/sessions[?annotator=]        sessions in creation order
//   POST /api/sessions                     {annotator_id, report_ids?} -> session
//        Without report_ids the configured queue is used and the annotator's
//        existing session over it, if any, is resumed (200 instead of 201).
//   GET  /api/session/{id}                 session state
//   GET  /api/session/{id}/next            next pending report
//   POST /api/session/{id}/annotations     annotation -> acknowledgment
//   POST /api/session/{id}/skip            {report_id}
//   GET  /api/export?view=actionable|mention[&annotator=]   labels CSV
//   GET  /api/subjectivity                 per-label tri-state counts
//   GET  /api/schema                       organ systems and labels
// An X-Annotator-Id header, when sent, must match the session's annotator.
class AnnotationServer {
 public:
  AnnotationServer(AnnotationStore &store, const Corpus &corpus,
                   std::vector<PredictionSet> predictions, ServerOptions options,
                   const LabelSchema &schema = LabelSchema::Default());
  ~AnnotationServer();

  // Binds and returns the bound port. Throws DataError when binding fails.
  int bind();
  // Serves until stop(); call bind() first.
  void listen();
  void stop();
  void wait_until_ready();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace radlabel

#endif  // RADLABEL_ANNOTATE_SERVER_H_
