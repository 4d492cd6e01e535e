#include "radlabel/ensemble.h"

#include <set>

#include "radlabel/errors.h"

namespace radlabel {

TiePolicy parse_tie_policy(const std::string &name) {
  if (name == "negative") return TiePolicy::kNegative;
  if (name == "positive") return TiePolicy::kPositive;
  if (name == "reject-even" || name == "reject_even") return TiePolicy::kRejectEven;
  throw DataError("unknown tie policy '" + name + "'");
}

namespace {

bool decide(std::size_t yes, std::size_t total, TiePolicy tie,
            const std::string &report_id, const std::string &what) {
  if (2 * yes > total) return true;
  if (2 * yes < total) return false;
  switch (tie) {
    case TiePolicy::kNegative: return false;
    case TiePolicy::kPositive: return true;
    case TiePolicy::kRejectEven: break;
  }
  throw DataError("tie on '" + what + "' for report '" + report_id +
                  "' with an even panel");
}

}  // namespace

PredictionSet majority_vote(const std::vector<PredictionSet> &panel, TiePolicy tie) {
  if (panel.size() < 2) throw DataError("majority vote needs at least 2 labelers");
  PredictionSet out;
  out.labeler_name = "ensemble(";
  for (std::size_t i = 0; i < panel.size(); ++i) {
    out.labeler_name += (i ? "," : "") + panel[i].labeler_name;
  }
  out.labeler_name += ")";

  std::set<std::string> ids;
  for (const PredictionSet &p : panel) {
    for (const std::string &id : p.all_ids()) ids.insert(id);
  }
  const std::size_t total = panel.size();
  for (const std::string &id : ids) {
    std::vector<const LabelVector *> votes;
    for (const PredictionSet &p : panel) {
      auto it = p.predictions.find(id);
      if (it == p.predictions.end()) break;
      votes.push_back(&it->second);
    }
    if (votes.size() != total) {
      out.errors.push_back({id, "incomplete-panel"});
      continue;
    }
    LabelVector result;
    for (const auto &[label, unused] : votes.front()->decisions) {
      std::size_t yes = 0;
      for (const LabelVector *v : votes) {
        auto it = v->decisions.find(label);
        if (it == v->decisions.end()) {
          throw DataError("report '" + id + "': label '" + label +
                          "' missing from a panel member");
        }
        yes += it->second;
      }
      result.decisions[label] = decide(yes, total, tie, id, label);
    }
    for (const LabelVector *v : votes) {
      if (v->decisions.size() != result.decisions.size()) {
        throw DataError("report '" + id + "': panel members disagree on the label set");
      }
    }
    std::set<std::string> organs;
    for (const LabelVector *v : votes) {
      for (const auto &[organ, flag] : v->uncertain) organs.insert(organ);
    }
    for (const std::string &organ : organs) {
      std::size_t yes = 0;
      for (const LabelVector *v : votes) yes += v->is_uncertain(organ);
      result.uncertain[organ] = 2 * yes > total;
    }
    out.predictions[id] = std::move(result);
    out.status[id] = "vote";
  }
  return out;
}

}  // namespace radlabel
