#include "radlabel/types.h"

#include <algorithm>
#include <iostream>
#include <set>

#include "radlabel/errors.h"

namespace radlabel {

void warn(const std::string &message) {
  std::cerr << "warning: " << message << "\n";
}

bool LabelVector::get(const std::string &label) const {
  auto it = decisions.find(label);
  return it != decisions.end() && it->second;
}

bool LabelVector::is_uncertain(const std::string &organ) const {
  auto it = uncertain.find(organ);
  return it != uncertain.end() && it->second;
}

LabelVector empty_vector(const LabelSchema &schema) {
  LabelVector v;
  for (const std::string &label : schema.labels()) v.decisions[label] = false;
  for (const OrganSystem &organ : schema.organs()) {
    v.uncertain[organ.name] = false;
  }
  return v;
}

bool PredictionSet::has_error(const std::string &report_id) const {
  return std::any_of(errors.begin(), errors.end(),
                     [&](const PredictionError &e) {
                       return e.report_id == report_id;
                     });
}

std::vector<std::string> PredictionSet::all_ids() const {
  std::set<std::string> ids;
  for (const auto &[id, v] : predictions) ids.insert(id);
  for (const PredictionError &e : errors) ids.insert(e.report_id);
  return {ids.begin(), ids.end()};
}

const char *to_string(TriState value) {
  switch (value) {
    case TriState::kNegative: return "negative";
    case TriState::kPositive: return "positive";
    case TriState::kSubjectiveMention: return "subjective_mention";
  }
  return "negative";
}

TriState parse_tristate(const std::string &text) {
  if (text == "negative") return TriState::kNegative;
  if (text == "positive") return TriState::kPositive;
  if (text == "subjective_mention") return TriState::kSubjectiveMention;
  throw DataError("invalid annotation value '" + text + "'");
}

PredictionSet project_labels(const PredictionSet &pred,
                             const std::vector<std::string> &keep,
                             const LabelSchema &schema) {
  std::set<std::string> keep_set;
  std::set<std::string> organs;
  for (const std::string &label : keep) {
    if (!schema.contains(label)) {
      throw DataError("unknown label '" + label + "'");
    }
    keep_set.insert(label);
    organs.insert(schema.organ_of(label).name);
  }
  PredictionSet out;
  out.labeler_name = pred.labeler_name;
  out.status = pred.status;
  out.errors = pred.errors;
  for (const auto &[id, v] : pred.predictions) {
    LabelVector projected;
    for (const auto &[label, value] : v.decisions) {
      if (keep_set.count(label)) projected.decisions[label] = value;
    }
    for (const auto &[organ, flag] : v.uncertain) {
      if (organs.count(organ)) projected.uncertain[organ] = flag;
    }
    out.predictions.emplace(id, std::move(projected));
  }
  return out;
}

std::vector<std::string> validate_label_vector(const LabelVector &v,
                                               const LabelSchema &schema) {
  std::vector<std::string> violations;
  std::vector<std::string> missing;
  std::vector<std::string> extra;
  for (const std::string &label : schema.labels()) {
    if (!v.decisions.count(label)) missing.push_back(label);
  }
  for (const auto &[label, value] : v.decisions) {
    if (!schema.contains(label)) extra.push_back(label);
  }
  auto join = [](const std::vector<std::string> &names) {
    std::string out;
    for (const std::string &n : names) out += (out.empty() ? "" : ", ") + n;
    return out;
  };
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "coverage:";
    if (!missing.empty()) msg += " missing [" + join(missing) + "]";
    if (!extra.empty()) msg += " extra [" + join(extra) + "]";
    violations.push_back(msg);
  }
  for (const auto &[organ, flag] : v.uncertain) {
    if (!schema.find_organ(organ)) {
      violations.push_back("unknown organ system '" + organ + "'");
    }
  }
  for (const OrganSystem &organ : schema.organs()) {
    bool any_disease = false;
    for (const std::string &d : organ.disease_labels) any_disease |= v.get(d);
    bool normal = v.get(organ.normal_label);
    if (v.is_uncertain(organ.name) && (any_disease || normal)) {
      violations.push_back("uncertain organ '" + organ.name +
                           "' has positive labels");
    }
    if (normal && any_disease) {
      violations.push_back("normal/disease conflict in '" + organ.name + "'");
    }
  }
  return violations;
}

int count_normal_conflicts(const LabelVector &v, const LabelSchema &schema) {
  int conflicts = 0;
  for (const OrganSystem &organ : schema.organs()) {
    if (!v.get(organ.normal_label)) continue;
    for (const std::string &d : organ.disease_labels) {
      if (v.get(d)) {
        ++conflicts;
        break;
      }
    }
  }
  return conflicts;
}

}  // namespace radlabel
