#include "radlabel/schema.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "radlabel/errors.h"
#include "radlabel/resources.h"

namespace radlabel {

LabelSchema::LabelSchema(std::vector<OrganSystem> organs)
    : organs_(std::move(organs)) {
  if (organs_.size() != 3) {
    throw DataError("schema: expected 3 organ systems, got " +
                    std::to_string(organs_.size()));
  }
  std::set<std::string> seen;
  for (const OrganSystem &organ : organs_) {
    if (organ.name.empty()) throw DataError("schema: organ without a name");
    if (organ.disease_labels.size() != 4) {
      throw DataError("schema: organ '" + organ.name +
                      "' must have exactly 4 disease labels");
    }
    if (organ.normal_label.empty()) {
      throw DataError("schema: organ '" + organ.name + "' has no normal label");
    }
    for (const std::string &label : organ.disease_labels) {
      labels_.push_back(label);
    }
    labels_.push_back(organ.normal_label);
  }
  for (const std::string &label : labels_) {
    if (label.empty()) throw DataError("schema: empty label name");
    if (!seen.insert(label).second) {
      throw DataError("schema: duplicate label '" + label + "'");
    }
  }
  for (const OrganSystem &organ : organs_) {
    for (const std::string &extra : organ.prompt_only_labels) {
      if (seen.count(extra)) {
        throw DataError("schema: prompt-only label '" + extra +
                        "' is also a canonical label");
      }
    }
  }
}

const LabelSchema &LabelSchema::Default() {
  static const LabelSchema schema = FromJson(
      nlohmann::json::parse(resources::default_schema_json()));
  return schema;
}

LabelSchema LabelSchema::FromJson(const nlohmann::json &doc) {
  std::vector<OrganSystem> organs;
  try {
    for (const auto &entry : doc.at("organ_systems")) {
      OrganSystem organ;
      organ.name = entry.at("name").get<std::string>();
      organ.disease_labels =
          entry.at("disease_labels").get<std::vector<std::string>>();
      organ.normal_label = entry.at("normal_label").get<std::string>();
      if (entry.contains("prompt_only_labels")) {
        organ.prompt_only_labels =
            entry.at("prompt_only_labels").get<std::vector<std::string>>();
      }
      organs.push_back(std::move(organ));
    }
  } catch (const nlohmann::json::exception &e) {
    throw DataError(std::string("schema: ") + e.what());
  }
  return LabelSchema(std::move(organs));
}

LabelSchema LabelSchema::Load(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DataError("schema: cannot open " + path);
  try {
    return FromJson(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error &e) {
    throw DataError("schema: " + path + ": " + e.what());
  }
}

nlohmann::json LabelSchema::ToJson() const {
  nlohmann::json organs = nlohmann::json::array();
  for (const OrganSystem &organ : organs_) {
    nlohmann::json entry = {{"name", organ.name},
                            {"disease_labels", organ.disease_labels},
                            {"normal_label", organ.normal_label}};
    if (!organ.prompt_only_labels.empty()) {
      entry["prompt_only_labels"] = organ.prompt_only_labels;
    }
    organs.push_back(std::move(entry));
  }
  return {{"organ_systems", std::move(organs)}};
}

bool LabelSchema::contains(std::string_view label) const {
  return index_of(label).has_value();
}

std::optional<std::size_t> LabelSchema::index_of(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

const OrganSystem &LabelSchema::organ_of(std::string_view label) const {
  for (const OrganSystem &organ : organs_) {
    if (organ.normal_label == label) return organ;
    for (const std::string &disease : organ.disease_labels) {
      if (disease == label) return organ;
    }
  }
  throw DataError("unknown label '" + std::string(label) + "'");
}

const OrganSystem *LabelSchema::find_organ(std::string_view name) const {
  for (const OrganSystem &organ : organs_) {
    if (organ.name == name) return &organ;
  }
  return nullptr;
}

bool LabelSchema::is_normal(std::string_view label) const {
  for (const OrganSystem &organ : organs_) {
    if (organ.normal_label == label) return true;
  }
  return false;
}

}  // namespace radlabel
