#include "radlabel/predictions_io.h"

#include <fstream>
#include <set>

#include "json.hpp"
#include "radlabel/errors.h"
#include "radlabel/text.h"

namespace radlabel {

using nlohmann::json;

void write_predictions(const PredictionSet &set, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  for (const auto &[id, v] : set.predictions) {
    json row = {{"report_id", id}, {"labeler", set.labeler_name}};
    json decisions = json::object();
    for (const auto &[label, value] : v.decisions) decisions[label] = value;
    row["decisions"] = std::move(decisions);
    auto status = set.status.find(id);
    row["status"] = status == set.status.end() ? "ok" : status->second;
    if (!v.uncertain.empty()) {
      json uncertain = json::object();
      for (const auto &[organ, flag] : v.uncertain) uncertain[organ] = flag;
      row["uncertain"] = std::move(uncertain);
    }
    out << row.dump() << '\n';
  }
  for (const PredictionError &e : set.errors) {
    json row = {{"report_id", e.report_id},
                {"labeler", set.labeler_name},
                {"status", "error"},
                {"reason", e.reason}};
    out << row.dump() << '\n';
  }
}

PredictionSet read_predictions(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open predictions " + path);
  PredictionSet set;
  std::set<std::string> seen;
  std::string line;
  std::size_t number = 0;
  bool named = false;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    const std::string where = path + ":" + std::to_string(number);
    try {
      json row = json::parse(line);
      std::string id = row.at("report_id").get<std::string>();
      std::string labeler = row.at("labeler").get<std::string>();
      if (!named) {
        set.labeler_name = labeler;
        named = true;
      } else if (labeler != set.labeler_name) {
        throw DataError(where + ": mixed labelers '" + set.labeler_name + "' and '" +
                        labeler + "'");
      }
      if (!seen.insert(id).second) {
        throw DataError(where + ": duplicate report_id '" + id + "'");
      }
      std::string status = row.value("status", "ok");
      if (status == "error") {
        set.errors.push_back({id, row.value("reason", "")});
        continue;
      }
      LabelVector v;
      for (const auto &[label, value] : row.at("decisions").items()) {
        if (value.is_boolean()) {
          v.decisions[label] = value.get<bool>();
        } else if (value.is_number_integer() &&
                   (value.get<int>() == 0 || value.get<int>() == 1)) {
          v.decisions[label] = value.get<int>() == 1;
        } else {
          throw DataError(where + ": non-binary decision for '" + label + "'");
        }
      }
      if (row.contains("uncertain")) {
        for (const auto &[organ, flag] : row["uncertain"].items()) {
          v.uncertain[organ] = flag.get<bool>();
        }
      }
      set.predictions[id] = std::move(v);
      set.status[id] = status;
    } catch (const json::exception &e) {
      throw DataError(where + ": " + e.what());
    }
  }
  return set;
}

void write_reference_csv(const ReferenceLabels &labels, const std::string &path,
                         const LabelSchema &schema) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  std::vector<std::string> header = {"report_id"};
  for (const std::string &label : schema.labels()) header.push_back(label);
  write_csv_row(out, header);
  for (const auto &[id, v] : labels) {
    std::vector<std::string> row = {id};
    for (const std::string &label : schema.labels()) {
      row.push_back(v.get(label) ? "1" : "0");
    }
    write_csv_row(out, row);
  }
}

ReferenceLabels read_reference_csv(const std::string &path, const LabelSchema &schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open labels " + path);
  std::vector<CsvRecord> records = read_csv(in);
  ReferenceLabels labels;
  if (records.empty()) throw DataError(path + ": missing header");
  const std::vector<std::string> &header = records.front().fields;
  if (header.empty() || header[0] != "report_id") {
    throw DataError(path + ": first column must be report_id");
  }
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (!schema.contains(header[c])) {
      throw DataError(path + ": unknown label column '" + header[c] + "'");
    }
  }
  for (std::size_t r = 1; r < records.size(); ++r) {
    const CsvRecord &rec = records[r];
    const std::string where = path + ":" + std::to_string(rec.line);
    if (rec.fields.size() != header.size()) throw DataError(where + ": wrong field count");
    LabelVector v;
    for (std::size_t c = 1; c < header.size(); ++c) {
      const std::string value(trim(rec.fields[c]));
      if (value != "0" && value != "1") {
        throw DataError(where + ": non-binary value for '" + header[c] + "'");
      }
      v.decisions[header[c]] = value == "1";
    }
    if (!labels.emplace(rec.fields[0], std::move(v)).second) {
      throw DataError(where + ": duplicate report_id '" + rec.fields[0] + "'");
    }
  }
  return labels;
}

}  // namespace radlabel
