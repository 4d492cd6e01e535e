#ifndef RADLABEL_SCHEMA_H_
#define RADLABEL_SCHEMA_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace radlabel {

struct OrganSystem {
  std::string name;
  std::vector<std::string> disease_labels;  // exactly 4
  std::string normal_label;
  // Listed in the prompt's DISEASE_LIST but absent from the output template
  // and from every label vector.
  std::vector<std::string> prompt_only_labels;

  bool operator==(const OrganSystem &) const = default;
};

// The canonical 15-label schema: 3 organ systems x (4 diseases + 1 normal).
// Immutable once constructed.
class LabelSchema {
 public:
  // Throws DataError if the organ list does not describe exactly 15 unique
  // labels, 4 disease labels and 1 normal label per organ system.
  explicit LabelSchema(std::vector<OrganSystem> organs);

  // The schema shipped with the toolkit.
  static const LabelSchema &Default();

  static LabelSchema FromJson(const nlohmann::json &doc);
  static LabelSchema Load(const std::string &path);
  nlohmann::json ToJson() const;

  const std::vector<OrganSystem> &organs() const { return organs_; }

  // All 15 labels, each organ's diseases followed by its normal label.
  const std::vector<std::string> &labels() const { return labels_; }

  bool contains(std::string_view label) const;
  std::optional<std::size_t> index_of(std::string_view label) const;

  // Organ system owning a label; throws DataError for unknown labels.
  const OrganSystem &organ_of(std::string_view label) const;
  const OrganSystem *find_organ(std::string_view name) const;
  bool is_normal(std::string_view label) const;

  bool operator==(const LabelSchema &other) const {
    return organs_ == other.organs_;
  }

 private:
  std::vector<OrganSystem> organs_;
  std::vector<std::string> labels_;
};

}  // namespace radlabel

#endif  // RADLABEL_SCHEMA_H_
