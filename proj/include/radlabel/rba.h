#ifndef RADLABEL_RBA_H_
#define RADLABEL_RBA_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "radlabel/ingest.h"
#include "radlabel/schema.h"
#include "radlabel/types.h"

namespace radlabel {

// A lexicon phrase stored as plural-folded word tokens.
using Phrase = std::vector<std::string>;

struct OrganLexicon {
  std::string organ;  // organ system name in the schema
  std::vector<Phrase> anchors;
  std::vector<Phrase> normal_terms;
};

struct DiseaseLexicon {
  std::string label;
  std::string organ;
  std::vector<Phrase> single_organ;  // fire without organ context
  std::vector<Phrase> multi_organ;   // need an anchor or active subheader
  std::vector<Phrase> suppressors;
};

// Term inventory of the rule-based annotator, validated against a schema.
class Lexicon {
 public:
  static Lexicon FromJson(const nlohmann::json &doc,
                          const LabelSchema &schema = LabelSchema::Default());
  static Lexicon Default();

  const std::vector<OrganLexicon> &organs() const { return organs_; }
  const std::vector<DiseaseLexicon> &diseases() const { return diseases_; }
  const std::vector<Phrase> &negations() const { return negations_; }
  const std::vector<Phrase> &qualifiers() const { return qualifiers_; }
  std::size_t suppressor_window() const { return suppressor_window_; }
  const LabelSchema &schema() const { return schema_; }

  const OrganLexicon *find_organ(const std::string &organ) const;

 private:
  explicit Lexicon(LabelSchema schema) : schema_(std::move(schema)) {}

  LabelSchema schema_;
  std::vector<OrganLexicon> organs_;
  std::vector<DiseaseLexicon> diseases_;
  std::vector<Phrase> negations_;
  std::vector<Phrase> qualifiers_;
  std::size_t suppressor_window_ = 3;
};

Lexicon load_lexicon(const std::string &path,
                     const LabelSchema &schema = LabelSchema::Default());

// Crude English plural folding shared by lexicon terms and report text:
// "lesions" -> "lesion", "cavities" -> "cavity", "masses" -> "mass".
std::string fold_plural(const std::string &token);

enum class Polarity { kAsserted, kNegated, kSuppressed };
enum class ContextSource { kNone, kAnchorInSentence, kSubheader };

const char *to_string(Polarity p);

struct SentenceFinding {
  enum class Kind { kDisease, kNormal };

  std::size_t sentence_index = 0;
  Kind kind = Kind::kDisease;
  std::string label;  // disease label, or the organ's normal label
  std::string organ;
  Polarity polarity = Polarity::kAsserted;
  std::string matched_term;
  ContextSource context = ContextSource::kNone;
  bool low_confidence = false;  // the sentence carries a qualifier term
};

std::vector<SentenceFinding> classify_sentence(
    const Sentence &sentence, const std::optional<std::string> &subheader_organ,
    const Lexicon &lexicon);

struct RbaOptions {
  // When set, a suppressed-only disease mention keeps the organ from being
  // called normal (it turns uncertain instead).
  bool suppressed_blocks_normal = false;
  SegmenterConfig segmenter;
};

// Per-organ resolution over all sentences of the findings. Throws DataError
// when the record has no findings.
LabelVector classify_report(const ReportRecord &record, const Lexicon &lexicon,
                            const RbaOptions &options = {});

// Same, but also returns the per-sentence evidence.
LabelVector classify_report(const ReportRecord &record, const Lexicon &lexicon,
                            const RbaOptions &options,
                            std::vector<SentenceFinding> *evidence);

// Labels every report; records without findings land in the error ledger
// with reason "no-findings".
PredictionSet rba_label_corpus(const Corpus &corpus, const Lexicon &lexicon,
                               const RbaOptions &options = {});

}  // namespace radlabel

#endif  // RADLABEL_RBA_H_
