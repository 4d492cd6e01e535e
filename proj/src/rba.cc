#include "radlabel/rba.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "radlabel/errors.h"
#include "radlabel/resources.h"
#include "radlabel/text.h"

namespace radlabel {

using nlohmann::json;

std::string fold_plural(const std::string &token) {
  const std::size_t n = token.size();
  auto ends_with = [&](const char *suffix) {
    std::string_view s(suffix);
    return n >= s.size() && std::string_view(token).substr(n - s.size()) == s;
  };
  if (n > 4 && ends_with("ies")) return token.substr(0, n - 3) + "y";
  if (n > 4 && ends_with("sses")) return token.substr(0, n - 2);
  if (n > 3 && ends_with("s") && !ends_with("ss") && !ends_with("us") &&
      !ends_with("is")) {
    return token.substr(0, n - 1);
  }
  return token;
}

namespace {

Phrase to_phrase(const std::string &term) {
  Phrase phrase;
  for (const Token &t : word_tokens(term)) phrase.push_back(fold_plural(t.text));
  return phrase;
}

std::vector<Phrase> phrases(const json &list, const std::string &where) {
  std::vector<Phrase> out;
  for (const auto &item : list) {
    Phrase p = to_phrase(item.get<std::string>());
    if (p.empty()) throw DataError("lexicon: empty term in " + where);
    out.push_back(std::move(p));
  }
  return out;
}

// Start positions of every occurrence of `phrase` in `tokens`.
std::vector<std::size_t> occurrences(const std::vector<std::string> &tokens,
                                     const Phrase &phrase) {
  std::vector<std::size_t> starts;
  if (phrase.empty() || phrase.size() > tokens.size()) return starts;
  for (std::size_t i = 0; i + phrase.size() <= tokens.size(); ++i) {
    if (std::equal(phrase.begin(), phrase.end(), tokens.begin() + i)) {
      starts.push_back(i);
    }
  }
  return starts;
}

std::string join(const Phrase &p) {
  std::string out;
  for (const std::string &t : p) out += (out.empty() ? "" : " ") + t;
  return out;
}

}  // namespace

Lexicon Lexicon::FromJson(const json &doc, const LabelSchema &schema) {
  Lexicon lex(schema);
  try {
    lex.negations_ = phrases(doc.at("negation_terms"), "negation_terms");
    lex.qualifiers_ = phrases(doc.value("qualifier_terms", json::array()),
                              "qualifier_terms");
    lex.suppressor_window_ = doc.value("suppressor_window", std::size_t{3});

    const json &organs = doc.at("organ_systems");
    for (const auto &[name, entry] : organs.items()) {
      if (!schema.find_organ(name)) {
        throw DataError("lexicon: unknown organ system '" + name + "'");
      }
    }
    for (const OrganSystem &organ : schema.organs()) {
      if (!organs.contains(organ.name)) {
        throw DataError("lexicon: no terms for organ system '" + organ.name + "'");
      }
      const json &entry = organs.at(organ.name);
      OrganLexicon ol{organ.name,
                      phrases(entry.value("anchors", json::array()), organ.name),
                      phrases(entry.value("normal_terms", json::array()), organ.name)};
      if (ol.anchors.empty()) {
        throw DataError("lexicon: organ system '" + organ.name + "' has no anchors");
      }
      if (ol.normal_terms.empty()) {
        throw DataError("lexicon: organ system '" + organ.name +
                        "' has no normal terms");
      }
      lex.organs_.push_back(std::move(ol));
    }

    const json &labels = doc.at("labels");
    for (const auto &[name, entry] : labels.items()) {
      if (!schema.contains(name)) {
        throw DataError("lexicon: unknown label '" + name + "'");
      }
      if (schema.is_normal(name)) {
        throw DataError("lexicon: '" + name +
                        "' is a normal label; use organ normal_terms");
      }
    }
    for (const OrganSystem &organ : schema.organs()) {
      for (const std::string &label : organ.disease_labels) {
        if (!labels.contains(label)) {
          throw DataError("lexicon: no terms for label '" + label + "'");
        }
        const json &entry = labels.at(label);
        DiseaseLexicon dl{label, organ.name,
                          phrases(entry.value("single_organ", json::array()), label),
                          phrases(entry.value("multi_organ", json::array()), label),
                          phrases(entry.value("suppressors", json::array()), label)};
        if (dl.single_organ.empty() && dl.multi_organ.empty()) {
          throw DataError("lexicon: label '" + label + "' has no descriptors");
        }
        lex.diseases_.push_back(std::move(dl));
      }
    }
  } catch (const json::exception &e) {
    throw DataError(std::string("lexicon: ") + e.what());
  }
  return lex;
}

Lexicon Lexicon::Default() {
  return FromJson(json::parse(resources::default_lexicon_json()));
}

const OrganLexicon *Lexicon::find_organ(const std::string &organ) const {
  for (const OrganLexicon &o : organs_) {
    if (o.organ == organ) return &o;
  }
  return nullptr;
}

Lexicon load_lexicon(const std::string &path, const LabelSchema &schema) {
  std::ifstream in(path);
  if (!in) throw DataError("lexicon: cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error &e) {
    throw DataError("lexicon: " + path + ": " + e.what());
  }
  return Lexicon::FromJson(doc, schema);
}

const char *to_string(Polarity p) {
  switch (p) {
    case Polarity::kAsserted: return "asserted";
    case Polarity::kNegated: return "negated";
    case Polarity::kSuppressed: return "suppressed";
  }
  return "asserted";
}

namespace {

struct Match {
  std::size_t begin;
  std::size_t end;
  const Phrase *phrase;
};

std::vector<Match> find_all(const std::vector<std::string> &tokens,
                            const std::vector<Phrase> &list) {
  std::vector<Match> out;
  for (const Phrase &p : list) {
    for (std::size_t s : occurrences(tokens, p)) out.push_back({s, s + p.size(), &p});
  }
  return out;
}

// A descriptor is negated by any negation term that starts before it.
bool negated_before(const std::vector<Match> &negations, const Match &m) {
  return std::any_of(negations.begin(), negations.end(),
                     [&](const Match &n) { return n.begin < m.begin; });
}

// Normal terms only take negation from the immediately preceding words
// ("not clear"), so "No effusion, lungs are clear." still reads as normal.
bool negated_adjacent(const std::vector<Match> &negations, const Match &m) {
  return std::any_of(negations.begin(), negations.end(), [&](const Match &n) {
    return n.end <= m.begin && m.begin - n.end <= 1;
  });
}

bool within_window(const Match &a, const Match &b, std::size_t window) {
  if (a.end <= b.begin) return b.begin - a.end < window;
  if (b.end <= a.begin) return a.begin - b.end < window;
  return true;
}

}  // namespace

std::vector<SentenceFinding> classify_sentence(
    const Sentence &sentence, const std::optional<std::string> &subheader_organ,
    const Lexicon &lexicon) {
  std::vector<std::string> tokens;
  for (const Token &t : word_tokens(sentence.text)) tokens.push_back(fold_plural(t.text));

  const std::vector<Match> negations = find_all(tokens, lexicon.negations());
  const bool low_confidence = !find_all(tokens, lexicon.qualifiers()).empty();
  std::set<std::string> anchored;
  for (const OrganLexicon &organ : lexicon.organs()) {
    if (!find_all(tokens, organ.anchors).empty()) anchored.insert(organ.organ);
  }

  std::vector<SentenceFinding> findings;
  for (const DiseaseLexicon &disease : lexicon.diseases()) {
    std::vector<std::pair<Match, ContextSource>> hits;
    for (const Match &m : find_all(tokens, disease.single_organ)) {
      hits.emplace_back(m, anchored.count(disease.organ) ? ContextSource::kAnchorInSentence
                                                        : ContextSource::kNone);
    }
    ContextSource multi_context = ContextSource::kNone;
    if (anchored.count(disease.organ)) {
      multi_context = ContextSource::kAnchorInSentence;
    } else if (subheader_organ && *subheader_organ == disease.organ) {
      multi_context = ContextSource::kSubheader;
    }
    if (multi_context != ContextSource::kNone) {
      for (const Match &m : find_all(tokens, disease.multi_organ)) {
        hits.emplace_back(m, multi_context);
      }
    }
    // Drop matches nested inside a longer match for the same label.
    std::sort(hits.begin(), hits.end(), [](const auto &a, const auto &b) {
      if (a.first.begin != b.first.begin) return a.first.begin < b.first.begin;
      return a.first.end > b.first.end;
    });
    std::size_t covered_to = 0;
    const std::vector<Match> suppressors = find_all(tokens, disease.suppressors);
    for (const auto &[m, context] : hits) {
      if (m.end <= covered_to) continue;
      covered_to = m.end;
      SentenceFinding f;
      f.sentence_index = sentence.index;
      f.kind = SentenceFinding::Kind::kDisease;
      f.label = disease.label;
      f.organ = disease.organ;
      f.matched_term = join(*m.phrase);
      f.context = context;
      f.low_confidence = low_confidence;
      if (negated_before(negations, m)) {
        f.polarity = Polarity::kNegated;
      } else if (std::any_of(suppressors.begin(), suppressors.end(), [&](const Match &s) {
                   return within_window(s, m, lexicon.suppressor_window());
                 })) {
        f.polarity = Polarity::kSuppressed;
      }
      findings.push_back(std::move(f));
    }
  }

  for (const OrganLexicon &organ : lexicon.organs()) {
    ContextSource context = ContextSource::kNone;
    if (anchored.count(organ.organ)) {
      context = ContextSource::kAnchorInSentence;
    } else if (subheader_organ && *subheader_organ == organ.organ) {
      context = ContextSource::kSubheader;
    } else {
      continue;
    }
    const OrganSystem *system = lexicon.schema().find_organ(organ.organ);
    for (const Match &m : find_all(tokens, organ.normal_terms)) {
      SentenceFinding f;
      f.sentence_index = sentence.index;
      f.kind = SentenceFinding::Kind::kNormal;
      f.label = system->normal_label;
      f.organ = organ.organ;
      f.matched_term = join(*m.phrase);
      f.context = context;
      f.low_confidence = low_confidence;
      if (negated_adjacent(negations, m)) f.polarity = Polarity::kNegated;
      findings.push_back(std::move(f));
    }
  }
  return findings;
}

namespace {

// "LUNGS:" / "Liver and gallbladder:" at the start of a sentence. Returns the
// header text, or nothing when the sentence does not open with a subheader.
std::optional<std::string> subheader_prefix(const std::string &text) {
  std::size_t colon = text.find(':');
  if (colon == std::string::npos || colon == 0) return std::nullopt;
  std::string prefix = text.substr(0, colon);
  for (char c : prefix) {
    if (!(std::isalpha(static_cast<unsigned char>(c)) || c == ' ' || c == '/' ||
          c == ',' || c == '&' || c == '-')) {
      return std::nullopt;
    }
  }
  if (word_tokens(prefix).size() > 6) return std::nullopt;
  return prefix;
}

std::optional<std::string> subheader_organ(const std::string &header,
                                           const Lexicon &lexicon) {
  std::vector<std::string> tokens;
  for (const Token &t : word_tokens(header)) tokens.push_back(fold_plural(t.text));
  std::optional<std::string> found;
  for (const OrganLexicon &organ : lexicon.organs()) {
    if (find_all(tokens, organ.anchors).empty()) continue;
    if (found) return std::nullopt;  // mixed header, no single organ context
    found = organ.organ;
  }
  return found;
}

struct DiseaseState {
  bool asserted = false;
  bool negated = false;
  bool suppressed = false;
};

}  // namespace

LabelVector classify_report(const ReportRecord &record, const Lexicon &lexicon,
                            const RbaOptions &options) {
  return classify_report(record, lexicon, options, nullptr);
}

LabelVector classify_report(const ReportRecord &record, const Lexicon &lexicon,
                            const RbaOptions &options,
                            std::vector<SentenceFinding> *evidence) {
  if (!record.findings) {
    throw DataError("report '" + record.report_id + "' has no findings");
  }
  const std::string &findings = *record.findings;
  std::vector<Sentence> sentences = segment_sentences(findings, options.segmenter);

  std::map<std::string, DiseaseState> diseases;
  std::set<std::string> normal_organs;
  std::optional<std::string> active;
  std::size_t previous_end = 0;
  for (const Sentence &s : sentences) {
    std::string_view gap =
        std::string_view(findings).substr(previous_end, s.begin - previous_end);
    if (std::count(gap.begin(), gap.end(), '\n') >= 2) active.reset();
    previous_end = s.end;
    if (auto header = subheader_prefix(s.text)) {
      active = subheader_organ(*header, lexicon);
    }
    for (SentenceFinding &f : classify_sentence(s, active, lexicon)) {
      if (f.kind == SentenceFinding::Kind::kDisease) {
        DiseaseState &state = diseases[f.label];
        switch (f.polarity) {
          case Polarity::kAsserted: state.asserted = true; break;
          case Polarity::kNegated: state.negated = true; break;
          case Polarity::kSuppressed: state.suppressed = true; break;
        }
      } else if (f.polarity == Polarity::kAsserted && !f.low_confidence) {
        normal_organs.insert(f.organ);
      }
      if (evidence) evidence->push_back(std::move(f));
    }
  }

  LabelVector out = empty_vector(lexicon.schema());
  for (const OrganSystem &organ : lexicon.schema().organs()) {
    bool any_positive = false;
    bool unresolved = false;
    for (const std::string &label : organ.disease_labels) {
      const DiseaseState &state = diseases[label];
      if (state.asserted) {
        out.decisions[label] = true;
        any_positive = true;
      } else if (state.suppressed && !state.negated &&
                 options.suppressed_blocks_normal) {
        unresolved = true;
      }
    }
    if (any_positive) continue;
    if (!unresolved && normal_organs.count(organ.name)) {
      out.decisions[organ.normal_label] = true;
    } else {
      out.uncertain[organ.name] = true;
    }
  }
  return out;
}

PredictionSet rba_label_corpus(const Corpus &corpus, const Lexicon &lexicon,
                               const RbaOptions &options) {
  PredictionSet out;
  out.labeler_name = "rba";
  for (const ReportRecord &raw : corpus.reports) {
    ReportRecord record = raw.findings_state == FindingsState::kUnsectioned
                              ? extract_findings(raw)
                              : raw;
    if (!record.findings) {
      out.errors.push_back({record.report_id, "no-findings"});
      continue;
    }
    out.predictions[record.report_id] = classify_report(record, lexicon, options);
    out.status[record.report_id] = "rule";
  }
  return out;
}

}  // namespace radlabel
