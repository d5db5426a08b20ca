#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sprig/grammar.hpp"

namespace sprig {

struct TagHypothesis {
  Category tag;
  double weight = 0.0;
  FeatureSet features;

  friend bool operator==(const TagHypothesis&, const TagHypothesis&) = default;
};

// Hypotheses sorted by descending weight, then ascending tag name.
// Weights sum to at most 1 (+ rounding slack). May be empty when the
// model is empty and the form is unknown; such a token is never parsed.
struct TagDistribution {
  int token_index = -1;
  std::string form;
  std::vector<TagHypothesis> hypotheses;
};

struct ClosedClassEntry {
  Category tag;
  FeatureSet features;
  double weight = 1.0;
};

// Hand-written function-word table. Lookup is case sensitive first, then
// lowercased. A hit takes absolute precedence over the trained model.
struct ClosedClassTable {
  std::unordered_map<std::string, std::vector<ClosedClassEntry>> entries;

  bool contains(const std::string& form) const;
  const std::vector<ClosedClassEntry>* find(const std::string& form) const;
};

// CSV: form,tag,features,weight with ';' separating features (may be
// empty). '#' starts a comment. Repeated forms accumulate entries.
// Per-form weights must sum to at most 1.
ClosedClassTable load_closed_class(std::istream& in);
ClosedClassTable load_closed_class_file(const std::string& path);

// Frequency tagger: weight(tag | form) = count(form, tag) / count(form).
// Unknown forms fall back to the marginal distribution over the
// fallback_k most frequent open-class tags.
struct TaggerModel {
  // exact surface form -> tag -> count; sorted so serialization is stable
  std::map<std::string, std::map<Category, long long>> counts;
  bool case_fold = true;
  int fallback_k = 8;

  // derived, rebuilt by train/load
  std::map<std::string, std::map<Category, long long>> folded_counts;
  std::vector<std::pair<Category, double>> fallback;  // descending weight
  std::map<Category, FeatureSet> tag_features;        // static morphology map

  bool empty() const { return counts.empty(); }
};

// sentences: (form, xpos) pairs per sentence.
TaggerModel train_tagger(
    const std::vector<std::vector<std::pair<std::string, std::string>>>&
        sentences,
    int fallback_k = 8, bool case_fold = true);

// Versioned flat text; identical training data reproduces identical bytes.
void save_tagger(const TaggerModel& model, std::ostream& out);
void save_tagger_file(const TaggerModel& model, const std::string& path);
TaggerModel load_tagger(std::istream& in);
TaggerModel load_tagger_file(const std::string& path);

// Tags one token. Closed-class hit wins outright; otherwise the model's
// per-form distribution; otherwise the open-class fallback. Hypotheses
// below cutoff are dropped and the rest renormalized; if all fall below,
// the single best is kept with weight 1.
TagDistribution tag_token(const TaggerModel& model,
                          const ClosedClassTable& closed,
                          const std::string& form, double cutoff);

// Built-in tag -> features table (VBZ -> fin, VBG -> ing, ...).
const std::map<Category, FeatureSet>& default_tag_features();

// CSV override: tag,features with ';' separating features.
std::map<Category, FeatureSet> load_tag_features(std::istream& in);

const std::vector<Category>& open_class_tags();

}  // namespace sprig
