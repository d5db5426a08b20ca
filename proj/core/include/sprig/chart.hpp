#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "sprig/grammar.hpp"

namespace sprig {

using PhraseId = int;
constexpr PhraseId kNoPhrase = -1;

// One chart item. Leaves have no children, level 0, span 1 and
// start = end = head_loc = token position, wt = tag hypothesis weight.
// Internal phrases sum wt and span over their children exactly, take
// level = 1 + max(child levels), and inherit head_loc from the head
// child. feat is assigned wholesale by the rule that built the phrase.
struct Phrase {
  double wt = 0.0;
  int start = 0;     // leftmost covered token, inclusive
  int end = 0;       // rightmost covered token, inclusive
  int span = 1;      // number of tokens covered by leaves
  Category cat;
  FeatureSet feat;
  int head_loc = 0;  // token position of the lexical head
  std::vector<PhraseId> children;  // empty, or 1-2 earlier phrases
  int level = 0;
  PhraseId id = kNoPhrase;
  int rule_id = -1;  // rule that built this phrase, -1 for leaves

  bool leaf() const { return children.empty(); }
  int extent() const { return end - start + 1; }
};

// Append-only phrase store plus a positional index keyed
// index[end][start][category]. Beam eviction removes a phrase from the
// index but keeps its record (children ids of survivors stay valid) and
// keeps its equivalence key registered, so an identical re-derivation is
// still rejected as a duplicate.
class Chart {
 public:
  explicit Chart(int sentence_length);

  int sentence_length() const { return n_; }

  // Number of phrases ever stored, evicted included.
  std::size_t size() const { return phrases_.size(); }

  // Validates invariants (throws InternalError) and rejects equivalents:
  // same (cat, start, end, feat, head_loc, children) as an earlier
  // phrase returns kNoPhrase without inserting.
  PhraseId add(Phrase p);

  const Phrase& phrase(PhraseId id) const;
  bool alive(PhraseId id) const;
  void evict(PhraseId id);

  // Alive phrases of one cell, insertion order.
  const std::vector<PhraseId>& cell(int end, int start,
                                    const Category& cat) const;

  // Alive phrases p with matching category and constraints whose end lies
  // in [right_start - 1 - max_skip, right_start - 1]. Ordered by
  // descending p.end, then descending p.wt, then ascending id.
  std::vector<PhraseId> left_neighbors(
      int right_start, int max_skip, const Category& cat,
      const std::vector<FeatureConstraint>& constraints) const;

  std::vector<PhraseId> alive_phrases() const;

  // One line per alive phrase, id order.
  void dump(std::ostream& out) const;

  bool budget_exceeded = false;

 private:
  using Cell = std::map<Category, std::vector<PhraseId>>;

  void validate(const Phrase& p) const;
  std::string equivalence_key(const Phrase& p) const;

  int n_;
  std::vector<Phrase> phrases_;
  std::vector<char> evicted_;
  std::vector<std::vector<Cell>> index_;  // [end][start]
  std::unordered_set<std::string> seen_;
};

}  // namespace sprig
