#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sprig/chart.hpp"
#include "sprig/grammar.hpp"
#include "sprig/lexicon.hpp"

namespace sprig {

struct ParseConfig {
  int max_skip = 2;          // tokens a binary rule may skip between children
  int beam_per_cell = 8;     // per (end,start,cat) cell; <= 0 disables the beam
  int max_phrases = 50000;   // chart growth budget per sentence
  double tag_cutoff = 0.05;  // tag hypothesis cutoff
};

// One leaf per tag hypothesis, token order then hypothesis order.
// Distributions must carry their token_index. Leaves are not inserted.
std::vector<Phrase> create_leaf_phrases(
    const std::vector<TagDistribution>& distributions);

// Recursively projects a phrase to quiescence: applies every rule whose
// last child matches, pairing with left neighbors for binary rules, and
// projects each phrase it creates before returning. Returns all phrases
// created, creation order. Projection stops early when the phrase is
// beam-evicted or the chart budget is exhausted.
std::vector<PhraseId> project(Chart& chart, PhraseId pid,
                              const Grammar& grammar, const ParseConfig& cfg,
                              std::ostream* trace = nullptr);

// Left-to-right parse over pre-tagged tokens: inserts each token's
// leaves and projects each to quiescence before advancing.
Chart parse_tagged(const std::vector<TagDistribution>& distributions,
                   const Grammar& grammar, const ParseConfig& cfg,
                   std::ostream* trace = nullptr);

// tag_token + parse_tagged.
Chart parse_sentence(const std::vector<std::string>& tokens,
                     const TaggerModel& model, const ClosedClassTable& closed,
                     const Grammar& grammar, const ParseConfig& cfg,
                     std::ostream* trace = nullptr);

}  // namespace sprig
