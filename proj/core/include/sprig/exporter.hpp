#pragma once

#include <string>
#include <vector>

#include "sprig/connect.hpp"

namespace sprig {

// Head attachment: inside each phrase the non-head child's head word
// depends on the head child's head word, recursively; each chunk's top
// head word is a chunk root; one chunk root becomes the global ROOT
// (heads value -1) and the other chunk roots and all skipped tokens
// attach to it. With no chunks at all, every token maps to -1.
std::vector<int> derive_heads(const std::vector<ResultNode>& chunks,
                              const std::vector<int>& skipped, int n,
                              RootPolicy policy = RootPolicy::kLeftmost);

// Recomputes the heads array from the result's trees.
std::vector<int> to_dependency(const ParseResult& result,
                               RootPolicy policy = RootPolicy::kLeftmost);

// One bracketed tree per chunk, skipped tokens as "(SKIP form)" lines,
// all in sentence order. Internal labels carry the feature list
// ("VP-O[fin]"); leaves render as "(TAG form)".
std::string to_constituency(const ParseResult& result);

// Combined dependency + constituency record: one JSON object with
// exactly the top-level keys "tokens" and "phrases". Token heads are
// 0-based with -1 for ROOT; skipped tokens carry tag "_". Phrase ids are
// renumbered 0..m-1 with children preceding parents.
std::string to_combined(const ParseResult& result,
                        const std::vector<std::string>& tokens);

// 10-column CoNLL-U block (with trailing blank line); HEAD is 1-based
// with 0 = root, DEPREL is always "dep".
std::string to_conllu(const ParseResult& result,
                      const std::string& sent_id = "");

struct CombinedToken {
  int id = 0;
  std::string form;
  std::string tag;
  int head = -1;
};

struct CombinedPhrase {
  int id = 0;
  Category cat;
  FeatureSet feat;
  int start = 0;
  int end = 0;
  int span = 1;
  int level = 0;
  int head_loc = 0;
  double wt = 0.0;
  std::vector<int> children;
};

struct CombinedRecord {
  std::vector<CombinedToken> tokens;
  std::vector<CombinedPhrase> phrases;
};

// Inverse of to_combined; unknown keys are ignored.
CombinedRecord parse_combined(const std::string& json_text);

}  // namespace sprig
