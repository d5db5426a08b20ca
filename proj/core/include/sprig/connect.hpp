#pragma once

#include <string>
#include <vector>

#include "sprig/chart.hpp"

namespace sprig {

struct ConnectConfig {
  double lambda = 0.5;    // per uncovered token inside a chunk's extent
  double mu = 0.25;       // weight reward inside an edge cost
  double epsilon = 0.01;  // edge cost floor
  double sigma = 2.0;     // cost of skipping one token outright
  double alpha = 0.5;     // rerank penalty per chunk beyond the first
  double beta = 1.0;      // rerank penalty per skipped token
};

// Which chunk root becomes the global root of the dependency tree.
enum class RootPolicy { kLeftmost, kHeaviest };

// Cheapest left-to-right cover of the sentence by non-overlapping chunks
// and skipped tokens. chunks is ordered by position; skipped holds every
// token index covered by no chunk leaf (outright skips and tokens inside
// a chunk's extent that its leaves do not cover).
struct ChunkPath {
  std::vector<PhraseId> chunks;
  std::vector<int> skipped;
  double cost = 0.0;
};

// Traversing a phrase costs max(epsilon, 1 + lambda*(extent - span)
// - mu*wt); skipping a token costs sigma. Ties resolve to fewer chunks,
// then fewer skipped tokens, then the lexicographically smallest id
// sequence, so the result is deterministic.
ChunkPath connect_chunks(const Chart& chart, const ConnectConfig& cfg = {});

// Materialized phrase tree. children are in left-to-right order; form is
// filled on leaves only.
struct ResultNode {
  double wt = 0.0;
  int start = 0;
  int end = 0;
  int span = 1;
  int level = 0;
  int head_loc = 0;
  Category cat;
  FeatureSet feat;
  std::string form;
  std::vector<ResultNode> children;
  PhraseId chart_id = kNoPhrase;
};

struct ParseResult {
  std::vector<ResultNode> chunks;  // position order
  std::vector<int> skipped;        // sorted token indices
  double score = 0.0;
  // heads[i]: 0-based token index of token i's head, -1 for the root
  std::vector<int> heads;
  std::vector<std::string> forms;
  bool budget_exceeded = false;
};

// Top-k alternatives over the path's cells: each chunk may be swapped
// for any alive phrase with the same category and extent. Scored by
// sum(chunk wt) - alpha*(chunks-1) - beta*|skipped|, descending; ties
// resolve like connect_chunks. k <= 0 yields nothing.
std::vector<ParseResult> rank_results(const Chart& chart,
                                      const ChunkPath& path, int k,
                                      const std::vector<std::string>& forms,
                                      const ConnectConfig& cfg = {},
                                      RootPolicy root_policy =
                                          RootPolicy::kLeftmost);

// Token indices covered by the phrase's leaves, ascending.
std::vector<int> covered_tokens(const Chart& chart, PhraseId id);

double chunk_edge_cost(const Phrase& p, const ConnectConfig& cfg);

}  // namespace sprig
