#include "sprig/connect.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "sprig/error.hpp"
#include "sprig/exporter.hpp"

namespace sprig {

namespace {

// Dijkstra label over boundary nodes 0..n. Every component is additive
// and non-negative along an edge, and id sequences of tied labels have
// equal length (equal chunk counts), so the lexicographic order is
// monotone and Dijkstra stays optimal.
struct Label {
  double cost = 0.0;
  int chunks = 0;
  int skips = 0;  // skipped tokens: outright skips + uncovered extent
  std::vector<PhraseId> ids;
  bool settled = false;

  bool better_than(const Label& o) const {
    if (cost != o.cost) return cost < o.cost;
    if (chunks != o.chunks) return chunks < o.chunks;
    if (skips != o.skips) return skips < o.skips;
    return ids < o.ids;
  }
};

std::vector<int> skipped_of(const Chart& chart,
                            const std::vector<PhraseId>& chunks) {
  std::vector<char> covered(chart.sentence_length(), 0);
  for (PhraseId id : chunks)
    for (int t : covered_tokens(chart, id)) covered[t] = 1;
  std::vector<int> skipped;
  for (int t = 0; t < chart.sentence_length(); ++t)
    if (!covered[t]) skipped.push_back(t);
  return skipped;
}

ResultNode materialize(const Chart& chart, PhraseId id,
                       const std::vector<std::string>& forms) {
  const Phrase& p = chart.phrase(id);
  ResultNode node;
  node.wt = p.wt;
  node.start = p.start;
  node.end = p.end;
  node.span = p.span;
  node.level = p.level;
  node.head_loc = p.head_loc;
  node.cat = p.cat;
  node.feat = p.feat;
  node.chart_id = id;
  if (p.leaf()) {
    if (p.start < static_cast<int>(forms.size())) node.form = forms[p.start];
  } else {
    for (PhraseId c : p.children)
      node.children.push_back(materialize(chart, c, forms));
  }
  return node;
}

}  // namespace

double chunk_edge_cost(const Phrase& p, const ConnectConfig& cfg) {
  const double raw =
      1.0 + cfg.lambda * (p.extent() - p.span) - cfg.mu * p.wt;
  return std::max(cfg.epsilon, raw);
}

std::vector<int> covered_tokens(const Chart& chart, PhraseId id) {
  std::vector<int> out;
  std::vector<PhraseId> stack{id};
  while (!stack.empty()) {
    const Phrase& p = chart.phrase(stack.back());
    stack.pop_back();
    if (p.leaf()) {
      out.push_back(p.start);
    } else {
      for (auto it = p.children.rbegin(); it != p.children.rend(); ++it)
        stack.push_back(*it);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

ChunkPath connect_chunks(const Chart& chart, const ConnectConfig& cfg) {
  const int n = chart.sentence_length();

  std::vector<std::vector<PhraseId>> by_start(n);
  for (PhraseId id : chart.alive_phrases())
    by_start[chart.phrase(id).start].push_back(id);

  std::vector<Label> best(n + 1);
  for (int v = 1; v <= n; ++v) best[v].cost = -1.0;  // unreached

  // (cost, chunks, skips, ids, node); ordered worst-first for the heap
  using Item = std::pair<Label, int>;
  auto worse = [](const Item& a, const Item& b) {
    return b.first.better_than(a.first);
  };
  std::priority_queue<Item, std::vector<Item>, decltype(worse)> queue(worse);
  queue.push({best[0], 0});

  auto relax = [&](int node, Label label) {
    if (best[node].cost < 0.0 || label.better_than(best[node])) {
      best[node] = label;
      queue.push({std::move(label), node});
    }
  };

  while (!queue.empty()) {
    auto [label, v] = queue.top();
    queue.pop();
    if (best[v].settled) continue;
    if (best[v].cost >= 0.0 && best[v].better_than(label)) continue;  // stale
    best[v].settled = true;
    if (v == n) break;

    Label skip = label;
    skip.settled = false;
    skip.cost += cfg.sigma;
    skip.skips += 1;
    relax(v + 1, std::move(skip));

    for (PhraseId id : by_start[v]) {
      const Phrase& p = chart.phrase(id);
      Label next = label;
      next.settled = false;
      next.cost += chunk_edge_cost(p, cfg);
      next.chunks += 1;
      next.skips += p.extent() - p.span;
      next.ids.push_back(id);
      relax(p.end + 1, std::move(next));
    }
  }

  if (best[n].cost < 0.0)
    throw InternalError("connector failed to reach the sentence end");

  ChunkPath path;
  path.chunks = best[n].ids;
  path.cost = best[n].cost;
  path.skipped = skipped_of(chart, path.chunks);
  return path;
}

std::vector<ParseResult> rank_results(const Chart& chart,
                                      const ChunkPath& path, int k,
                                      const std::vector<std::string>& forms,
                                      const ConnectConfig& cfg,
                                      RootPolicy root_policy) {
  std::vector<ParseResult> results;
  if (k <= 0) return results;
  const int n = chart.sentence_length();

  auto finish = [&](const std::vector<PhraseId>& ids) {
    ParseResult r;
    for (PhraseId id : ids) r.chunks.push_back(materialize(chart, id, forms));
    r.skipped = skipped_of(chart, ids);
    double wt = 0.0;
    for (PhraseId id : ids) wt += chart.phrase(id).wt;
    const int nchunks = static_cast<int>(ids.size());
    r.score = wt - cfg.alpha * std::max(0, nchunks - 1) -
              cfg.beta * static_cast<double>(r.skipped.size());
    r.forms = forms;
    r.heads = derive_heads(r.chunks, r.skipped, n, root_policy);
    r.budget_exceeded = chart.budget_exceeded;
    return r;
  };

  if (path.chunks.empty()) {
    results.push_back(finish({}));
    return results;
  }

  // Variants per cell, best-first by wt + beta*span: the rerank score of
  // a combination is sum(wt_i + beta*span_i) - beta*n - alpha*(m-1), so
  // this per-cell key makes the score separable and the product
  // enumeration exact.
  struct Variant {
    PhraseId id;
    double key;
    int span;
  };
  std::vector<std::vector<Variant>> cells;
  for (PhraseId id : path.chunks) {
    const Phrase& p = chart.phrase(id);
    std::vector<Variant> variants;
    for (PhraseId v : chart.cell(p.end, p.start, p.cat)) {
      const Phrase& q = chart.phrase(v);
      variants.push_back({v, q.wt + cfg.beta * q.span, q.span});
    }
    std::sort(variants.begin(), variants.end(),
              [](const Variant& a, const Variant& b) {
                if (a.key != b.key) return a.key > b.key;
                if (a.span != b.span) return a.span > b.span;
                return a.id < b.id;
              });
    if (variants.empty())
      throw InternalError("path chunk missing from its cell");
    cells.push_back(std::move(variants));
  }

  struct Combo {
    double key = 0.0;
    int span = 0;
    std::vector<int> pick;  // variant index per cell
  };
  auto combo_ids = [&](const Combo& c) {
    std::vector<PhraseId> ids;
    for (std::size_t i = 0; i < cells.size(); ++i)
      ids.push_back(cells[i][c.pick[i]].id);
    return ids;
  };
  auto make_combo = [&](std::vector<int> pick) {
    Combo c;
    c.pick = std::move(pick);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      c.key += cells[i][c.pick[i]].key;
      c.span += cells[i][c.pick[i]].span;
    }
    return c;
  };
  auto worse = [&](const Combo& a, const Combo& b) {
    if (a.key != b.key) return a.key < b.key;
    if (a.span != b.span) return a.span < b.span;
    return combo_ids(b) < combo_ids(a);
  };
  std::priority_queue<Combo, std::vector<Combo>, decltype(worse)> queue(worse);
  std::set<std::vector<int>> visited;

  std::vector<int> first(cells.size(), 0);
  visited.insert(first);
  queue.push(make_combo(first));

  // Pops are non-increasing in key, so flushing whole equal-key buckets
  // (ordered by span desc, then id sequence) yields the exact order.
  std::vector<Combo> bucket;
  auto flush = [&]() {
    std::sort(bucket.begin(), bucket.end(), [&](const Combo& a,
                                                const Combo& b) {
      if (a.span != b.span) return a.span > b.span;
      return combo_ids(a) < combo_ids(b);
    });
    for (const Combo& c : bucket)
      if (static_cast<int>(results.size()) < k)
        results.push_back(finish(combo_ids(c)));
    bucket.clear();
  };

  while (!queue.empty() && static_cast<int>(results.size()) < k) {
    Combo c = queue.top();
    queue.pop();
    if (!bucket.empty() && bucket.front().key != c.key) flush();
    if (static_cast<int>(results.size()) >= k) break;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (c.pick[i] + 1 >= static_cast<int>(cells[i].size())) continue;
      std::vector<int> pick = c.pick;
      ++pick[i];
      if (visited.insert(pick).second) queue.push(make_combo(pick));
    }
    bucket.push_back(std::move(c));
  }
  flush();
  return results;
}

}  // namespace sprig
