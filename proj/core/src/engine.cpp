#include "sprig/engine.hpp"

#include <algorithm>
#include <ostream>

#include "sprig/error.hpp"

namespace sprig {

namespace {

Phrase make_leaf(int token_index, const TagHypothesis& hyp) {
  Phrase p;
  p.wt = hyp.weight;
  p.start = p.end = p.head_loc = token_index;
  p.span = 1;
  p.cat = hyp.tag;
  p.feat = hyp.features;
  p.level = 0;
  return p;
}

Phrase build_parent(const Chart& chart, const Rule& rule,
                    const std::vector<PhraseId>& kids) {
  Phrase p;
  p.children = kids;
  p.start = chart.phrase(kids.front()).start;
  p.end = chart.phrase(kids.back()).end;
  p.wt = 0.0;
  p.span = 0;
  int level = 0;
  for (PhraseId id : kids) {
    const Phrase& c = chart.phrase(id);
    p.wt += c.wt;
    p.span += c.span;
    level = std::max(level, c.level);
  }
  p.level = level + 1;
  p.cat = rule.parent;
  p.feat = rule.parent_features;
  p.head_loc = chart.phrase(kids[rule.head_index()]).head_loc;
  p.rule_id = rule.id;
  return p;
}

// True when cat already appears on the tower of unary projections that
// tops out at pid. Blocks unary cycles (X -> Y, Y -> X) while still
// allowing the same category to reappear past a binary combination.
bool unary_chain_contains(const Chart& chart, PhraseId pid,
                          const Category& cat) {
  const Phrase* p = &chart.phrase(pid);
  for (;;) {
    if (p->cat == cat) return true;
    if (p->children.size() != 1) return false;
    p = &chart.phrase(p->children[0]);
  }
}

void enforce_beam(Chart& chart, PhraseId added, const ParseConfig& cfg) {
  if (cfg.beam_per_cell <= 0) return;
  const Phrase& p = chart.phrase(added);
  const std::vector<PhraseId> cell = chart.cell(p.end, p.start, p.cat);
  if (static_cast<int>(cell.size()) <= cfg.beam_per_cell) return;
  PhraseId victim = cell.front();
  for (PhraseId id : cell) {
    const Phrase& a = chart.phrase(id);
    const Phrase& v = chart.phrase(victim);
    const bool worse = a.wt < v.wt ||
                       (a.wt == v.wt &&
                        (a.level > v.level ||
                         (a.level == v.level && a.id < v.id)));
    if (worse) victim = id;
  }
  chart.evict(victim);
}

void trace_phrase(std::ostream* trace, const Chart& chart, PhraseId id) {
  if (!trace) return;
  const Phrase& p = chart.phrase(id);
  *trace << "project rule=" << p.rule_id << " id=" << id << " " << p.cat
         << "(" << p.start << "," << p.end << ") wt=" << p.wt
         << " head=" << p.head_loc << " children=[";
  for (std::size_t i = 0; i < p.children.size(); ++i)
    *trace << (i ? "," : "") << p.children[i];
  *trace << "]\n";
}

void project_into(Chart& chart, PhraseId pid, const Grammar& grammar,
                  const ParseConfig& cfg, std::ostream* trace,
                  std::vector<PhraseId>& created);

void try_build(Chart& chart, const Rule& rule, std::vector<PhraseId> kids,
               const Grammar& grammar, const ParseConfig& cfg,
               std::ostream* trace, std::vector<PhraseId>& created) {
  if (static_cast<int>(chart.size()) >= cfg.max_phrases) {
    chart.budget_exceeded = true;
    return;
  }
  const PhraseId id = chart.add(build_parent(chart, rule, kids));
  if (id == kNoPhrase) return;
  created.push_back(id);
  trace_phrase(trace, chart, id);
  enforce_beam(chart, id, cfg);
  if (chart.alive(id)) project_into(chart, id, grammar, cfg, trace, created);
}

void project_into(Chart& chart, PhraseId pid, const Grammar& grammar,
                  const ParseConfig& cfg, std::ostream* trace,
                  std::vector<PhraseId>& created) {
  if (chart.budget_exceeded || !chart.alive(pid)) return;
  // copy: recursive builds grow the store and may invalidate references
  const Category cat = chart.phrase(pid).cat;
  const FeatureSet feat = chart.phrase(pid).feat;
  const int start = chart.phrase(pid).start;

  for (const Rule* rule : rules_for_last_child(grammar, cat, feat)) {
    if (chart.budget_exceeded || !chart.alive(pid)) return;
    if (rule->unary()) {
      if (unary_chain_contains(chart, pid, rule->parent)) continue;
      try_build(chart, *rule, {pid}, grammar, cfg, trace, created);
    } else {
      const RuleChild& first = rule->children.front();
      for (PhraseId left : chart.left_neighbors(
               start, cfg.max_skip, first.category, first.constraints)) {
        if (chart.budget_exceeded || !chart.alive(pid)) return;
        if (!chart.alive(left)) continue;  // evicted by a recursive build
        try_build(chart, *rule, {left, pid}, grammar, cfg, trace, created);
      }
    }
  }
}

}  // namespace

std::vector<Phrase> create_leaf_phrases(
    const std::vector<TagDistribution>& distributions) {
  std::vector<Phrase> leaves;
  for (const TagDistribution& dist : distributions) {
    if (dist.token_index < 0)
      throw InternalError("distribution without token_index");
    for (const TagHypothesis& hyp : dist.hypotheses)
      leaves.push_back(make_leaf(dist.token_index, hyp));
  }
  return leaves;
}

std::vector<PhraseId> project(Chart& chart, PhraseId pid,
                              const Grammar& grammar, const ParseConfig& cfg,
                              std::ostream* trace) {
  std::vector<PhraseId> created;
  project_into(chart, pid, grammar, cfg, trace, created);
  return created;
}

Chart parse_tagged(const std::vector<TagDistribution>& distributions,
                   const Grammar& grammar, const ParseConfig& cfg,
                   std::ostream* trace) {
  Chart chart(static_cast<int>(distributions.size()));
  for (std::size_t i = 0; i < distributions.size(); ++i) {
    for (const TagHypothesis& hyp : distributions[i].hypotheses) {
      if (static_cast<int>(chart.size()) >= cfg.max_phrases) {
        chart.budget_exceeded = true;
        return chart;
      }
      const PhraseId id = chart.add(make_leaf(static_cast<int>(i), hyp));
      if (id == kNoPhrase) continue;
      trace_phrase(trace, chart, id);
      project(chart, id, grammar, cfg, trace);
    }
  }
  return chart;
}

Chart parse_sentence(const std::vector<std::string>& tokens,
                     const TaggerModel& model, const ClosedClassTable& closed,
                     const Grammar& grammar, const ParseConfig& cfg,
                     std::ostream* trace) {
  std::vector<TagDistribution> dists;
  dists.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    TagDistribution d = tag_token(model, closed, tokens[i], cfg.tag_cutoff);
    d.token_index = static_cast<int>(i);
    dists.push_back(std::move(d));
  }
  return parse_tagged(dists, grammar, cfg, trace);
}

}  // namespace sprig
