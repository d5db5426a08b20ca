#include "sprig/chart.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include "sprig/error.hpp"

namespace sprig {

namespace {
const std::vector<PhraseId> kEmptyCell;
}

Chart::Chart(int sentence_length) : n_(sentence_length) {
  if (n_ < 0) throw InternalError("negative sentence length");
  index_.resize(n_);
  for (auto& row : index_) row.resize(n_);
}

void Chart::validate(const Phrase& p) const {
  auto fail = [&](const std::string& what) {
    throw InternalError("phrase invariant: " + what + " (cat=" + p.cat +
                        " start=" + std::to_string(p.start) +
                        " end=" + std::to_string(p.end) + ")");
  };
  if (p.cat.empty()) fail("empty category");
  if (p.start < 0 || p.end >= n_ || p.start > p.end) fail("bad extent");
  if (p.head_loc < p.start || p.head_loc > p.end) fail("head outside extent");
  if (p.span < 1 || p.span > p.extent()) fail("bad span");
  if (!std::is_sorted(p.feat.begin(), p.feat.end()) ||
      std::adjacent_find(p.feat.begin(), p.feat.end()) != p.feat.end())
    fail("features not normalized");

  if (p.leaf()) {
    if (p.level != 0) fail("leaf with level != 0");
    if (p.span != 1 || p.start != p.end) fail("leaf not a single token");
    return;
  }

  if (p.level == 0) fail("internal phrase with level 0");
  if (p.children.size() > 2) fail("more than two children");
  double wt = 0.0;
  int span = 0;
  int level = 0;
  bool head_found = false;
  for (std::size_t i = 0; i < p.children.size(); ++i) {
    const PhraseId cid = p.children[i];
    if (cid < 0 || cid >= static_cast<PhraseId>(phrases_.size()))
      fail("child id out of range");
    const Phrase& c = phrases_[cid];
    wt += c.wt;
    span += c.span;
    level = std::max(level, c.level);
    if (c.head_loc == p.head_loc) head_found = true;
    if (i > 0 && phrases_[p.children[i - 1]].end >= c.start)
      fail("children overlap or are out of order");
  }
  if (p.start != phrases_[p.children.front()].start ||
      p.end != phrases_[p.children.back()].end)
    fail("extent does not match children");
  if (p.wt != wt) fail("wt is not the sum over children");
  if (p.span != span) fail("span is not the sum over children");
  if (p.level != level + 1) fail("level is not one above children");
  if (!head_found) fail("head_loc not inherited from a child");
}

std::string Chart::equivalence_key(const Phrase& p) const {
  std::ostringstream key;
  key << p.cat << '|' << p.start << '|' << p.end << '|' << p.head_loc << '|';
  for (const std::string& f : p.feat) key << f << ',';
  key << '|';
  for (PhraseId c : p.children) key << c << ',';
  return key.str();
}

PhraseId Chart::add(Phrase p) {
  validate(p);
  if (!seen_.insert(equivalence_key(p)).second) return kNoPhrase;
  const PhraseId id = static_cast<PhraseId>(phrases_.size());
  p.id = id;
  index_[p.end][p.start][p.cat].push_back(id);
  phrases_.push_back(std::move(p));
  evicted_.push_back(0);
  return id;
}

const Phrase& Chart::phrase(PhraseId id) const {
  if (id < 0 || id >= static_cast<PhraseId>(phrases_.size()))
    throw InternalError("phrase id out of range");
  return phrases_[id];
}

bool Chart::alive(PhraseId id) const {
  return id >= 0 && id < static_cast<PhraseId>(phrases_.size()) &&
         !evicted_[id];
}

void Chart::evict(PhraseId id) {
  const Phrase& p = phrase(id);
  if (evicted_[id]) return;
  auto& cell = index_[p.end][p.start][p.cat];
  cell.erase(std::remove(cell.begin(), cell.end(), id), cell.end());
  evicted_[id] = 1;
}

const std::vector<PhraseId>& Chart::cell(int end, int start,
                                         const Category& cat) const {
  if (end < 0 || end >= n_ || start < 0 || start >= n_) return kEmptyCell;
  const Cell& c = index_[end][start];
  const auto it = c.find(cat);
  return it == c.end() ? kEmptyCell : it->second;
}

std::vector<PhraseId> Chart::left_neighbors(
    int right_start, int max_skip, const Category& cat,
    const std::vector<FeatureConstraint>& constraints) const {
  std::vector<PhraseId> out;
  for (int gap = 0; gap <= max_skip; ++gap) {
    const int end = right_start - 1 - gap;
    if (end < 0) break;
    std::vector<PhraseId> at_end;
    for (int start = 0; start <= end; ++start) {
      for (PhraseId id : cell(end, start, cat))
        if (satisfies(phrases_[id].feat, constraints)) at_end.push_back(id);
    }
    std::sort(at_end.begin(), at_end.end(), [&](PhraseId a, PhraseId b) {
      if (phrases_[a].wt != phrases_[b].wt)
        return phrases_[a].wt > phrases_[b].wt;
      return a < b;
    });
    out.insert(out.end(), at_end.begin(), at_end.end());
  }
  return out;
}

std::vector<PhraseId> Chart::alive_phrases() const {
  std::vector<PhraseId> out;
  for (PhraseId id = 0; id < static_cast<PhraseId>(phrases_.size()); ++id)
    if (!evicted_[id]) out.push_back(id);
  return out;
}

void Chart::dump(std::ostream& out) const {
  for (PhraseId id : alive_phrases()) {
    const Phrase& p = phrases_[id];
    out << id << '\t' << p.cat;
    if (!p.feat.empty()) {
      out << '[';
      for (std::size_t i = 0; i < p.feat.size(); ++i)
        out << (i ? "," : "") << p.feat[i];
      out << ']';
    }
    out << "\t(" << p.start << ',' << p.end << ")\twt=" << p.wt
        << "\tspan=" << p.span << "\tlevel=" << p.level
        << "\thead=" << p.head_loc << "\tchildren=[";
    for (std::size_t i = 0; i < p.children.size(); ++i)
      out << (i ? "," : "") << p.children[i];
    out << "]";
    if (p.rule_id >= 0) out << "\trule=" << p.rule_id;
    out << '\n';
  }
}

}  // namespace sprig
