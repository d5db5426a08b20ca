#include "sprig/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "sprig/error.hpp"

namespace sprig {

namespace {

constexpr double kWeightSlack = 1e-9;

std::string lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// CSV fields; a field may be wrapped in double quotes so forms like ","
// or "#" stay representable ("" inside quotes is a literal quote).
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

FeatureSet parse_feature_list(const std::string& text) {
  FeatureSet feats;
  for (const std::string& raw : split(text, ';')) {
    const std::string f = trim(raw);
    if (!f.empty()) feats.push_back(f);
  }
  normalize_features(feats);
  return feats;
}

void sort_hypotheses(std::vector<TagHypothesis>& hyps) {
  std::sort(hyps.begin(), hyps.end(),
            [](const TagHypothesis& a, const TagHypothesis& b) {
              if (a.weight != b.weight) return a.weight > b.weight;
              if (a.tag != b.tag) return a.tag < b.tag;
              return a.features < b.features;
            });
}

// Drop < cutoff and renormalize; keep the best at weight 1 when nothing
// survives. Input must already be sorted.
void apply_cutoff(std::vector<TagHypothesis>& hyps, double cutoff) {
  if (hyps.empty()) return;
  std::vector<TagHypothesis> kept;
  double sum = 0.0;
  for (const TagHypothesis& h : hyps) {
    if (h.weight >= cutoff) {
      kept.push_back(h);
      sum += h.weight;
    }
  }
  if (kept.empty()) {
    kept.push_back(hyps.front());
    kept.front().weight = 1.0;
  } else if (sum > 0.0) {
    for (TagHypothesis& h : kept) h.weight /= sum;
  }
  hyps = std::move(kept);
}

void rebuild_derived(TaggerModel& model) {
  model.folded_counts.clear();
  std::map<Category, long long> marginal;
  for (const auto& [form, tags] : model.counts) {
    for (const auto& [tag, count] : tags) {
      if (model.case_fold) model.folded_counts[lower(form)][tag] += count;
      marginal[tag] += count;
    }
  }

  std::vector<std::pair<Category, long long>> open;
  for (const Category& tag : open_class_tags()) {
    const auto it = marginal.find(tag);
    if (it != marginal.end() && it->second > 0)
      open.emplace_back(tag, it->second);
  }
  std::sort(open.begin(), open.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (static_cast<int>(open.size()) > model.fallback_k)
    open.resize(model.fallback_k);
  long long total = 0;
  for (const auto& [tag, count] : open) total += count;
  model.fallback.clear();
  for (const auto& [tag, count] : open)
    model.fallback.emplace_back(tag,
                                static_cast<double>(count) / total);
  if (model.tag_features.empty()) model.tag_features = default_tag_features();
}

const std::map<Category, long long>* lookup_counts(const TaggerModel& model,
                                                   const std::string& form) {
  const auto exact = model.counts.find(form);
  if (exact != model.counts.end()) return &exact->second;
  if (model.case_fold) {
    const auto folded = model.folded_counts.find(lower(form));
    if (folded != model.folded_counts.end()) return &folded->second;
  }
  return nullptr;
}

}  // namespace

const std::vector<Category>& open_class_tags() {
  static const std::vector<Category> tags = {
      "NN", "NNS", "NNP", "NNPS", "VB",  "VBD", "VBG", "VBN", "VBP", "VBZ",
      "JJ", "JJR", "JJS",  "RB",  "RBR", "RBS", "CD",  "FW",  "UH"};
  return tags;
}

const std::map<Category, FeatureSet>& default_tag_features() {
  static const std::map<Category, FeatureSet> table = {
      {"VB", {"inf"}},  {"VBP", {"fin"}},  {"VBZ", {"fin"}},
      {"VBD", {"fin"}}, {"VBG", {"ing"}},  {"VBN", {"part"}},
  };
  return table;
}

std::map<Category, FeatureSet> load_tag_features(std::istream& in) {
  std::map<Category, FeatureSet> table;
  std::string line;
  int lineno = 0;
  std::string errors;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto cols = split(line, ',');
    if (cols.size() != 2) {
      if (!errors.empty()) errors += '\n';
      errors += "line " + std::to_string(lineno) + ": expected tag,features";
      continue;
    }
    table[trim(cols[0])] = parse_feature_list(cols[1]);
  }
  if (!errors.empty()) throw InputError(errors);
  return table;
}

bool ClosedClassTable::contains(const std::string& form) const {
  return find(form) != nullptr;
}

const std::vector<ClosedClassEntry>* ClosedClassTable::find(
    const std::string& form) const {
  auto it = entries.find(form);
  if (it != entries.end()) return &it->second;
  it = entries.find(lower(form));
  if (it != entries.end()) return &it->second;
  return nullptr;
}

ClosedClassTable load_closed_class(std::istream& in) {
  ClosedClassTable table;
  std::string line;
  int lineno = 0;
  std::string errors;
  auto fail = [&](const std::string& what) {
    if (!errors.empty()) errors += '\n';
    errors += "line " + std::to_string(lineno) + ": " + what;
  };
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto cols = split_csv(stripped);
    if (cols.size() != 4) {
      fail("expected form,tag,features,weight");
      continue;
    }
    const std::string form = cols[0].size() > 1 ? trim(cols[0]) : cols[0];
    ClosedClassEntry entry;
    entry.tag = trim(cols[1]);
    entry.features = parse_feature_list(cols[2]);
    if (form.empty() || entry.tag.empty()) {
      fail("empty form or tag");
      continue;
    }
    try {
      entry.weight = std::stod(trim(cols[3]));
    } catch (const std::exception&) {
      fail("bad weight '" + trim(cols[3]) + "'");
      continue;
    }
    if (entry.weight <= 0.0 || entry.weight > 1.0 + kWeightSlack) {
      fail("weight out of (0,1]: " + trim(cols[3]));
      continue;
    }
    table.entries[form].push_back(std::move(entry));
  }
  if (!errors.empty()) throw InputError(errors);

  for (const auto& [form, list] : table.entries) {
    double sum = 0.0;
    for (const ClosedClassEntry& e : list) sum += e.weight;
    if (sum > 1.0 + kWeightSlack)
      throw InputError("weights for '" + form + "' sum to more than 1");
  }
  return table;
}

ClosedClassTable load_closed_class_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open closed-class file: " + path);
  try {
    return load_closed_class(in);
  } catch (const InputError& e) {
    throw InputError(path + ":\n" + e.what());
  }
}

TaggerModel train_tagger(
    const std::vector<std::vector<std::pair<std::string, std::string>>>&
        sentences,
    int fallback_k, bool case_fold) {
  if (fallback_k <= 0) throw InputError("fallback_k must be positive");
  TaggerModel model;
  model.fallback_k = fallback_k;
  model.case_fold = case_fold;
  for (const auto& sentence : sentences)
    for (const auto& [form, xpos] : sentence) {
      if (form.empty() || xpos.empty() || xpos == "_") continue;
      ++model.counts[form][xpos];
    }
  rebuild_derived(model);
  return model;
}

void save_tagger(const TaggerModel& model, std::ostream& out) {
  out << "sprig-tagger\tv1\n";
  out << "case_fold\t" << (model.case_fold ? 1 : 0) << '\n';
  out << "fallback_k\t" << model.fallback_k << '\n';
  for (const auto& [form, tags] : model.counts)
    for (const auto& [tag, count] : tags)
      out << form << '\t' << tag << '\t' << count << '\n';
}

void save_tagger_file(const TaggerModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write model file: " + path);
  save_tagger(model, out);
  if (!out) throw InputError("failed writing model file: " + path);
}

TaggerModel load_tagger(std::istream& in) {
  TaggerModel model;
  std::string line;
  if (!std::getline(in, line) || split(line, '\t') !=
      std::vector<std::string>{"sprig-tagger", "v1"})
    throw InputError("not a sprig-tagger v1 model");
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cols = split(line, '\t');
    if (cols.size() == 2 && cols[0] == "case_fold") {
      model.case_fold = cols[1] != "0";
      continue;
    }
    if (cols.size() == 2 && cols[0] == "fallback_k") {
      model.fallback_k = std::stoi(cols[1]);
      continue;
    }
    if (cols.size() != 3)
      throw InputError("model line " + std::to_string(lineno) +
                       ": expected form<TAB>tag<TAB>count");
    long long count = 0;
    try {
      count = std::stoll(cols[2]);
    } catch (const std::exception&) {
      throw InputError("model line " + std::to_string(lineno) +
                       ": bad count '" + cols[2] + "'");
    }
    if (count <= 0)
      throw InputError("model line " + std::to_string(lineno) +
                       ": count must be positive");
    model.counts[cols[0]][cols[1]] += count;
  }
  rebuild_derived(model);
  return model;
}

TaggerModel load_tagger_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open model file: " + path);
  try {
    return load_tagger(in);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

TagDistribution tag_token(const TaggerModel& model,
                          const ClosedClassTable& closed,
                          const std::string& form, double cutoff) {
  TagDistribution dist;
  dist.form = form;

  if (const auto* entries = closed.find(form)) {
    for (const ClosedClassEntry& e : *entries)
      dist.hypotheses.push_back({e.tag, e.weight, e.features});
  } else if (const auto* counts = lookup_counts(model, form)) {
    long long total = 0;
    for (const auto& [tag, count] : *counts) total += count;
    for (const auto& [tag, count] : *counts) {
      TagHypothesis h;
      h.tag = tag;
      h.weight = static_cast<double>(count) / total;
      dist.hypotheses.push_back(std::move(h));
    }
  } else {
    for (const auto& [tag, weight] : model.fallback)
      dist.hypotheses.push_back({tag, weight, {}});
  }

  // closed-class entries carry explicit features; the rest use the table
  if (!closed.find(form)) {
    for (TagHypothesis& h : dist.hypotheses) {
      const auto it = model.tag_features.find(h.tag);
      if (it != model.tag_features.end()) h.features = it->second;
    }
  }

  sort_hypotheses(dist.hypotheses);
  apply_cutoff(dist.hypotheses, cutoff);

  double sum = 0.0;
  for (const TagHypothesis& h : dist.hypotheses) sum += h.weight;
  if (sum > 1.0 + 1e-6)
    throw InternalError("tag weights for '" + form + "' sum over 1");
  return dist;
}

}  // namespace sprig
