#include "sprig/exporter.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"
#include "sprig/error.hpp"

namespace sprig {

namespace {

using nlohmann::json;

void attach_within(const ResultNode& node, std::vector<int>& heads) {
  for (const ResultNode& child : node.children) attach_within(child, heads);
  if (node.children.size() == 2) {
    const ResultNode& a = node.children[0];
    const ResultNode& b = node.children[1];
    const ResultNode& dep = a.head_loc == node.head_loc ? b : a;
    heads[dep.head_loc] = node.head_loc;
  }
}

int pick_root(const std::vector<ResultNode>& chunks, RootPolicy policy) {
  if (policy == RootPolicy::kLeftmost) return chunks.front().head_loc;
  int best = 0;
  for (std::size_t i = 1; i < chunks.size(); ++i)
    if (chunks[i].wt > chunks[best].wt) best = static_cast<int>(i);
  return chunks[best].head_loc;
}

std::string bracket_label(const ResultNode& node) {
  std::string label = node.cat;
  if (!node.children.empty() && !node.feat.empty()) {
    label += '[';
    for (std::size_t i = 0; i < node.feat.size(); ++i) {
      if (i) label += ',';
      label += node.feat[i];
    }
    label += ']';
  }
  return label;
}

void bracket(const ResultNode& node, std::string& out) {
  out += '(';
  out += bracket_label(node);
  if (node.children.empty()) {
    out += ' ';
    out += node.form;
  } else {
    for (const ResultNode& child : node.children) {
      out += ' ';
      bracket(child, out);
    }
  }
  out += ')';
}

void collect_leaf_tags(const ResultNode& node, std::vector<std::string>& tags) {
  if (node.children.empty()) {
    if (node.start >= 0 && node.start < static_cast<int>(tags.size()))
      tags[node.start] = node.cat;
    return;
  }
  for (const ResultNode& child : node.children) collect_leaf_tags(child, tags);
}

int emit_phrase(const ResultNode& node, json& phrases) {
  std::vector<int> child_ids;
  for (const ResultNode& child : node.children)
    child_ids.push_back(emit_phrase(child, phrases));
  const int id = static_cast<int>(phrases.size());
  phrases.push_back({{"id", id},
                     {"cat", node.cat},
                     {"feat", node.feat},
                     {"start", node.start},
                     {"end", node.end},
                     {"span", node.span},
                     {"level", node.level},
                     {"head_loc", node.head_loc},
                     {"wt", node.wt},
                     {"children", child_ids}});
  return id;
}

}  // namespace

std::vector<int> derive_heads(const std::vector<ResultNode>& chunks,
                              const std::vector<int>& skipped, int n,
                              RootPolicy policy) {
  std::vector<int> heads(n, -1);
  if (chunks.empty()) return heads;
  for (const ResultNode& chunk : chunks) attach_within(chunk, heads);
  const int root = pick_root(chunks, policy);
  for (const ResultNode& chunk : chunks)
    if (chunk.head_loc != root) heads[chunk.head_loc] = root;
  for (int t : skipped) heads[t] = root;
  heads[root] = -1;
  return heads;
}

std::vector<int> to_dependency(const ParseResult& result, RootPolicy policy) {
  return derive_heads(result.chunks, result.skipped,
                      static_cast<int>(result.forms.size()), policy);
}

std::string to_constituency(const ParseResult& result) {
  // (start, rendered line) in sentence order
  std::vector<std::pair<int, std::string>> items;
  for (const ResultNode& chunk : result.chunks) {
    std::string line;
    bracket(chunk, line);
    items.emplace_back(chunk.start, std::move(line));
  }
  for (int t : result.skipped) {
    std::string form =
        t < static_cast<int>(result.forms.size()) ? result.forms[t] : "";
    items.emplace_back(t, "(SKIP " + form + ")");
  }
  std::sort(items.begin(), items.end());
  std::string out;
  for (const auto& [start, line] : items) {
    out += line;
    out += '\n';
  }
  return out;
}

std::string to_combined(const ParseResult& result,
                        const std::vector<std::string>& tokens) {
  const int n = static_cast<int>(tokens.size());
  std::vector<std::string> tags(n, "_");
  for (const ResultNode& chunk : result.chunks)
    collect_leaf_tags(chunk, tags);

  json jtokens = json::array();
  for (int i = 0; i < n; ++i) {
    const int head = i < static_cast<int>(result.heads.size())
                         ? result.heads[i]
                         : -1;
    jtokens.push_back(
        {{"id", i}, {"form", tokens[i]}, {"tag", tags[i]}, {"head", head}});
  }

  json jphrases = json::array();
  for (const ResultNode& chunk : result.chunks)
    emit_phrase(chunk, jphrases);

  const json record = {{"tokens", jtokens}, {"phrases", jphrases}};
  return record.dump();
}

std::string to_conllu(const ParseResult& result, const std::string& sent_id) {
  const int n = static_cast<int>(result.forms.size());
  std::vector<std::string> tags(n, "_");
  for (const ResultNode& chunk : result.chunks)
    collect_leaf_tags(chunk, tags);

  std::ostringstream out;
  if (!sent_id.empty()) out << "# sent_id = " << sent_id << '\n';
  out << "# text =";
  for (const std::string& form : result.forms) out << ' ' << form;
  out << '\n';
  for (int i = 0; i < n; ++i) {
    const int head = i < static_cast<int>(result.heads.size())
                         ? result.heads[i]
                         : -1;
    out << i + 1 << '\t' << result.forms[i] << "\t_\t_\t" << tags[i]
        << "\t_\t" << head + 1 << "\tdep\t_\t_\n";
  }
  out << '\n';
  return out.str();
}

CombinedRecord parse_combined(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InputError(std::string("bad combined record: ") + e.what());
  }
  CombinedRecord record;
  try {
    for (const json& t : j.at("tokens")) {
      CombinedToken token;
      token.id = t.at("id").get<int>();
      token.form = t.at("form").get<std::string>();
      token.tag = t.at("tag").get<std::string>();
      token.head = t.at("head").get<int>();
      record.tokens.push_back(std::move(token));
    }
    for (const json& p : j.at("phrases")) {
      CombinedPhrase phrase;
      phrase.id = p.at("id").get<int>();
      phrase.cat = p.at("cat").get<std::string>();
      phrase.feat = p.at("feat").get<FeatureSet>();
      phrase.start = p.at("start").get<int>();
      phrase.end = p.at("end").get<int>();
      phrase.span = p.at("span").get<int>();
      phrase.level = p.at("level").get<int>();
      phrase.head_loc = p.at("head_loc").get<int>();
      phrase.wt = p.at("wt").get<double>();
      phrase.children = p.at("children").get<std::vector<int>>();
      record.phrases.push_back(std::move(phrase));
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("bad combined record: ") + e.what());
  }
  return record;
}

}  // namespace sprig
