#include "sprig/grammar.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "sprig/error.hpp"

namespace sprig {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

void check_category(const std::string& name) {
  if (name.empty()) throw InputError("empty category");
  for (char c : name) {
    if (c == '[' || c == ']' || c == ',' || c == '#' || c == '^' ||
        std::isspace(static_cast<unsigned char>(c))) {
      throw InputError("bad character in category '" + name + "'");
    }
  }
}

void check_feature_name(const std::string& name) {
  if (name.empty()) throw InputError("empty feature name");
  for (char c : name) {
    if (c == '+' || c == '-' || c == '[' || c == ']' || c == ',' ||
        c == '#' || c == '^' || std::isspace(static_cast<unsigned char>(c))) {
      throw InputError("bad character in feature '" + name + "'");
    }
  }
}

// NAME or NAME[a,b]; returns the name, leaves the bracket body in `body`
// (empty string when there is no bracket).
std::string split_bracket(const std::string& spec, std::string* body) {
  body->clear();
  const auto open = spec.find('[');
  if (open == std::string::npos) {
    if (spec.find(']') != std::string::npos)
      throw InputError("unmatched ']' in '" + spec + "'");
    return spec;
  }
  if (spec.back() != ']')
    throw InputError("missing closing ']' in '" + spec + "'");
  *body = spec.substr(open + 1, spec.size() - open - 2);
  if (body->find('[') != std::string::npos ||
      body->find(']') != std::string::npos)
    throw InputError("nested brackets in '" + spec + "'");
  return spec.substr(0, open);
}

FeatureSet parse_parent_features(const std::string& body,
                                 const std::string& spec) {
  FeatureSet feats;
  if (body.empty()) return feats;
  for (const std::string& raw : split_commas(body)) {
    const std::string f = trim(raw);
    if (!f.empty() && (f[0] == '+' || f[0] == '-'))
      throw InputError("parent features take no +/- sign in '" + spec + "'");
    check_feature_name(f);
    feats.push_back(f);
  }
  const std::size_t before = feats.size();
  normalize_features(feats);
  if (feats.size() != before)
    throw InputError("duplicate feature in '" + spec + "'");
  return feats;
}

std::vector<FeatureConstraint> parse_constraints(const std::string& body,
                                                 const std::string& spec) {
  std::vector<FeatureConstraint> cs;
  if (body.empty()) return cs;
  for (const std::string& raw : split_commas(body)) {
    const std::string f = trim(raw);
    if (f.empty() || (f[0] != '+' && f[0] != '-'))
      throw InputError("child constraint needs a +/- sign in '" + spec + "'");
    FeatureConstraint c;
    c.positive = f[0] == '+';
    c.name = f.substr(1);
    check_feature_name(c.name);
    cs.push_back(c);
  }
  std::sort(cs.begin(), cs.end(), [](const auto& a, const auto& b) {
    return a.name < b.name;
  });
  for (std::size_t i = 1; i < cs.size(); ++i)
    if (cs[i].name == cs[i - 1].name)
      throw InputError("conflicting constraints on '" + cs[i].name +
                       "' in '" + spec + "'");
  return cs;
}

RuleChild parse_child(const std::string& spec) {
  RuleChild child;
  std::string rest = spec;
  if (!rest.empty() && rest[0] == '^') {
    child.is_head = true;
    rest = rest.substr(1);
  }
  std::string body;
  child.category = split_bracket(rest, &body);
  check_category(child.category);
  child.constraints = parse_constraints(body, spec);
  return child;
}

}  // namespace

void normalize_features(FeatureSet& feats) {
  std::sort(feats.begin(), feats.end());
  feats.erase(std::unique(feats.begin(), feats.end()), feats.end());
}

bool has_feature(const FeatureSet& feats, std::string_view name) {
  return std::binary_search(feats.begin(), feats.end(), name);
}

bool satisfies(const FeatureSet& feats,
               const std::vector<FeatureConstraint>& constraints) {
  for (const FeatureConstraint& c : constraints)
    if (has_feature(feats, c.name) != c.positive) return false;
  return true;
}

const RuleChild& Rule::head_child() const { return children[head_index()]; }

int Rule::head_index() const {
  for (std::size_t i = 0; i < children.size(); ++i)
    if (children[i].is_head) return static_cast<int>(i);
  throw InternalError("rule has no head child");
}

Rule parse_rule_line(const std::string& line) {
  const std::vector<std::string> toks = split_ws(line);
  if (toks.empty()) throw InputError("empty rule");
  const auto arrow = std::find(toks.begin(), toks.end(), "->");
  if (arrow == toks.end()) throw InputError("missing '->'");
  if (arrow == toks.begin()) throw InputError("missing parent category");
  if (arrow != toks.begin() + 1) throw InputError("one parent category only");
  if (std::find(arrow + 1, toks.end(), "->") != toks.end())
    throw InputError("more than one '->'");

  Rule rule;
  std::string body;
  rule.parent = split_bracket(toks[0], &body);
  check_category(rule.parent);
  rule.parent_features = parse_parent_features(body, toks[0]);

  const std::size_t nchildren = toks.size() - 2;
  if (nchildren == 0) throw InputError("rule has no children");
  if (nchildren > 2) throw InputError("more than two children");
  for (std::size_t i = 2; i < toks.size(); ++i)
    rule.children.push_back(parse_child(toks[i]));

  int heads = 0;
  for (const RuleChild& c : rule.children) heads += c.is_head;
  if (heads > 1) throw InputError("two head markers");
  if (heads == 0) {
    if (rule.children.size() == 2)
      throw InputError("binary rule must mark a head child with '^'");
    rule.children[0].is_head = true;  // unary head is implicit
  }
  return rule;
}

std::string format_rule(const Rule& rule) {
  std::string out = rule.parent;
  if (!rule.parent_features.empty()) {
    out += '[';
    for (std::size_t i = 0; i < rule.parent_features.size(); ++i) {
      if (i) out += ',';
      out += rule.parent_features[i];
    }
    out += ']';
  }
  out += " ->";
  for (const RuleChild& c : rule.children) {
    out += ' ';
    if (c.is_head) out += '^';
    out += c.category;
    if (!c.constraints.empty()) {
      out += '[';
      for (std::size_t i = 0; i < c.constraints.size(); ++i) {
        if (i) out += ',';
        out += c.constraints[i].positive ? '+' : '-';
        out += c.constraints[i].name;
      }
      out += ']';
    }
  }
  return out;
}

Grammar load_grammar(std::istream& in) {
  Grammar grammar;
  std::map<std::string, int> seen;  // canonical form -> rule id
  std::string errors;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      Rule rule = parse_rule_line(line);
      rule.id = lineno;
      const std::string canon = format_rule(rule);
      if (seen.count(canon)) {
        ++grammar.duplicates_removed;
        continue;
      }
      seen[canon] = lineno;
      grammar.rules.push_back(std::move(rule));
    } catch (const InputError& e) {
      if (!errors.empty()) errors += '\n';
      errors += "line " + std::to_string(lineno) + ": " + e.what();
    }
  }
  if (!errors.empty()) throw InputError(errors);

  for (std::size_t i = 0; i < grammar.rules.size(); ++i) {
    const Rule& rule = grammar.rules[i];
    auto& index = rule.unary() ? grammar.unary_index : grammar.last_child_index;
    index[rule.last_child().category].push_back(static_cast<int>(i));
  }
  return grammar;
}

Grammar load_grammar_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open grammar file: " + path);
  try {
    return load_grammar(in);
  } catch (const InputError& e) {
    throw InputError(path + ":\n" + e.what());
  }
}

std::vector<const Rule*> rules_for_last_child(const Grammar& grammar,
                                              const Category& cat,
                                              const FeatureSet& feats) {
  std::vector<const Rule*> out;
  auto collect = [&](const std::unordered_map<Category, std::vector<int>>& ix) {
    const auto it = ix.find(cat);
    if (it == ix.end()) return;
    for (int i : it->second) {
      const Rule& rule = grammar.rules[i];
      if (satisfies(feats, rule.last_child().constraints))
        out.push_back(&rule);
    }
  };
  collect(grammar.unary_index);
  collect(grammar.last_child_index);
  std::sort(out.begin(), out.end(),
            [](const Rule* a, const Rule* b) { return a->id < b->id; });
  return out;
}

}  // namespace sprig
