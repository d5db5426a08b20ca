#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sprig {

// Category names are opaque: "S/NP" is just a name, the slash has no
// built-in meaning. Non-empty, no whitespace, no '#', '[', ']' or ','.
using Category = std::string;

// Sorted, duplicate-free set of feature names.
using FeatureSet = std::vector<std::string>;

// Sorts and removes duplicates in place.
void normalize_features(FeatureSet& feats);

bool has_feature(const FeatureSet& feats, std::string_view name);

// One [+name] or [-name] test against a phrase's feature set.
struct FeatureConstraint {
  std::string name;
  bool positive = true;

  friend bool operator==(const FeatureConstraint&,
                         const FeatureConstraint&) = default;
};

// All positive constraints present and all negative constraints absent.
bool satisfies(const FeatureSet& feats,
               const std::vector<FeatureConstraint>& constraints);

struct RuleChild {
  Category category;
  std::vector<FeatureConstraint> constraints;  // sorted by name
  bool is_head = false;

  friend bool operator==(const RuleChild&, const RuleChild&) = default;
};

// PARENT[f,g] -> CHILD1[+a,-b] ^CHILD2[+c]
// One or two children, exactly one marked as head. The parent's features
// are assigned wholesale to phrases the rule builds; they are not
// percolated from children.
struct Rule {
  Category parent;
  FeatureSet parent_features;
  std::vector<RuleChild> children;
  int id = -1;  // 1-based line number in the source file

  bool unary() const { return children.size() == 1; }
  const RuleChild& last_child() const { return children.back(); }
  const RuleChild& head_child() const;
  int head_index() const;

  friend bool operator==(const Rule&, const Rule&) = default;
};

struct Grammar {
  std::vector<Rule> rules;  // ascending id
  // category of the last child -> indices into rules, ascending id
  std::unordered_map<Category, std::vector<int>> last_child_index;  // binary
  std::unordered_map<Category, std::vector<int>> unary_index;       // unary
  int duplicates_removed = 0;
};

// Parses one rule line (comments and surrounding blanks already stripped).
// Throws InputError on malformed input. The returned rule has id = -1.
Rule parse_rule_line(const std::string& line);

// Canonical text form; parse_rule_line(format_rule(r)) reproduces r
// (minus the id). The head child always carries an explicit '^'.
std::string format_rule(const Rule& rule);

// Reads a rule file: one rule per line, '#' starts a comment, blank lines
// ignored. All malformed lines are reported together in one InputError.
// Duplicate rules (same canonical form) collapse to the first occurrence
// and are counted in duplicates_removed.
Grammar load_grammar(std::istream& in);
Grammar load_grammar_file(const std::string& path);

// Rules whose last child matches the category and whose last-child
// constraints are satisfied by feats. Unary and binary rules merged,
// ascending rule id.
std::vector<const Rule*> rules_for_last_child(const Grammar& grammar,
                                              const Category& cat,
                                              const FeatureSet& feats);

}  // namespace sprig
