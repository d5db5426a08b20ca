#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "sprig/connect.hpp"
#include "sprig/engine.hpp"
#include "sprig/error.hpp"
#include "sprig/exporter.hpp"
#include "sprig/treebank.hpp"

using namespace sprig;

namespace {

ResultNode rn_leaf(const Category& cat, int pos, std::string form,
                   double wt = 1.0, FeatureSet feat = {}) {
  ResultNode n;
  n.cat = cat;
  n.start = pos;
  n.end = pos;
  n.head_loc = pos;
  n.form = std::move(form);
  n.wt = wt;
  n.feat = std::move(feat);
  return n;
}

ResultNode rn_parent(const Category& cat, std::vector<ResultNode> kids,
                     int head_index, FeatureSet feat = {}) {
  ResultNode n;
  n.cat = cat;
  n.feat = std::move(feat);
  n.children = std::move(kids);
  n.start = n.children.front().start;
  n.end = n.children.back().end;
  n.wt = 0.0;
  n.span = 0;
  n.level = 0;
  for (const ResultNode& c : n.children) {
    n.wt += c.wt;
    n.span += c.span;
    n.level = std::max(n.level, c.level + 1);
  }
  n.head_loc = n.children[head_index].head_loc;
  return n;
}

// (S (NP (DT The) (NN man)) (VP (VBD met))) over tokens 0..2
ResultNode sample_tree() {
  ResultNode np =
      rn_parent("NP", {rn_leaf("DT", 0, "The"), rn_leaf("NN", 1, "man")}, 1);
  ResultNode vp = rn_parent("VP", {rn_leaf("VBD", 2, "met")}, 0);
  return rn_parent("S", {std::move(np), std::move(vp)}, 1);
}

ParseResult sample_result() {
  ParseResult r;
  r.chunks.push_back(sample_tree());
  r.skipped = {3};
  r.forms = {"The", "man", "met", "badly"};
  r.heads = derive_heads(r.chunks, r.skipped,
                         static_cast<int>(r.forms.size()));
  return r;
}

}  // namespace

TEST_CASE("derive_heads attaches non-head children to the head word") {
  const std::vector<ResultNode> chunks{sample_tree()};
  const auto heads = derive_heads(chunks, {}, 3);
  CHECK(heads == std::vector<int>{1, 2, -1});
}

TEST_CASE("derive_heads on a single leaf chunk") {
  const std::vector<ResultNode> chunks{rn_leaf("NN", 0, "cats")};
  CHECK(derive_heads(chunks, {}, 1) == std::vector<int>{-1});
}

TEST_CASE("derive_heads joins chunk roots and skips under one root") {
  std::vector<ResultNode> chunks{rn_leaf("A", 0, "a", 1.0),
                                 rn_leaf("B", 2, "b", 5.0)};
  const std::vector<int> skipped{1};
  CHECK(derive_heads(chunks, skipped, 3, RootPolicy::kLeftmost) ==
        std::vector<int>{-1, 0, 0});
  CHECK(derive_heads(chunks, skipped, 3, RootPolicy::kHeaviest) ==
        std::vector<int>{2, 2, -1});
}

TEST_CASE("the heaviest-root tie keeps the earliest chunk") {
  std::vector<ResultNode> chunks{rn_leaf("A", 0, "a", 2.0),
                                 rn_leaf("B", 1, "b", 2.0)};
  CHECK(derive_heads(chunks, {}, 2, RootPolicy::kHeaviest) ==
        std::vector<int>{-1, 0});
}

TEST_CASE("derive_heads with no chunks maps every token to the root") {
  CHECK(derive_heads({}, {0, 1, 2}, 3) == std::vector<int>{-1, -1, -1});
}

TEST_CASE("to_dependency recomputes heads from the stored trees") {
  const ParseResult r = sample_result();
  CHECK(to_dependency(r) == r.heads);
  CHECK(to_dependency(r) == std::vector<int>{1, 2, -1, 2});
}

TEST_CASE("to_constituency renders chunks and skips in sentence order") {
  const ParseResult r = sample_result();
  CHECK(to_constituency(r) ==
        "(S (NP (DT The) (NN man)) (VP (VBD met)))\n"
        "(SKIP badly)\n");
}

TEST_CASE("internal bracket labels carry features, leaves stay bare") {
  ParseResult r;
  ResultNode v = rn_parent(
      "VP-O", {rn_leaf("VBD", 0, "met", 1.0, {"fin"})}, 0, {"fin", "x"});
  r.chunks.push_back(std::move(v));
  r.forms = {"met"};
  r.heads = {-1};
  CHECK(to_constituency(r) == "(VP-O[fin,x] (VBD met))\n");
}

TEST_CASE("to_conllu emits ten columns with one-based heads") {
  const ParseResult r = sample_result();
  CHECK(to_conllu(r, "s1") ==
        "# sent_id = s1\n"
        "# text = The man met badly\n"
        "1\tThe\t_\t_\tDT\t_\t2\tdep\t_\t_\n"
        "2\tman\t_\t_\tNN\t_\t3\tdep\t_\t_\n"
        "3\tmet\t_\t_\tVBD\t_\t0\tdep\t_\t_\n"
        "4\tbadly\t_\t_\t_\t_\t3\tdep\t_\t_\n"
        "\n");
  // no sent_id line without an id
  CHECK(to_conllu(r).rfind("# text =", 0) == 0);
}

TEST_CASE("to_conllu output reads back as a gold sentence") {
  const ParseResult r = sample_result();
  std::istringstream in(to_conllu(r, "round"));
  const auto sents = read_conllu(in);
  REQUIRE(sents.size() == 1);
  CHECK(sents[0].sent_id == "round");
  REQUIRE(sents[0].tokens.size() == 4);
  const std::vector<std::string> forms{"The", "man", "met", "badly"};
  const std::vector<int> heads{2, 3, 0, 3};
  const std::vector<std::string> xpos{"DT", "NN", "VBD", "_"};
  for (std::size_t i = 0; i < sents[0].tokens.size(); ++i) {
    CHECK(sents[0].tokens[i].id == static_cast<int>(i) + 1);
    CHECK(sents[0].tokens[i].form == forms[i]);
    CHECK(sents[0].tokens[i].head == heads[i]);
    CHECK(sents[0].tokens[i].xpos == xpos[i]);
  }
}

TEST_CASE("to_combined holds exactly tokens and phrases") {
  ParseResult r = sample_result();
  r.budget_exceeded = true;  // not the exporter's concern
  const std::string text = to_combined(r, r.forms);
  const auto j = nlohmann::json::parse(text);
  REQUIRE(j.size() == 2);
  REQUIRE(j.contains("tokens"));
  REQUIRE(j.contains("phrases"));

  REQUIRE(j["tokens"].size() == 4);
  CHECK(j["tokens"][0]["form"] == "The");
  CHECK(j["tokens"][0]["tag"] == "DT");
  CHECK(j["tokens"][0]["head"] == 1);
  CHECK(j["tokens"][2]["head"] == -1);
  CHECK(j["tokens"][3]["tag"] == "_");  // skipped token
  CHECK(j["tokens"][3]["head"] == 2);
}

TEST_CASE("combined phrase ids are post-order, children before parents") {
  const ParseResult r = sample_result();
  const CombinedRecord rec = parse_combined(to_combined(r, r.forms));

  REQUIRE(rec.phrases.size() == 6);
  for (std::size_t i = 0; i < rec.phrases.size(); ++i) {
    CHECK(rec.phrases[i].id == static_cast<int>(i));
    for (int c : rec.phrases[i].children)
      CHECK(c < rec.phrases[i].id);
  }
  const CombinedPhrase& s = rec.phrases.back();
  CHECK(s.cat == "S");
  CHECK(s.children == std::vector<int>{2, 4});
  CHECK(s.span == 3);
  CHECK(s.level == 2);
  CHECK(s.head_loc == 2);
  CHECK(rec.phrases[2].cat == "NP");
  CHECK(rec.phrases[2].children == std::vector<int>{0, 1});
  CHECK(rec.phrases[0].cat == "DT");

  REQUIRE(rec.tokens.size() == 4);
  CHECK(rec.tokens[1].form == "man");
  CHECK(rec.tokens[1].head == 2);
}

TEST_CASE("parse_combined rejects junk and tolerates extra keys") {
  CHECK_THROWS_AS(parse_combined("not json"), InputError);
  CHECK_THROWS_AS(parse_combined(R"({"tokens": []})"), InputError);
  CHECK_THROWS_AS(
      parse_combined(R"({"tokens": [{"id": 0}], "phrases": []})"),
      InputError);

  const CombinedRecord rec = parse_combined(
      R"({"tokens": [{"id": 0, "form": "x", "tag": "NN", "head": -1,
                      "extra": true}],
          "phrases": [], "trailer": 7})");
  REQUIRE(rec.tokens.size() == 1);
  CHECK(rec.tokens[0].tag == "NN");
  CHECK(rec.phrases.empty());
}

TEST_CASE("a parsed chunk renders through every exporter") {
  std::istringstream rules(
      "BE -> HAVE ^AUX\n");
  const Grammar g = load_grammar(rules);
  std::vector<TagDistribution> dists;
  dists.push_back({0, "have", {{"HAVE", 1.0, {"fin", "inf"}}}});
  dists.push_back({1, "been", {{"AUX", 1.0, {"be", "part"}}}});
  const Chart chart = parse_tagged(dists, g, {});
  const ChunkPath path = connect_chunks(chart);
  const auto results = rank_results(chart, path, 1, {"have", "been"});
  REQUIRE(results.size() == 1);

  CHECK(to_constituency(results[0]) == "(BE (HAVE have) (AUX been))\n");
  CHECK(results[0].heads == std::vector<int>{1, -1});

  const auto j = nlohmann::json::parse(to_combined(results[0],
                                                   results[0].forms));
  CHECK(j["phrases"].size() == 3);
  CHECK(j["phrases"][2]["cat"] == "BE");
  CHECK(j["phrases"][2]["head_loc"] == 1);
}
