// Microbenchmarks over the shipped grammar. Sentences are synthetic
// DT NN VBD ... patterns fed in as pre-tagged distributions so the
// numbers isolate the chart engine from the tagger.

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "sprig/connect.hpp"
#include "sprig/engine.hpp"
#include "sprig/grammar.hpp"
#include "sprig/lexicon.hpp"

namespace {

const sprig::Grammar& grammar() {
  static const sprig::Grammar g =
      sprig::load_grammar_file(SPRIG_DATA_DIR "/grammar.rules");
  return g;
}

const sprig::ClosedClassTable& closed_class() {
  static const sprig::ClosedClassTable t =
      sprig::load_closed_class_file(SPRIG_DATA_DIR "/closed_class.csv");
  return t;
}

std::vector<sprig::TagDistribution> pattern_sentence(int n) {
  struct Stock {
    const char* tag;
    double weight;
    sprig::FeatureSet feats;
  };
  static const std::vector<Stock> stock{
      {"DT", 1.0, {}}, {"NN", 0.8, {}}, {"VBD", 0.7, {"fin"}},
      {"IN", 1.0, {}}, {"JJ", 0.9, {}}, {"NN", 0.8, {}},
  };
  std::vector<sprig::TagDistribution> dists;
  for (int i = 0; i < n; ++i) {
    const Stock& s = stock[i % stock.size()];
    sprig::TagDistribution d;
    d.token_index = i;
    d.form = "w" + std::to_string(i);
    d.hypotheses.push_back({s.tag, s.weight, s.feats});
    if (s.weight < 1.0)
      d.hypotheses.push_back({"NNP", 1.0 - s.weight, {}});
    dists.push_back(std::move(d));
  }
  return dists;
}

void BM_Parse(benchmark::State& state) {
  const auto dists = pattern_sentence(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    sprig::Chart chart = sprig::parse_tagged(dists, grammar(), {});
    benchmark::DoNotOptimize(chart.size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Parse)->Arg(4)->Arg(8)->Arg(16)->Arg(32)->Unit(
    benchmark::kMicrosecond);

void BM_Connect(benchmark::State& state) {
  const auto dists = pattern_sentence(static_cast<int>(state.range(0)));
  const sprig::Chart chart = sprig::parse_tagged(dists, grammar(), {});
  for (auto _ : state) {
    sprig::ChunkPath path = sprig::connect_chunks(chart);
    benchmark::DoNotOptimize(path.cost);
  }
}
BENCHMARK(BM_Connect)->Arg(8)->Arg(32)->Unit(benchmark::kMicrosecond);

void BM_TagToken(benchmark::State& state) {
  std::vector<std::vector<std::pair<std::string, std::string>>> train{
      {{"men", "NNS"}, {"met", "VBD"}, {"dogs", "NNS"}},
      {{"met", "VBD"}, {"men", "NNS"}},
  };
  const sprig::TaggerModel model = sprig::train_tagger(train);
  const std::vector<std::string> forms{"the", "met", "unknownform"};
  std::size_t i = 0;
  for (auto _ : state) {
    sprig::TagDistribution d = sprig::tag_token(
        model, closed_class(), forms[i++ % forms.size()], 0.05);
    benchmark::DoNotOptimize(d.hypotheses.size());
  }
}
BENCHMARK(BM_TagToken)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
