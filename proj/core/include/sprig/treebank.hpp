#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "sprig/connect.hpp"
#include "sprig/engine.hpp"

namespace sprig {

struct GoldToken {
  int id = 0;  // 1-based
  std::string form;
  std::string xpos;
  int head = 0;  // 1-based, 0 = root
};

struct GoldSentence {
  std::string sent_id;
  std::vector<GoldToken> tokens;
};

// Multiword-token ranges ("3-4") and empty nodes ("5.1") are skipped;
// "# sent_id = ..." comments are kept. Non-integer heads and
// non-consecutive ids raise InputError naming the sentence.
std::vector<GoldSentence> read_conllu(std::istream& in);
std::vector<GoldSentence> read_conllu_file(const std::string& path);

// Heads are 1-based with 0 = root on both sides.
std::pair<int, int> uas(const std::vector<int>& pred_heads,
                        const std::vector<int>& gold_heads);

struct ParserBundle {
  const Grammar* grammar = nullptr;
  const TaggerModel* model = nullptr;
  const ClosedClassTable* closed = nullptr;
};

struct EvalConfig {
  ParseConfig parse;
  ConnectConfig connect;
  RootPolicy root_policy = RootPolicy::kLeftmost;
  bool gold_tags = false;  // tag from the gold XPOS column instead of the model
  int jobs = 1;
};

// Tag distributions for one gold sentence. With cfg.gold_tags the XPOS
// column supplies the tag at weight 1; closed-class entries override
// even gold tags, and "_" falls back to the model.
std::vector<TagDistribution> tag_gold_sentence(const GoldSentence& sentence,
                                               const ParserBundle& bundle,
                                               const EvalConfig& cfg);

// Parses one gold sentence and returns predicted heads, 1-based with
// 0 = root.
std::vector<int> predict_heads(const GoldSentence& sentence,
                               const ParserBundle& bundle,
                               const EvalConfig& cfg);

struct FileReport {
  std::string path;
  int sentences = 0;
  long long tokens = 0;
  long long correct = 0;
  double uas = 0.0;
  double seconds = 0.0;
  std::string error;  // set when the file could not be evaluated
};

struct CorpusReport {
  std::vector<FileReport> files;
  double macro_uas = 0.0;  // mean over evaluated files with tokens
  double micro_uas = 0.0;  // pooled over all evaluated tokens
  int total_sentences = 0;
  long long total_tokens = 0;
  long long total_correct = 0;
  double seconds = 0.0;
};

// Sentences are parsed with cfg.jobs worker threads; results are
// aggregated in input order, so the report is deterministic. A file
// that cannot be read is recorded with its error and excluded from the
// averages; the run continues.
CorpusReport evaluate_corpus(const std::vector<std::string>& files,
                             const ParserBundle& bundle,
                             const EvalConfig& cfg);

// Timing is off by default so repeated runs serialize identically.
std::string report_to_json(const CorpusReport& report,
                           bool include_timing = false);
std::string report_to_table(const CorpusReport& report);

}  // namespace sprig
