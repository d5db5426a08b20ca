#include "sprig/treebank.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "sprig/error.hpp"
#include "sprig/exporter.hpp"

namespace sprig {

namespace {

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::vector<std::string> split_tabs(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == '\t') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isdigit(c);
  });
}

}  // namespace

std::vector<GoldSentence> read_conllu(std::istream& in) {
  std::vector<GoldSentence> sentences;
  GoldSentence current;
  const std::string id_prefix = "# sent_id";

  auto where = [&]() {
    return "sentence " + std::to_string(sentences.size() + 1);
  };
  auto flush = [&]() {
    if (current.tokens.empty()) {
      current = GoldSentence{};
      return;
    }
    const int n = static_cast<int>(current.tokens.size());
    for (const GoldToken& t : current.tokens)
      if (t.head < 0 || t.head > n)
        throw InputError(where() + ": head " + std::to_string(t.head) +
                         " out of range");
    sentences.push_back(std::move(current));
    current = GoldSentence{};
  };

  std::string raw;
  while (std::getline(in, raw)) {
    const std::string line = strip_cr(raw);
    if (line.empty()) {
      flush();
      continue;
    }
    if (line[0] == '#') {
      if (line.compare(0, id_prefix.size(), id_prefix) == 0) {
        const auto eq = line.find('=');
        if (eq != std::string::npos) {
          auto value = line.substr(eq + 1);
          const auto begin = value.find_first_not_of(" \t");
          current.sent_id =
              begin == std::string::npos ? "" : value.substr(begin);
        }
      }
      continue;
    }
    const auto cols = split_tabs(line);
    if (cols.size() < 8)
      throw InputError(where() + ": expected 10 tab-separated columns");
    const std::string& id = cols[0];
    if (id.find('-') != std::string::npos) continue;  // multiword range
    if (id.find('.') != std::string::npos) continue;  // empty node
    if (!all_digits(id))
      throw InputError(where() + ": non-integer token id '" + id + "'");
    GoldToken token;
    token.id = std::stoi(id);
    if (token.id != static_cast<int>(current.tokens.size()) + 1)
      throw InputError(where() + ": non-consecutive token ids");
    token.form = cols[1];
    token.xpos = cols[4];
    if (!all_digits(cols[6]))
      throw InputError(where() + ": non-integer head '" + cols[6] + "'");
    token.head = std::stoi(cols[6]);
    current.tokens.push_back(std::move(token));
  }
  flush();
  return sentences;
}

std::vector<GoldSentence> read_conllu_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open treebank file: " + path);
  try {
    return read_conllu(in);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::pair<int, int> uas(const std::vector<int>& pred_heads,
                        const std::vector<int>& gold_heads) {
  if (pred_heads.size() != gold_heads.size())
    throw InternalError("uas: head array length mismatch");
  int correct = 0;
  for (std::size_t i = 0; i < pred_heads.size(); ++i)
    if (pred_heads[i] == gold_heads[i]) ++correct;
  return {correct, static_cast<int>(pred_heads.size())};
}

std::vector<TagDistribution> tag_gold_sentence(const GoldSentence& sentence,
                                               const ParserBundle& bundle,
                                               const EvalConfig& cfg) {
  if (!bundle.closed)
    throw InternalError("parser bundle missing closed-class table");
  static const TaggerModel empty_model;
  const TaggerModel& model = bundle.model ? *bundle.model : empty_model;

  std::vector<TagDistribution> dists;
  dists.reserve(sentence.tokens.size());
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    const GoldToken& token = sentence.tokens[i];
    TagDistribution d;
    if (cfg.gold_tags && !bundle.closed->contains(token.form) &&
        token.xpos != "_" && !token.xpos.empty()) {
      d.form = token.form;
      TagHypothesis hyp;
      hyp.tag = token.xpos;
      hyp.weight = 1.0;
      const auto& table = model.tag_features.empty()
                              ? default_tag_features()
                              : model.tag_features;
      const auto it = table.find(hyp.tag);
      if (it != table.end()) hyp.features = it->second;
      d.hypotheses.push_back(std::move(hyp));
    } else {
      d = tag_token(model, *bundle.closed, token.form, cfg.parse.tag_cutoff);
    }
    d.token_index = static_cast<int>(i);
    dists.push_back(std::move(d));
  }
  return dists;
}

std::vector<int> predict_heads(const GoldSentence& sentence,
                               const ParserBundle& bundle,
                               const EvalConfig& cfg) {
  if (!bundle.grammar || !bundle.closed)
    throw InternalError("parser bundle missing grammar or closed-class table");

  std::vector<std::string> forms;
  forms.reserve(sentence.tokens.size());
  for (const GoldToken& t : sentence.tokens) forms.push_back(t.form);

  const auto dists = tag_gold_sentence(sentence, bundle, cfg);
  const Chart chart = parse_tagged(dists, *bundle.grammar, cfg.parse);
  const ChunkPath path = connect_chunks(chart, cfg.connect);
  const auto results =
      rank_results(chart, path, 1, forms, cfg.connect, cfg.root_policy);
  if (results.empty()) throw InternalError("rank_results returned nothing");

  std::vector<int> heads;
  heads.reserve(results.front().heads.size());
  for (int h : results.front().heads) heads.push_back(h + 1);
  return heads;
}

namespace {

FileReport evaluate_file(const std::string& path, const ParserBundle& bundle,
                         const EvalConfig& cfg) {
  FileReport report;
  report.path = path;
  const auto start = std::chrono::steady_clock::now();

  std::vector<GoldSentence> sentences;
  try {
    sentences = read_conllu_file(path);
  } catch (const InputError& e) {
    report.error = e.what();
    return report;
  }

  std::vector<std::pair<int, int>> scores(sentences.size());
  const int jobs = std::max(1, cfg.jobs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_guard;
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= sentences.size()) return;
      try {
        std::vector<int> gold;
        for (const GoldToken& t : sentences[i].tokens)
          gold.push_back(t.head);
        scores[i] = uas(predict_heads(sentences[i], bundle, cfg), gold);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_guard);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  report.sentences = static_cast<int>(sentences.size());
  for (const auto& [correct, total] : scores) {
    report.correct += correct;
    report.tokens += total;
  }
  report.uas = report.tokens
                   ? static_cast<double>(report.correct) / report.tokens
                   : 0.0;
  report.seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return report;
}

}  // namespace

CorpusReport evaluate_corpus(const std::vector<std::string>& files,
                             const ParserBundle& bundle,
                             const EvalConfig& cfg) {
  CorpusReport corpus;
  const auto start = std::chrono::steady_clock::now();
  double macro_sum = 0.0;
  int macro_files = 0;
  for (const std::string& path : files) {
    FileReport report = evaluate_file(path, bundle, cfg);
    if (report.error.empty()) {
      corpus.total_sentences += report.sentences;
      corpus.total_tokens += report.tokens;
      corpus.total_correct += report.correct;
      if (report.tokens > 0) {
        macro_sum += report.uas;
        ++macro_files;
      }
    }
    corpus.files.push_back(std::move(report));
  }
  corpus.macro_uas = macro_files ? macro_sum / macro_files : 0.0;
  corpus.micro_uas =
      corpus.total_tokens
          ? static_cast<double>(corpus.total_correct) / corpus.total_tokens
          : 0.0;
  corpus.seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return corpus;
}

std::string report_to_json(const CorpusReport& report, bool include_timing) {
  nlohmann::json files = nlohmann::json::array();
  for (const FileReport& f : report.files) {
    nlohmann::json entry = {{"path", f.path},
                            {"sentences", f.sentences},
                            {"tokens", f.tokens},
                            {"correct", f.correct},
                            {"uas", f.uas}};
    if (!f.error.empty()) entry["error"] = f.error;
    if (include_timing) entry["seconds"] = f.seconds;
    files.push_back(std::move(entry));
  }
  nlohmann::json j = {{"files", files},
                      {"macro_uas", report.macro_uas},
                      {"micro_uas", report.micro_uas},
                      {"total_sentences", report.total_sentences},
                      {"total_tokens", report.total_tokens},
                      {"total_correct", report.total_correct}};
  if (include_timing) j["seconds"] = report.seconds;
  return j.dump(2) + "\n";
}

std::string report_to_table(const CorpusReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(40) << "file" << std::right << std::setw(8)
      << "sents" << std::setw(10) << "tokens" << std::setw(10) << "correct"
      << std::setw(9) << "UAS" << std::setw(9) << "secs" << '\n';
  for (const FileReport& f : report.files) {
    out << std::left << std::setw(40) << f.path << std::right;
    if (!f.error.empty()) {
      out << "  ERROR: " << f.error << '\n';
      continue;
    }
    out << std::setw(8) << f.sentences << std::setw(10) << f.tokens
        << std::setw(10) << f.correct << std::setw(8) << std::fixed
        << std::setprecision(2) << f.uas * 100.0 << '%' << std::setw(9)
        << std::setprecision(2) << f.seconds << '\n';
  }
  out << std::left << std::setw(40) << "total" << std::right << std::setw(8)
      << report.total_sentences << std::setw(10) << report.total_tokens
      << std::setw(10) << report.total_correct << std::setw(8) << std::fixed
      << std::setprecision(2) << report.micro_uas * 100.0 << '%'
      << std::setw(9) << std::setprecision(2) << report.seconds << '\n';
  out << "macro UAS " << std::fixed << std::setprecision(2)
      << report.macro_uas * 100.0 << "%  micro UAS "
      << report.micro_uas * 100.0 << "%\n";
  return out.str();
}

}  // namespace sprig
