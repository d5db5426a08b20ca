// sprig: rule-driven chart parser with dependency and constituency output.
// Subcommands: train-tagger, parse, eval.

#include <atomic>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sprig/engine.hpp"
#include "sprig/error.hpp"
#include "sprig/exporter.hpp"
#include "sprig/grammar.hpp"
#include "sprig/lexicon.hpp"
#include "sprig/treebank.hpp"

namespace {

using sprig::InputError;

// One value bag for every subcommand; the config file and the flags both
// write here, flags last.
struct Options {
  std::string grammar_path;
  std::string model_path;
  std::string closed_class_path;
  std::string tag_features_path;
  std::string format = "json";
  std::string root_policy = "leftmost";
  int k = 1;
  int max_skip = 2;
  int beam = 8;
  int max_phrases = 50000;
  double cutoff = 0.05;
  bool gold_tags = false;
  int jobs = 1;
  bool trace = false;
  bool seedless = false;  // reserved; nothing in the pipeline is random
  bool conllu_input = false;
  bool timing = false;
  int fallback_k = 8;
  bool case_fold = true;
  double lambda = 0.5;
  double mu = 0.25;
  double epsilon = 0.01;
  double sigma = 2.0;
  double alpha = 0.5;
  double beta = 1.0;
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "1" || value == "true" || value == "yes" || value == "on")
    return true;
  if (value == "0" || value == "false" || value == "no" || value == "off")
    return false;
  throw InputError("config: bad boolean for '" + key + "': " + value);
}

int parse_int(const std::string& value, const std::string& key) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw InputError("config: bad integer for '" + key + "': " + value);
  }
}

double parse_double(const std::string& value, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw InputError("config: bad number for '" + key + "': " + value);
  }
}

// Flat key=value lines; keys mirror the long flags without the dashes.
void apply_config(Options& opts, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw InputError("config line " + std::to_string(lineno) +
                       ": expected key=value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key == "grammar") opts.grammar_path = value;
    else if (key == "model") opts.model_path = value;
    else if (key == "closed-class") opts.closed_class_path = value;
    else if (key == "tag-features") opts.tag_features_path = value;
    else if (key == "format") opts.format = value;
    else if (key == "root-policy") opts.root_policy = value;
    else if (key == "k") opts.k = parse_int(value, key);
    else if (key == "max-skip") opts.max_skip = parse_int(value, key);
    else if (key == "beam") opts.beam = parse_int(value, key);
    else if (key == "max-phrases") opts.max_phrases = parse_int(value, key);
    else if (key == "cutoff") opts.cutoff = parse_double(value, key);
    else if (key == "gold-tags") opts.gold_tags = parse_bool(value, key);
    else if (key == "jobs") opts.jobs = parse_int(value, key);
    else if (key == "timing") opts.timing = parse_bool(value, key);
    else if (key == "fallback-k") opts.fallback_k = parse_int(value, key);
    else if (key == "case-fold") opts.case_fold = parse_bool(value, key);
    else if (key == "lambda") opts.lambda = parse_double(value, key);
    else if (key == "mu") opts.mu = parse_double(value, key);
    else if (key == "epsilon") opts.epsilon = parse_double(value, key);
    else if (key == "sigma") opts.sigma = parse_double(value, key);
    else if (key == "alpha") opts.alpha = parse_double(value, key);
    else if (key == "beta") opts.beta = parse_double(value, key);
    else
      throw InputError("config line " + std::to_string(lineno) +
                       ": unknown key '" + key + "'");
  }
}

std::optional<std::string> find_config_flag(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
    if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
  }
  return std::nullopt;
}

sprig::ParseConfig parse_config_of(const Options& o) {
  sprig::ParseConfig cfg;
  cfg.max_skip = o.max_skip;
  cfg.beam_per_cell = o.beam;
  cfg.max_phrases = o.max_phrases;
  cfg.tag_cutoff = o.cutoff;
  return cfg;
}

sprig::ConnectConfig connect_config_of(const Options& o) {
  sprig::ConnectConfig cfg;
  cfg.lambda = o.lambda;
  cfg.mu = o.mu;
  cfg.epsilon = o.epsilon;
  cfg.sigma = o.sigma;
  cfg.alpha = o.alpha;
  cfg.beta = o.beta;
  return cfg;
}

sprig::RootPolicy root_policy_of(const Options& o) {
  if (o.root_policy == "leftmost") return sprig::RootPolicy::kLeftmost;
  if (o.root_policy == "heaviest") return sprig::RootPolicy::kHeaviest;
  throw InputError("unknown root policy: " + o.root_policy);
}

// Loaded resources shared by parse and eval.
struct Resources {
  sprig::Grammar grammar;
  sprig::TaggerModel model;
  sprig::ClosedClassTable closed;
};

Resources load_resources(const Options& opts) {
  Resources r;
  r.grammar = sprig::load_grammar_file(opts.grammar_path);
  if (!opts.model_path.empty())
    r.model = sprig::load_tagger_file(opts.model_path);
  if (!opts.closed_class_path.empty())
    r.closed = sprig::load_closed_class_file(opts.closed_class_path);
  if (!opts.tag_features_path.empty()) {
    std::ifstream in(opts.tag_features_path);
    if (!in)
      throw InputError("cannot open tag-features file: " +
                       opts.tag_features_path);
    r.model.tag_features = sprig::load_tag_features(in);
  } else if (r.model.tag_features.empty()) {
    r.model.tag_features = sprig::default_tag_features();
  }
  return r;
}

int run_train_tagger(const Options& opts,
                     const std::vector<std::string>& files,
                     const std::string& output) {
  std::vector<std::vector<std::pair<std::string, std::string>>> sentences;
  for (const std::string& path : files) {
    for (const sprig::GoldSentence& gold : sprig::read_conllu_file(path)) {
      std::vector<std::pair<std::string, std::string>> sent;
      sent.reserve(gold.tokens.size());
      for (const sprig::GoldToken& t : gold.tokens)
        sent.emplace_back(t.form, t.xpos);
      sentences.push_back(std::move(sent));
    }
  }
  const sprig::TaggerModel model =
      sprig::train_tagger(sentences, opts.fallback_k, opts.case_fold);
  sprig::save_tagger_file(model, output);
  std::cout << "trained on " << sentences.size() << " sentences, "
            << model.counts.size() << " forms -> " << output << "\n";
  return 0;
}

struct InputSentence {
  sprig::GoldSentence gold;  // token-line input fills forms only
  bool from_conllu = false;
};

bool is_conllu_path(const std::string& path) {
  return path.size() >= 7 && path.rfind(".conllu") == path.size() - 7;
}

void collect_token_lines(std::istream& in, std::vector<InputSentence>& out) {
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream words(line);
    InputSentence s;
    std::string form;
    int id = 0;
    while (words >> form) {
      sprig::GoldToken t;
      t.id = ++id;
      t.form = form;
      t.xpos = "_";
      s.gold.tokens.push_back(std::move(t));
    }
    if (!s.gold.tokens.empty()) out.push_back(std::move(s));
  }
}

std::vector<InputSentence> collect_input(const Options& opts,
                                         const std::vector<std::string>& inputs) {
  std::vector<InputSentence> sentences;
  std::vector<std::string> sources = inputs;
  if (sources.empty()) sources.push_back("-");
  for (const std::string& src : sources) {
    const bool conllu = opts.conllu_input || is_conllu_path(src);
    if (src == "-") {
      if (conllu) {
        for (auto& gold : sprig::read_conllu(std::cin))
          sentences.push_back({std::move(gold), true});
      } else {
        collect_token_lines(std::cin, sentences);
      }
    } else if (conllu) {
      for (auto& gold : sprig::read_conllu_file(src))
        sentences.push_back({std::move(gold), true});
    } else {
      std::ifstream in(src);
      if (!in) throw InputError("cannot open input: " + src);
      collect_token_lines(in, sentences);
    }
  }
  if (opts.gold_tags)
    for (const InputSentence& s : sentences)
      if (!s.from_conllu)
        throw InputError("--gold-tags requires CoNLL-U input");
  return sentences;
}

std::string render_sentence(const InputSentence& sentence, const Options& opts,
                            const Resources& res, std::size_t index,
                            std::ostream* trace) {
  const sprig::ParserBundle bundle{&res.grammar, &res.model, &res.closed};
  sprig::EvalConfig ecfg;
  ecfg.parse = parse_config_of(opts);
  ecfg.connect = connect_config_of(opts);
  ecfg.root_policy = root_policy_of(opts);
  ecfg.gold_tags = opts.gold_tags;

  std::vector<std::string> forms;
  forms.reserve(sentence.gold.tokens.size());
  for (const sprig::GoldToken& t : sentence.gold.tokens)
    forms.push_back(t.form);

  if (trace) {
    *trace << "== sentence " << index << ":";
    for (const std::string& f : forms) *trace << " " << f;
    *trace << "\n";
  }

  const auto dists = sprig::tag_gold_sentence(sentence.gold, bundle, ecfg);
  const sprig::Chart chart =
      sprig::parse_tagged(dists, res.grammar, ecfg.parse, trace);
  if (trace) {
    *trace << "chart: n=" << forms.size() << "\n";
    chart.dump(*trace);
  }
  const sprig::ChunkPath path = sprig::connect_chunks(chart, ecfg.connect);
  const auto results = sprig::rank_results(chart, path, opts.k, forms,
                                           ecfg.connect, ecfg.root_policy);

  std::string out;
  for (std::size_t r = 0; r < results.size(); ++r) {
    const sprig::ParseResult& result = results[r];
    if (opts.format == "json") {
      nlohmann::json record = nlohmann::json::parse(
          sprig::to_combined(result, forms));
      if (result.budget_exceeded) record["budget_exceeded"] = true;
      out += record.dump();
      out += "\n";
    } else if (opts.format == "conllu") {
      std::string sent_id = sentence.gold.sent_id;
      if (r > 0)
        sent_id = (sent_id.empty() ? "k" : sent_id + "-k") +
                  std::to_string(r + 1);
      if (result.budget_exceeded) out += "# budget_exceeded = true\n";
      out += sprig::to_conllu(result, sent_id);
    } else {  // brackets
      out += sprig::to_constituency(result);
    }
  }
  return out;
}

int run_parse(const Options& opts, const std::vector<std::string>& inputs) {
  if (opts.trace && opts.jobs > 1)
    throw InputError("--trace requires --jobs 1");
  const Resources res = load_resources(opts);
  const std::vector<InputSentence> sentences = collect_input(opts, inputs);

  std::vector<std::string> rendered(sentences.size());
  if (opts.jobs <= 1) {
    std::ostream* trace = opts.trace ? &std::cerr : nullptr;
    for (std::size_t i = 0; i < sentences.size(); ++i)
      rendered[i] = render_sentence(sentences[i], opts, res, i, trace);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= sentences.size()) return;
        try {
          rendered[i] = render_sentence(sentences[i], opts, res, i, nullptr);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> threads;
    for (int t = 0; t < opts.jobs; ++t) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
    if (error) std::rethrow_exception(error);
  }

  for (const std::string& s : rendered) std::cout << s;
  return 0;
}

int run_eval(const Options& opts, const std::vector<std::string>& files,
             const std::string& json_path) {
  const Resources res = load_resources(opts);
  const sprig::ParserBundle bundle{&res.grammar, &res.model, &res.closed};
  sprig::EvalConfig ecfg;
  ecfg.parse = parse_config_of(opts);
  ecfg.connect = connect_config_of(opts);
  ecfg.root_policy = root_policy_of(opts);
  ecfg.gold_tags = opts.gold_tags;
  ecfg.jobs = opts.jobs;

  const sprig::CorpusReport report =
      sprig::evaluate_corpus(files, bundle, ecfg);
  const std::string json = sprig::report_to_json(report, opts.timing);
  if (json_path == "-") {
    std::cout << json;
  } else {
    std::cout << sprig::report_to_table(report);
    if (!json_path.empty()) {
      std::ofstream out(json_path);
      if (!out) throw InputError("cannot write JSON report: " + json_path);
      out << json;
    }
  }
  return 0;
}

void add_shared_options(CLI::App* cmd, Options& opts) {
  cmd->add_option("--config", "flat key=value config file (defaults < config < flags)");
  cmd->add_option("--max-skip", opts.max_skip,
                  "tokens a binary rule may skip between children")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--beam", opts.beam,
                  "alive phrases kept per chart cell; 0 disables the beam");
  cmd->add_option("--max-phrases", opts.max_phrases,
                  "chart growth budget per sentence")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--cutoff", opts.cutoff, "tag hypothesis cutoff");
  cmd->add_option("--jobs", opts.jobs, "sentence-level worker threads")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--seedless", opts.seedless,
                "reserved; nothing in the pipeline is random");
  cmd->add_option("--root-policy", opts.root_policy,
                  "which chunk root becomes the sentence root")
      ->check(CLI::IsMember({"leftmost", "heaviest"}));
  cmd->add_option("--lambda", opts.lambda, "edge cost per uncovered token");
  cmd->add_option("--mu", opts.mu, "edge cost weight reward");
  cmd->add_option("--epsilon", opts.epsilon, "edge cost floor");
  cmd->add_option("--sigma", opts.sigma, "cost of skipping a token");
  cmd->add_option("--alpha", opts.alpha, "score penalty per extra chunk");
  cmd->add_option("--beta", opts.beta, "score penalty per skipped token");
}

void add_resource_options(CLI::App* cmd, Options& opts) {
  cmd->add_option("--grammar", opts.grammar_path, "grammar rules file")
      ->required();
  cmd->add_option("--model", opts.model_path, "trained tagger model");
  cmd->add_option("--closed-class", opts.closed_class_path,
                  "closed-class CSV (form,tag,features,weight)");
  cmd->add_option("--tag-features", opts.tag_features_path,
                  "tag feature CSV overriding the built-in table");
  cmd->add_flag("--gold-tags", opts.gold_tags,
                "tag from the gold XPOS column instead of the model");
}

}  // namespace

int main(int argc, char** argv) {
  Options opts;
  CLI::App app{"rule-driven chart parser producing ranked dependency and "
               "constituency analyses"};
  app.require_subcommand(1);

  std::vector<std::string> train_files;
  std::string train_output;
  CLI::App* train = app.add_subcommand(
      "train-tagger", "train the frequency tagger from CoNLL-U files");
  train->add_option("files", train_files, "CoNLL-U training files")
      ->required();
  train->add_option("-o,--output", train_output, "model output path")
      ->required();
  train->add_option("--fallback-k", opts.fallback_k,
                    "open-class tags kept in the unknown-word fallback")
      ->check(CLI::PositiveNumber);
  train->add_flag("--case-fold,!--no-case-fold", opts.case_fold,
                  "fold unmatched forms to lowercase");
  train->add_option("--config", "flat key=value config file");

  std::vector<std::string> parse_inputs;
  CLI::App* parse = app.add_subcommand(
      "parse", "parse sentences and print analyses");
  parse->add_option("inputs", parse_inputs,
                    "token-per-line files, .conllu files, or '-' for stdin");
  add_resource_options(parse, opts);
  add_shared_options(parse, opts);
  parse->add_option("--format", opts.format, "output format")
      ->check(CLI::IsMember({"json", "conllu", "brackets"}));
  parse->add_option("--k", opts.k, "ranked parses per sentence")
      ->check(CLI::PositiveNumber);
  parse->add_flag("--trace", opts.trace,
                  "log projections and dump the chart to stderr");
  parse->add_flag("--conllu", opts.conllu_input,
                  "treat every input as CoNLL-U regardless of extension");

  std::vector<std::string> eval_files;
  std::string eval_json;
  CLI::App* eval = app.add_subcommand(
      "eval", "score attachment accuracy against gold CoNLL-U files");
  eval->add_option("files", eval_files, "gold CoNLL-U files")->required();
  add_resource_options(eval, opts);
  add_shared_options(eval, opts);
  eval->add_option("--json", eval_json,
                   "write the JSON report here ('-' prints it instead of "
                   "the table)");
  eval->add_flag("--timing", opts.timing,
                 "include per-file seconds in the JSON report");

  try {
    if (const auto config = find_config_flag(argc, argv))
      apply_config(opts, *config);
    app.parse(argc, argv);
    if (train->parsed())
      return run_train_tagger(opts, train_files, train_output);
    if (parse->parsed()) return run_parse(opts, parse_inputs);
    return run_eval(opts, eval_files, eval_json);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const sprig::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const sprig::InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
