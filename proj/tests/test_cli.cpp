#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace {

const std::string kBin = SPRIG_BIN;
const std::string kGrammar = SPRIG_DATA_DIR "/grammar.rules";
const std::string kClosed = SPRIG_DATA_DIR "/closed_class.csv";
const std::string kToy = SPRIG_TEST_DATA_DIR "/toy.conllu";
const std::string kToyTrain = SPRIG_TEST_DATA_DIR "/toy-train.conllu";

struct RunResult {
  int code = -1;
  std::string out;
};

// runs through /bin/sh; callers append their own stderr redirection
RunResult run(const std::string& cmd) {
  RunResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return result;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) result.out.append(buf, n);
  const int status = pclose(pipe);
  if (WIFEXITED(status)) result.code = WEXITSTATUS(status);
  return result;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string write_file(const std::string& name, const std::string& text) {
  const std::string path = temp_path(name);
  std::ofstream out(path);
  out << text;
  return path;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const std::string& model_path() {
  static const std::string path = [] {
    const std::string p = temp_path("sprig_cli_model.tm");
    run(kBin + " train-tagger " + kToyTrain + " -o " + p + " 2>/dev/null");
    return p;
  }();
  return path;
}

std::string parse_cmd() {
  return kBin + " parse --grammar " + kGrammar + " --closed-class " +
         kClosed + " --model " + model_path();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

constexpr const char* kSample = "printf 'The man I met\\n'";
constexpr const char* kBracketGold =
    "(NP (NP (NP-DT (DT The) (NP-U (NN man)))) "
    "(S/NP (NP (PRP I)) (VP-O/NP (V[fin] (VBD met)))))";

}  // namespace

TEST_CASE("train-tagger reports its work and reproduces identical bytes") {
  const std::string a = temp_path("sprig_model_a.tm");
  const std::string b = temp_path("sprig_model_b.tm");
  const auto first =
      run(kBin + " train-tagger " + kToyTrain + " -o " + a + " 2>/dev/null");
  CHECK(first.code == 0);
  CHECK(first.out.rfind("trained on 3 sentences, 12 forms", 0) == 0);
  const auto second =
      run(kBin + " train-tagger " + kToyTrain + " -o " + b + " 2>/dev/null");
  CHECK(second.code == 0);
  const std::string bytes = read_file(a);
  CHECK(!bytes.empty());
  CHECK(bytes == read_file(b));
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST_CASE("usage errors exit with 2, help with 0") {
  CHECK(run(kBin + " --help 2>/dev/null").code == 0);
  CHECK(run(kBin + " --help 2>/dev/null").out.find("parse") !=
        std::string::npos);
  CHECK(run(kBin + " 2>/dev/null </dev/null").code == 2);
  CHECK(run(kBin + " parse 2>/dev/null </dev/null").code == 2);
  CHECK(run(kBin + " parse --grammar /nonexistent.rules 2>/dev/null"
                   " </dev/null").code == 2);
  CHECK(run(parse_cmd() + " --format junk 2>/dev/null </dev/null").code == 2);
  CHECK(run(parse_cmd() + " --no-such-flag 2>/dev/null </dev/null").code == 2);
  CHECK(run(kBin + " train-tagger -o /tmp/x.tm 2>/dev/null").code == 2);
  CHECK(run(kBin + " train-tagger " + kToyTrain + " 2>/dev/null").code == 2);
}

TEST_CASE("parsed tokens come back with tags and heads") {
  const auto r = run(std::string(kSample) + " | " + parse_cmd() +
                     " 2>/dev/null");
  REQUIRE(r.code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 1);

  const auto j = nlohmann::json::parse(lines[0]);
  REQUIRE(j["tokens"].size() == 4);
  CHECK(j["tokens"][0]["tag"] == "DT");
  CHECK(j["tokens"][1]["tag"] == "NN");
  CHECK(j["tokens"][2]["tag"] == "PRP");
  CHECK(j["tokens"][3]["tag"] == "VBD");
  CHECK(j["tokens"][0]["head"] == 1);
  CHECK(j["tokens"][1]["head"] == 3);
  CHECK(j["tokens"][2]["head"] == 3);
  CHECK(j["tokens"][3]["head"] == -1);
  CHECK(!j.contains("budget_exceeded"));

  // byte-identical on a second run
  const auto again = run(std::string(kSample) + " | " + parse_cmd() +
                         " 2>/dev/null");
  CHECK(again.out == r.out);
}

TEST_CASE("k produces ranked alternatives, one record per line") {
  const auto r = run(std::string(kSample) + " | " + parse_cmd() +
                     " --k 2 2>/dev/null");
  REQUIRE(r.code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] != lines[1]);
  CHECK(nlohmann::json::parse(lines[1])["tokens"].size() == 4);
}

TEST_CASE("a tiny phrase budget is flagged in the output") {
  const auto r = run(std::string(kSample) + " | " + parse_cmd() +
                     " --max-phrases 2 2>/dev/null");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(lines_of(r.out)[0]);
  CHECK(j["budget_exceeded"] == true);
}

TEST_CASE("empty input yields no output and a clean exit") {
  const auto r = run("printf '' | " + parse_cmd() + " 2>/dev/null");
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  const auto blank = run("printf '\\n\\n' | " + parse_cmd() + " 2>/dev/null");
  CHECK(blank.code == 0);
  CHECK(blank.out.empty());
}

TEST_CASE("conllu output keeps sentence ids and one-based heads") {
  const auto r = run(std::string(kSample) + " | " + parse_cmd() +
                     " --format conllu 2>/dev/null");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("# text = The man I met\n") != std::string::npos);
  CHECK(r.out.find("1\tThe\t_\t_\tDT\t_\t2\tdep\t_\t_\n") !=
        std::string::npos);
  CHECK(r.out.find("4\tmet\t_\t_\tVBD\t_\t0\tdep\t_\t_\n") !=
        std::string::npos);

  const auto ranked = run(std::string(kSample) + " | " + parse_cmd() +
                          " --format conllu --k 2 2>/dev/null");
  CHECK(ranked.out.find("# sent_id = k2\n") != std::string::npos);
}

TEST_CASE("bracket output matches the projected tree") {
  const auto r = run(std::string(kSample) + " | " + parse_cmd() +
                     " --format brackets 2>/dev/null");
  REQUIRE(r.code == 0);
  CHECK(r.out == std::string(kBracketGold) + "\n");
}

TEST_CASE("conllu files parse sentence by sentence") {
  const auto r = run(parse_cmd() + " --format conllu " + kToy +
                     " 2>/dev/null");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("# sent_id = toy-1\n") != std::string::npos);
  CHECK(r.out.find("# sent_id = toy-2\n") != std::string::npos);
  CHECK(r.out.find("# sent_id = toy-3\n") != std::string::npos);

  const auto gold = run(parse_cmd() + " --gold-tags " + kToy +
                        " 2>/dev/null");
  CHECK(gold.code == 0);
  CHECK(lines_of(gold.out).size() == 3);

  // gold tags need a tag column, which token-line input lacks
  const auto bad = run(std::string(kSample) + " | " + parse_cmd() +
                       " --gold-tags 2>/dev/null");
  CHECK(bad.code == 2);

  const auto missing = run(parse_cmd() + " /nonexistent/input.txt"
                           " 2>/dev/null");
  CHECK(missing.code == 2);
}

TEST_CASE("config files feed defaults that flags override") {
  const std::string config = write_file("sprig_cli.conf",
                                        "# comment\n"
                                        "\n"
                                        "k = 2\n");
  const auto from_config = run(std::string(kSample) + " | " + parse_cmd() +
                               " --config " + config + " 2>/dev/null");
  REQUIRE(from_config.code == 0);
  CHECK(lines_of(from_config.out).size() == 2);

  const auto overridden = run(std::string(kSample) + " | " + parse_cmd() +
                              " --config=" + config + " --k 1 2>/dev/null");
  REQUIRE(overridden.code == 0);
  CHECK(lines_of(overridden.out).size() == 1);
  std::remove(config.c_str());

  const std::string broken = write_file("sprig_bad.conf",
                                        "# comment\n"
                                        "bogus = 1\n");
  const auto err = run(std::string(kSample) + " | " + parse_cmd() +
                       " --config " + broken + " 2>&1 1>/dev/null");
  CHECK(err.code == 2);
  CHECK(err.out.find("config line 2") != std::string::npos);
  std::remove(broken.c_str());
}

TEST_CASE("eval prints the score table and optional json") {
  const std::string base = kBin + " eval " + kToy + " --grammar " + kGrammar +
                           " --closed-class " + kClosed + " --model " +
                           model_path();
  const auto table = run(base + " 2>/dev/null");
  REQUIRE(table.code == 0);
  CHECK(table.out.find("macro UAS 89.47%") != std::string::npos);
  CHECK(table.out.find("micro UAS 89.47%") != std::string::npos);

  const std::string report = temp_path("sprig_report.json");
  const auto filed = run(base + " --json " + report + " 2>/dev/null");
  REQUIRE(filed.code == 0);
  CHECK(filed.out.find("macro UAS") != std::string::npos);  // table stays
  const auto j = nlohmann::json::parse(read_file(report));
  CHECK(j["total_correct"] == 17);
  CHECK(j["total_tokens"] == 19);
  std::remove(report.c_str());

  const auto streamed = run(base + " --json - 2>/dev/null");
  REQUIRE(streamed.code == 0);
  CHECK(streamed.out.find("macro UAS") == std::string::npos);  // no table
  const auto js = nlohmann::json::parse(streamed.out);
  CHECK(js["total_correct"] == 17);
  CHECK(streamed.out.find("seconds") == std::string::npos);

  const auto timed = run(base + " --json - --timing 2>/dev/null");
  CHECK(nlohmann::json::parse(timed.out).contains("seconds"));

  // a missing file is reported per file, the run itself succeeds
  const auto partial = run(kBin + " eval " + kToy + " /nonexistent.conllu" +
                           " --grammar " + kGrammar + " --closed-class " +
                           kClosed + " 2>/dev/null");
  CHECK(partial.code == 0);
  CHECK(partial.out.find("ERROR:") != std::string::npos);
}

TEST_CASE("trace goes to stderr and requires a single worker") {
  const auto out_side = run(std::string(kSample) + " | " + parse_cmd() +
                            " --trace 2>/dev/null");
  REQUIRE(out_side.code == 0);
  CHECK(nlohmann::json::parse(lines_of(out_side.out)[0]).contains("tokens"));

  const auto err_side = run(std::string(kSample) + " | " + parse_cmd() +
                            " --trace 2>&1 1>/dev/null");
  CHECK(err_side.out.find("project rule=") != std::string::npos);
  CHECK(err_side.out.find("chart: n=4") != std::string::npos);

  const auto clash = run(std::string(kSample) + " | " + parse_cmd() +
                         " --trace --jobs 2 2>/dev/null");
  CHECK(clash.code == 2);
}

TEST_CASE("worker count does not change parse output") {
  const auto serial = run(parse_cmd() + " " + kToy + " 2>/dev/null");
  const auto parallel =
      run(parse_cmd() + " " + kToy + " --jobs 4 2>/dev/null");
  REQUIRE(serial.code == 0);
  REQUIRE(parallel.code == 0);
  CHECK(serial.out == parallel.out);
  CHECK(lines_of(serial.out).size() == 3);
}

TEST_CASE("root policy values are validated") {
  const auto ok = run(std::string(kSample) + " | " + parse_cmd() +
                      " --root-policy heaviest --seedless 2>/dev/null");
  CHECK(ok.code == 0);
  const auto bad = run(std::string(kSample) + " | " + parse_cmd() +
                       " --root-policy junk 2>/dev/null");
  CHECK(bad.code == 2);
}
