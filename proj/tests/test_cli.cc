#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "mtkit/corpus_io.h"
#include "mtkit/mixer.h"
#include "mtkit/shards.h"

using namespace mtkit;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code;
  std::string out;
  std::string err;
};

fs::path fresh_dir(const char* name) {
  auto dir = fs::temp_directory_path() / "mtkit_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void spit(const fs::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  out << body;
}

RunResult run_cli(const std::string& args) {
  auto dir = fs::temp_directory_path() / "mtkit_tests";
  fs::create_directories(dir);
  auto out_path = dir / "cli_stdout.txt";
  auto err_path = dir / "cli_stderr.txt";
  std::string cmd = std::string(MTKIT_BIN_PATH) + " " + args + " >" +
                    out_path.string() + " 2>" + err_path.string();
  int status = std::system(cmd.c_str());
  int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, slurp(out_path), slurp(err_path)};
}

}  // namespace

TEST_CASE("--help exits zero with usage") {
  auto r = run_cli("--help");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("clean") != std::string::npos);
  CHECK(r.out.find("score") != std::string::npos);
}

TEST_CASE("a missing required flag names the flag and exits 1") {
  auto r = run_cli("clean --out /tmp/x.jsonl --report /tmp/r.json");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("--in") != std::string::npos);
}

TEST_CASE("an unknown flag prints usage guidance and exits 1") {
  auto r = run_cli("plan --bogus 3");
  CHECK(r.exit_code == 1);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("an unknown subcommand exits 1") {
  auto r = run_cli("frobnicate");
  CHECK(r.exit_code == 1);
}

TEST_CASE("plan parses the ratio strategy grammar and echoes config") {
  auto dir = fresh_dir("cli_plan");
  std::vector<Availability> avails(1);
  avails[0].lang = "de";
  avails[0].mono_tokens = 10000;
  avails[0].parallel_tokens[kPileEnglishCentric] = 10000;
  avails[0].parallel_tokens[kPileChineseCentric] = 10000;
  save_availability((dir / "avail.json").string(), avails);

  auto out = dir / "plan.json";
  auto r = run_cli("plan --avail " + (dir / "avail.json").string() +
                   " --budget 3000 --strategy ratio:2:1 --out " + out.string());
  REQUIRE(r.exit_code == 0);
  auto plans = load_plans(out.string());
  REQUIRE(plans.size() == 1);
  CHECK(plans[0].alloc_mono == 2000);
  CHECK(plans[0].alloc_parallel.at(kPileEnglishCentric) +
            plans[0].alloc_parallel.at(kPileChineseCentric) ==
        1000);

  auto echo = json::parse(slurp(out.string() + ".config.json"));
  CHECK(echo.at("subcommand") == "plan");
  CHECK(echo.at("strategy") == "ratio:2:1");
  CHECK(echo.at("budget") == 3000);
}

TEST_CASE("an invalid strategy exits 1") {
  auto dir = fresh_dir("cli_badstrat");
  std::vector<Availability> avails(1);
  avails[0].lang = "de";
  save_availability((dir / "avail.json").string(), avails);
  auto r = run_cli("plan --avail " + (dir / "avail.json").string() +
                   " --strategy sideways --out " + (dir / "p.json").string());
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("sideways") != std::string::npos);
}

TEST_CASE("config file values merge under explicit flags") {
  auto dir = fresh_dir("cli_config");
  std::vector<Availability> avails(1);
  avails[0].lang = "de";
  avails[0].mono_tokens = 100000;
  avails[0].parallel_tokens[kPileEnglishCentric] = 100000;
  save_availability((dir / "avail.json").string(), avails);
  spit(dir / "config.json", R"({"plan": {"budget": 900, "strategy": "mono"}})");

  // budget comes from the config; strategy is overridden on the command line
  auto out = dir / "plan.json";
  auto r = run_cli("plan --config " + (dir / "config.json").string() +
                   " --avail " + (dir / "avail.json").string() +
                   " --strategy parallel --out " + out.string());
  REQUIRE(r.exit_code == 0);
  auto plans = load_plans(out.string());
  CHECK(plans[0].budget == 900);
  CHECK(plans[0].alloc_mono == 0);            // parallel strategy won
  CHECK(plans[0].parallel_total() == 900);
}

TEST_CASE("clean runs end to end over tsv with a sidecar") {
  auto dir = fresh_dir("cli_clean");
  spit(dir / "pairs.tsv",
       "en\tde\tgood morning friends\tguten morgen freunde\n"
       "en\tde\tgood morning friends\tguten morgen freunde\n"
       "en\tde\tso long\tbis bald mein freund\n");
  spit(dir / "sims.jsonl",
       R"({"index":0,"similarity":0.9})" "\n"
       R"({"index":2,"similarity":0.5})" "\n");

  auto r = run_cli("clean --in " + (dir / "pairs.tsv").string() +
                   " --format tsv --sim-sidecar " + (dir / "sims.jsonl").string() +
                   " --no-langid --out " + (dir / "kept.jsonl").string() +
                   " --report " + (dir / "report.json").string());
  REQUIRE(r.exit_code == 0);

  auto report = json::parse(slurp(dir / "report.json"));
  CHECK(report.at("input_count") == 3);
  CHECK(report.at("dropped").at("dedup") == 1);
  CHECK(report.at("dropped").at("similarity") == 1);
  CHECK(report.at("output_count") == 1);

  auto kept_stream = open_parallel((dir / "kept.jsonl").string(),
                                   CorpusFormat::Jsonl, nullptr);
  auto kept = read_all(*kept_stream);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].similarity == 0.9);
}

TEST_CASE("score reports 100 for identical files") {
  auto dir = fresh_dir("cli_score");
  spit(dir / "hyps.txt", "the cat sat on the mat\nhello there my friend\n");
  spit(dir / "refs.txt", "the cat sat on the mat\nhello there my friend\n");
  auto r = run_cli("score --hyps " + (dir / "hyps.txt").string() + " --refs " +
                   (dir / "refs.txt").string());
  REQUIRE(r.exit_code == 0);
  auto j = json::parse(r.out);
  CHECK(j.at("score") == 100.0);
}

TEST_CASE("mix writes shards, a manifest, and a config echo") {
  auto dir = fresh_dir("cli_mix");
  std::vector<AllocationPlan> plans(1);
  plans[0].lang = "de";
  plans[0].budget = 60;
  plans[0].alloc_mono = 30;
  plans[0].alloc_parallel[kPileEnglishCentric] = 30;
  plans[0].shortfall = 0;
  save_plans((dir / "plan.json").string(), plans);

  std::string mono_body, pairs_body;
  for (int i = 0; i < 10; ++i) {
    mono_body += json({{"lang", "de"}, {"text", "ein satz " + std::to_string(i)}}).dump() + "\n";
    pairs_body += json({{"src_lang", "en"},
                        {"tgt_lang", "de"},
                        {"src_text", "line " + std::to_string(i)},
                        {"tgt_text", "zeile " + std::to_string(i)}})
                      .dump() +
                  "\n";
  }
  spit(dir / "mono.jsonl", mono_body);
  spit(dir / "pairs.jsonl", pairs_body);

  auto out_dir = dir / "out";
  auto r = run_cli("mix --plan " + (dir / "plan.json").string() + " --mono " +
                   (dir / "mono.jsonl").string() + " --pairs " +
                   (dir / "pairs.jsonl").string() + " --seed 5 --shard-size 4 --out " +
                   out_dir.string());
  REQUIRE(r.exit_code == 0);
  CHECK(fs::exists(out_dir / "manifest.json"));
  CHECK(fs::exists(out_dir / "config.json"));
  auto manifest = MixManifest::from_json_file((out_dir / "manifest.json").string());
  CHECK(manifest.seed == 5);
  CHECK(!manifest.shards.empty());
  auto echo = json::parse(slurp(out_dir / "config.json"));
  CHECK(echo.at("seed") == 5);
}

TEST_CASE("build-sft, make-prompts and report run end to end") {
  auto dir = fresh_dir("cli_sft");

  // build-sft
  spit(dir / "sft_plan.json",
       R"({"seed": 3, "quality_threshold": 0.85,
           "quotas": [{"src": "en", "tgt": "de", "count": 2}]})");
  std::string source_body;
  for (int i = 0; i < 3; ++i)
    source_body += json({{"src_lang", "en"},
                         {"tgt_lang", "de"},
                         {"src_text", "hello " + std::to_string(i)},
                         {"tgt_text", "hallo " + std::to_string(i)}})
                       .dump() +
                   "\n";
  spit(dir / "curated.jsonl", source_body);
  auto r = run_cli("build-sft --plan " + (dir / "sft_plan.json").string() +
                   " --sources curated:" + (dir / "curated.jsonl").string() +
                   " --out " + (dir / "sft.jsonl").string() + " --report " +
                   (dir / "sft_report.json").string());
  REQUIRE(r.exit_code == 0);
  auto sft_report = json::parse(slurp(dir / "sft_report.json"));
  CHECK(sft_report.at("english_centric") == 2);

  // make-prompts over a small test/dev split
  std::string test_body, dev_body;
  for (int i = 0; i < 3; ++i)
    test_body += json({{"src_lang", "en"},
                       {"tgt_lang", "de"},
                       {"src_text", "query " + std::to_string(i)},
                       {"tgt_text", "ref " + std::to_string(i)}})
                     .dump() +
                 "\n";
  for (int i = 0; i < 6; ++i)
    dev_body += json({{"src_lang", "en"},
                      {"tgt_lang", "de"},
                      {"src_text", "x" + std::to_string(i)},
                      {"tgt_text", "y" + std::to_string(i)}})
                    .dump() +
                "\n";
  spit(dir / "test.jsonl", test_body);
  spit(dir / "dev.jsonl", dev_body);
  r = run_cli("make-prompts --test " + (dir / "test.jsonl").string() + " --dev " +
              (dir / "dev.jsonl").string() + " --k 2 --seed 4 --out " +
              (dir / "prompts.jsonl").string());
  REQUIRE(r.exit_code == 0);
  {
    std::ifstream in(dir / "prompts.jsonl");
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
      auto j = json::parse(line);
      auto prompt = j.at("prompt").get<std::string>();
      CHECK(std::count(prompt.begin(), prompt.end(), '\n') == 2);  // k lines + query
      CHECK(prompt.back() == '=');
      ++lines;
    }
    CHECK(lines == 3);
  }

  // report over a reports file
  spit(dir / "reports.jsonl",
       R"({"direction":"en-de","bleu":40.0,"n_sentences":3})" "\n"
       R"({"direction":"de-en","bleu":50.0,"n_sentences":3})" "\n");
  r = run_cli("report --in " + (dir / "reports.jsonl").string() + " --out " +
              (dir / "summary.json").string());
  REQUIRE(r.exit_code == 0);
  auto summary = json::parse(slurp(dir / "summary.json"));
  CHECK(summary.at("direction_groups").at("en-xx").at("means").at("bleu") == 40.0);
  CHECK(summary.at("direction_groups").at("xx-en").at("means").at("bleu") == 50.0);

  // directory mode picks up every *reports.jsonl under --in
  auto report_dir = dir / "rundir";
  fs::create_directories(report_dir);
  spit(report_dir / "a.reports.jsonl",
       R"({"direction":"en-de","bleu":10.0,"n_sentences":1})" "\n");
  spit(report_dir / "b.reports.jsonl",
       R"({"direction":"en-fr","bleu":30.0,"n_sentences":1})" "\n");
  r = run_cli("report --in " + report_dir.string() + " --out " +
              (dir / "summary2.json").string());
  REQUIRE(r.exit_code == 0);
  auto summary2 = json::parse(slurp(dir / "summary2.json"));
  CHECK(summary2.at("direction_groups").at("en-xx").at("means").at("bleu") == 20.0);
  CHECK(summary2.at("direction_groups").at("en-xx").at("n") == 2);
}

TEST_CASE("runtime failures exit 2") {
  auto r = run_cli("report --in /nonexistent/nowhere.jsonl --out /tmp/s.json");
  CHECK(r.exit_code == 2);
}
