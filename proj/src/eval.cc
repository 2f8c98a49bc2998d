#include "mtkit/eval.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <nlohmann/json.hpp>
#include <thread>

#include "mtkit/corpus_io.h"
#include "mtkit/util.h"
#include "mtkit/worker_pool.h"

namespace mtkit {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string call_with_retries(GenClient& client, const std::string& prompt,
                              const EvalOptions& options) {
  int attempt = 0;
  double delay_ms = options.backoff_initial_ms;
  for (;;) {
    try {
      return client.generate(prompt, options.gen);
    } catch (const std::exception& e) {
      if (++attempt >= options.max_attempts)
        throw std::runtime_error("client failed after " +
                                 std::to_string(attempt) + " attempts: " + e.what());
      if (delay_ms > 0)
        std::this_thread::sleep_for(
            std::chrono::duration<double, std::milli>(delay_ms));
      delay_ms *= options.backoff_factor;
    }
  }
}

DirectionReport eval_direction(const EvalTask& task, GenClient& client,
                               const EvalOptions& options, const Tokenizer& tok) {
  DirectionReport report;
  report.direction = task.direction;
  report.n_sentences = static_cast<int64_t>(task.test_pairs.size());

  std::ofstream transcript;
  if (!options.transcript_dir.empty()) {
    fs::create_directories(options.transcript_dir);
    auto path = fs::path(options.transcript_dir) /
                ("transcript-" + task.direction.str() + ".jsonl");
    transcript.open(path, std::ios::binary);
    if (!transcript)
      throw std::runtime_error("cannot write transcript: " + path.string());
  }

  // The exemplar seed mixes in the direction so every test sentence of this
  // direction sees the same prefix, independent of other directions.
  auto exemplars = select_exemplars(
      task.dev_pairs, options.shots,
      SeededRng::derive(options.seed, task.direction.str()).next());

  std::vector<std::string> hyps, refs;
  hyps.reserve(task.test_pairs.size());
  refs.reserve(task.test_pairs.size());
  for (const auto& [src, ref] : task.test_pairs) {
    IclPrompt prompt = build_icl_prompt(exemplars, src);
    std::string completion;
    try {
      completion = call_with_retries(client, prompt.rendered, options);
    } catch (const std::exception& e) {
      report.failed = true;
      report.failure = e.what();
      break;
    }
    std::string extracted = extract_translation(completion);
    if (extracted.empty()) ++report.empty_translations;
    if (transcript.is_open()) {
      json line = {{"prompt", prompt.rendered},
                   {"completion", completion},
                   {"extracted", extracted},
                   {"ref", ref}};
      transcript << line.dump() << '\n';
    }
    hyps.push_back(std::move(extracted));
    refs.push_back(ref);
  }

  if (!report.failed && !hyps.empty())
    report.bleu = corpus_bleu(hyps, refs, tok, options.bleu).score;
  return report;
}

}  // namespace

std::vector<DirectionReport> run_eval(const std::vector<EvalTask>& tasks,
                                      GenClient& client, const EvalOptions& options,
                                      WorkerPool* pool) {
  auto tok = make_tokenizer(options.tokenizer_spec);
  std::vector<DirectionReport> reports(tasks.size());

  if (pool) {
    std::vector<std::future<void>> done;
    done.reserve(tasks.size());
    for (size_t i = 0; i < tasks.size(); ++i)
      done.push_back(pool->submit([&, i] {
        reports[i] = eval_direction(tasks[i], client, options, *tok);
      }));
    for (auto& f : done) f.get();
  } else {
    for (size_t i = 0; i < tasks.size(); ++i)
      reports[i] = eval_direction(tasks[i], client, options, *tok);
  }

  std::sort(reports.begin(), reports.end(),
            [](const DirectionReport& a, const DirectionReport& b) {
              return a.direction < b.direction;
            });
  return reports;
}

std::vector<EvalTask> make_eval_tasks(const std::vector<ParallelRecord>& test,
                                      const std::vector<ParallelRecord>& dev) {
  std::map<Direction, EvalTask> by_dir;
  for (const auto& r : test) {
    Direction d(r.src_lang, r.tgt_lang);
    auto& task = by_dir[d];
    task.direction = d;
    task.test_pairs.emplace_back(r.src_text, r.tgt_text);
  }
  for (const auto& r : dev) {
    Direction d(r.src_lang, r.tgt_lang);
    auto it = by_dir.find(d);
    if (it != by_dir.end()) it->second.dev_pairs.emplace_back(r.src_text, r.tgt_text);
  }
  std::vector<EvalTask> tasks;
  tasks.reserve(by_dir.size());
  for (auto& [d, task] : by_dir) tasks.push_back(std::move(task));
  return tasks;
}

void save_reports(const std::string& path,
                  const std::vector<DirectionReport>& reports) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write reports: " + path);
  for (const auto& r : reports) {
    json j = {{"direction", r.direction.str()},
              {"bleu", r.bleu},
              {"n_sentences", r.n_sentences},
              {"empty_translations", r.empty_translations},
              {"failed", r.failed}};
    if (!r.failure.empty()) j["failure"] = r.failure;
    if (!r.external.empty()) j["external"] = r.external;
    out << j.dump() << '\n';
  }
}

std::vector<DirectionReport> load_reports(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open reports: " + path);
  std::vector<DirectionReport> reports;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_trailing_cr(std::move(line));
    if (trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw std::runtime_error("bad report line " + std::to_string(line_no) +
                               " in " + path);
    DirectionReport r;
    r.direction = Direction::parse(j.at("direction").get<std::string>());
    r.bleu = j.at("bleu").get<double>();
    r.n_sentences = j.value("n_sentences", int64_t{0});
    r.empty_translations = j.value("empty_translations", int64_t{0});
    r.failed = j.value("failed", false);
    r.failure = j.value("failure", std::string());
    if (j.contains("external"))
      r.external = j.at("external").get<std::map<std::string, double>>();
    reports.push_back(std::move(r));
  }
  return reports;
}

void apply_metric_sidecar(const std::string& path,
                          std::vector<DirectionReport>& reports) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open metric sidecar: " + path);
  std::map<std::string, std::map<std::string, double>> by_dir;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_trailing_cr(std::move(line));
    if (trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("direction") || !j.contains("metric") ||
        !j.contains("value"))
      throw std::runtime_error("bad metric sidecar line " +
                               std::to_string(line_no) + " in " + path);
    by_dir[j.at("direction").get<std::string>()]
          [j.at("metric").get<std::string>()] = j.at("value").get<double>();
  }
  for (auto& r : reports) {
    auto it = by_dir.find(r.direction.str());
    if (it == by_dir.end()) continue;
    for (const auto& [metric, value] : it->second) r.external[metric] = value;
  }
}

namespace {

struct GroupAcc {
  int64_t n = 0;
  std::map<std::string, std::pair<double, int64_t>> sums;  // metric -> (sum, n)

  void add(const DirectionReport& r) {
    ++n;
    auto& bleu = sums["bleu"];
    bleu.first += r.bleu;
    ++bleu.second;
    for (const auto& [metric, value] : r.external) {
      auto& acc = sums[metric];
      acc.first += value;
      ++acc.second;
    }
  }

  GroupStat stat() const {
    GroupStat s;
    s.n = n;
    for (const auto& [metric, sum_n] : sums)
      if (sum_n.second > 0) s.means[metric] = sum_n.first / static_cast<double>(sum_n.second);
    return s;
  }
};

json stat_to_json(const GroupStat& s) {
  return {{"n", s.n}, {"means", s.means}};
}

}  // namespace

AggregateSummary aggregate(const std::vector<DirectionReport>& reports) {
  AggregateSummary out;
  std::map<std::string, GroupAcc> groups;
  std::map<std::string, GroupAcc> into;
  std::map<std::string, GroupAcc> out_of;

  for (const auto& r : reports) {
    if (r.failed) {
      out.notes.push_back("skipped failed direction " + r.direction.str());
      continue;
    }
    if (r.direction.src == "en") groups["en-xx"].add(r);
    if (r.direction.tgt == "en") groups["xx-en"].add(r);
    if (r.direction.src == "zh") groups["zh-xx"].add(r);
    if (r.direction.tgt == "zh") groups["xx-zh"].add(r);
    into[to_string(language(r.direction.tgt).resource_class)].add(r);
    out_of[to_string(language(r.direction.src).resource_class)].add(r);
  }

  for (const char* name : {"en-xx", "xx-en", "zh-xx", "xx-zh"}) {
    auto it = groups.find(name);
    if (it == groups.end())
      out.notes.push_back(std::string("group ") + name + " is empty; omitted");
    else
      out.direction_groups[name] = it->second.stat();
  }
  for (const char* cls : {"high", "mid", "low"}) {
    auto i = into.find(cls);
    if (i != into.end()) out.resource_into[cls] = i->second.stat();
    auto o = out_of.find(cls);
    if (o != out_of.end()) out.resource_out_of[cls] = o->second.stat();
    if (i == into.end() && o == out_of.end())
      out.notes.push_back(std::string("resource class ") + cls + " is empty; omitted");
  }
  return out;
}

std::string AggregateSummary::to_json() const {
  json j;
  for (const auto& [name, stat] : direction_groups)
    j["direction_groups"][name] = stat_to_json(stat);
  for (const auto& [name, stat] : resource_into)
    j["resource_classes"]["into"][name] = stat_to_json(stat);
  for (const auto& [name, stat] : resource_out_of)
    j["resource_classes"]["out_of"][name] = stat_to_json(stat);
  j["notes"] = notes;
  return j.dump(2);
}

}  // namespace mtkit
