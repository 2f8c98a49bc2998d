#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mtkit/bleu.h"
#include "mtkit/gen_client.h"
#include "mtkit/icl.h"
#include "mtkit/language.h"
#include "mtkit/records.h"

namespace mtkit {

class WorkerPool;

struct DirectionReport {
  Direction direction;
  double bleu = 0.0;
  std::map<std::string, double> external;  // comet/xcomet/cometkiwi etc.
  int64_t n_sentences = 0;
  int64_t empty_translations = 0;
  bool failed = false;
  std::string failure;
};

struct EvalTask {
  Direction direction;
  std::vector<ExemplarPair> test_pairs;  // (source, reference)
  std::vector<ExemplarPair> dev_pairs;   // exemplar pool
};

struct EvalOptions {
  size_t shots = 5;
  uint64_t seed = 0;
  int max_attempts = 3;
  int backoff_initial_ms = 200;
  double backoff_factor = 2.0;
  GenParams gen;
  std::string transcript_dir;  // empty disables persistence
  std::string tokenizer_spec = "whitespace";
  BleuOptions bleu;
};

// Full in-context pipeline per direction: pick exemplars (seed derived from
// the direction, so one direction's pool never shifts another's), render the
// prompt per test sentence, call the client with retries and exponential
// backoff, extract the first line, then score the direction. A direction
// whose client calls exhaust their retries is marked failed and the run
// continues. Reports come back sorted by direction regardless of completion
// order.
std::vector<DirectionReport> run_eval(const std::vector<EvalTask>& tasks,
                                      GenClient& client, const EvalOptions& options,
                                      WorkerPool* pool = nullptr);

// Groups parallel records into per-direction eval tasks, pairing each test
// direction with dev records of the same direction.
std::vector<EvalTask> make_eval_tasks(const std::vector<ParallelRecord>& test,
                                      const std::vector<ParallelRecord>& dev);

void save_reports(const std::string& path, const std::vector<DirectionReport>& reports);
std::vector<DirectionReport> load_reports(const std::string& path);

// External-metric sidecar: JSONL {"direction","metric","value"}; values are
// attached to matching reports (never computed here).
void apply_metric_sidecar(const std::string& path,
                          std::vector<DirectionReport>& reports);

struct GroupStat {
  int64_t n = 0;
  std::map<std::string, double> means;  // "bleu" plus any external metrics
};

struct AggregateSummary {
  // Pivot groups en->xx, xx->en, zh->xx, xx->zh.
  std::map<std::string, GroupStat> direction_groups;
  // Resource classes, split by whether the classed language is the target
  // (into) or the source (out_of).
  std::map<std::string, GroupStat> resource_into;
  std::map<std::string, GroupStat> resource_out_of;
  std::vector<std::string> notes;  // omitted empty groups, skipped failures

  std::string to_json() const;
};

// Unweighted arithmetic means per group. Failed directions are skipped with
// a note; empty groups are omitted with a note.
AggregateSummary aggregate(const std::vector<DirectionReport>& reports);

}  // namespace mtkit
