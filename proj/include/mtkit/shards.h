#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "mtkit/corpus_io.h"
#include "mtkit/mixer.h"
#include "mtkit/records.h"
#include "mtkit/rng.h"
#include "mtkit/tokenizer.h"

namespace mtkit {

class WorkerPool;

// One formatted training text. Pair samples are the two sides joined by a
// single newline, in the order the coin decided.
struct PretrainSample {
  enum class Kind { Mono, Pair };
  Kind kind = Kind::Mono;
  std::string text;
  int64_t token_count = 0;
  std::vector<std::string> langs;

  std::string to_json_line() const;
};

// Joins the pair into one sample, flipping the side order on a fair coin
// (one draw per record). Sides must be single-line; an embedded newline is an
// error because the separator would become ambiguous.
// token_count = src tokens + tgt tokens + separator_cost.
PretrainSample format_pair(const ParallelRecord& record, SeededRng& rng,
                           const Tokenizer& tok, int64_t separator_cost = 0);

// Which parallel pile a pair belongs to from `lang`'s point of view: the
// non-`lang` side must be en (english_centric) or zh (chinese_centric).
// Throws std::invalid_argument for pairs that do not involve `lang`.
std::string pile_for(const ParallelRecord& record, const std::string& lang);

struct MixOptions {
  uint64_t seed = 0;
  int64_t shard_size = 100000;  // samples per shard
  int64_t separator_cost = 0;
  bool gzip = false;
  std::string tokenizer_spec = "whitespace";
};

struct ShardInfo {
  std::string path;  // relative to the output dir
  int64_t samples = 0;
  int64_t tokens = 0;
  std::string sha256;
};

struct MixManifest {
  uint64_t seed = 0;
  std::string tokenizer;
  int64_t shard_size = 0;
  int64_t separator_cost = 0;
  std::string lang;
  std::map<std::string, int64_t> token_totals;  // per source (mono + piles)
  std::map<std::string, int64_t> sample_counts;
  std::map<std::string, int64_t> quota_shortfall;  // plan quota minus actual
  int64_t skipped_other_language = 0;
  std::vector<ShardInfo> shards;

  std::string to_json() const;
  static MixManifest from_json_file(const std::string& path);
};

// Consumes records until the plan's per-source token quotas are met (never
// exceeding them; a source stops at the first record that would overshoot),
// interleaves mono and pair samples under a seeded permutation, and writes
// fixed-size shards plus manifest.json under out_dir. Output bytes are a pure
// function of (inputs, plan, options); pool size never changes them.
MixManifest emit_shards(MonoStream& mono, ParallelStream& pairs,
                        const AllocationPlan& plan, const MixOptions& options,
                        const std::string& out_dir, WorkerPool* pool = nullptr);

// Reads a (possibly gzipped) shard back; used by tests and audits.
std::vector<PretrainSample> read_shard(const std::string& path);

}  // namespace mtkit
