#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "mtkit/corpus_io.h"
#include "mtkit/digest.h"
#include "mtkit/records.h"

namespace mtkit {

enum class Stage { Dedup, Heuristic, LangId, Similarity };

const char* to_string(Stage s);

struct FilterVerdict {
  bool kept = true;
  Stage stage = Stage::Heuristic;
  std::string reason;  // non-empty whenever kept == false

  static FilterVerdict keep(Stage s) { return {true, s, ""}; }
  static FilterVerdict drop(Stage s, std::string why) {
    return {false, s, std::move(why)};
  }
};

struct HeuristicParams {
  int64_t min_chars = 1;
  int64_t max_chars = 4096;
  double max_char_ratio = 9.0;
  bool reject_copy = true;
};

// Length, length-ratio and copy checks on one pair. Lengths are codepoint
// counts of the raw text; the copy check compares normalized keys.
FilterVerdict heuristic_filter(const ParallelRecord& record,
                               const HeuristicParams& params);

// Pluggable language identifier. classify must be deterministic for a fixed
// text and return a confidence in [0, 1].
class LangScorer {
 public:
  virtual ~LangScorer() = default;
  virtual std::pair<std::string, double> classify(std::string_view text) const = 0;
};

// Built-in fallback: character n-gram (n = 1..3) multinomial scorer over a
// bundled seed profile per registry language. Good enough to run the
// pipeline self-contained; production setups plug in an external classifier.
class NgramLangScorer : public LangScorer {
 public:
  NgramLangScorer();
  std::pair<std::string, double> classify(std::string_view text) const override;

 private:
  struct Profile;
  std::shared_ptr<const std::vector<Profile>> profiles_;
};

// Kept iff both sides classify to their declared languages with confidence
// >= min_confidence (inclusive bound).
FilterVerdict langid_filter(const ParallelRecord& record,
                            const LangScorer& scorer, double min_confidence);

enum class MissingSimilarity { Error, Drop };

struct SimilarityBand {
  double min = 0.75;
  double max = 0.99;  // both ends inclusive
  MissingSimilarity on_missing = MissingSimilarity::Error;
};

// Thrown when a record has no similarity score and the policy is Error.
struct MissingScoreError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

FilterVerdict similarity_filter(const ParallelRecord& record,
                                const SimilarityBand& band);

// Streaming exact dedup. Keeps the first occurrence of each key; the key is
// (src_lang, tgt_lang, normalize_key(src_text), normalize_key(tgt_text)),
// direction-sensitive. State is one 128-bit digest per distinct key.
class Deduper {
 public:
  static Digest128 key_of(const ParallelRecord& record);

  // Returns true (and records the key) on first sight, false on a duplicate.
  bool first_sight(const ParallelRecord& record) {
    return seen_.insert(key_of(record)).second;
  }

  size_t distinct_keys() const { return seen_.size(); }

 private:
  std::unordered_set<Digest128, Digest128Hash> seen_;
};

struct CleaningConfig {
  HeuristicParams heuristic;
  double min_confidence = 0.5;
  SimilarityBand similarity;
};

struct CleaningReport {
  int64_t input_count = 0;
  int64_t dedup_dropped = 0;
  int64_t heuristic_dropped = 0;
  int64_t langid_dropped = 0;
  int64_t similarity_dropped = 0;
  int64_t output_count = 0;

  int64_t total_dropped() const {
    return dedup_dropped + heuristic_dropped + langid_dropped +
           similarity_dropped;
  }
  std::string to_json(const CleaningConfig& config_echo) const;
};

// A stage failure; carries the accounting up to the failing record.
struct PipelineError : std::runtime_error {
  PipelineError(const std::string& what, Stage stage, size_t record_index,
                CleaningReport partial)
      : std::runtime_error(what),
        stage(stage),
        record_index(record_index),
        partial(partial) {}
  Stage stage;
  size_t record_index;
  CleaningReport partial;
};

// Loads a JSONL sidecar of {"index": int, "similarity": real} entries keyed
// by 0-based input record index.
std::map<size_t, double> load_similarity_sidecar(const std::string& path);

// Runs the Dedup -> Heuristic -> LangId -> Similarity cascade over `in`,
// passing survivors to `sink` in input order. A null scorer skips the LangId
// stage. Sidecar scores fill in records whose similarity is absent.
CleaningReport run_pipeline(
    ParallelStream& in, const CleaningConfig& config, const LangScorer* scorer,
    const std::function<void(const ParallelRecord&)>& sink,
    const std::map<size_t, double>* sidecar = nullptr);

// Vector convenience for tests and small corpora.
std::pair<std::vector<ParallelRecord>, CleaningReport> run_pipeline(
    const std::vector<ParallelRecord>& records, const CleaningConfig& config,
    const LangScorer* scorer,
    const std::map<size_t, double>* sidecar = nullptr);

}  // namespace mtkit
