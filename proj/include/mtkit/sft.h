#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mtkit/language.h"
#include "mtkit/records.h"

namespace mtkit {

enum class SourceTag { CuratedCorpus, DevBenchmark, QualityFilteredWeb, NonEnglishCentric };

const char* to_string(SourceTag t);
SourceTag source_tag_from_string(const std::string& s);

struct SftRecord {
  Direction direction;
  std::string prompt;
  std::string completion;
  SourceTag source_tag = SourceTag::CuratedCorpus;

  std::string to_json_line() const;
};

struct RenderOptions {
  // When true the completion carries a single leading space instead of
  // starting right after the prompt's final colon.
  bool completion_leading_space = false;
};

// Renders the translation instruction:
//   Translate this from {Src} to {Tgt}:\n{Src}: {src_text}\n{Tgt}:
// with the completion holding the target text. Language names come from the
// registry; unknown codes and multi-line texts are errors.
SftRecord render_instruction(const ParallelRecord& pair,
                             const RenderOptions& options = {});

struct ParsedInstruction {
  std::string src_name;
  std::string tgt_name;
  std::string src_text;
};

// Inverse of render_instruction over the prompt. Throws std::invalid_argument
// when the prompt does not match the grammar exactly.
ParsedInstruction parse_instruction(const std::string& prompt);

struct QualityScores {
  double forward = 0.0;
  double reverse = 0.0;
};

// JSONL sidecar {"index","score_fwd","score_rev"} keyed by 0-based record
// index.
std::map<size_t, QualityScores> load_quality_sidecar(const std::string& path);

enum class MissingQuality { Drop, Error };

struct QualityGate {
  double threshold = 0.85;  // kept iff strictly above
  bool bidirectional = true;
  MissingQuality on_missing = MissingQuality::Drop;
};

// Keeps records whose scores clear the gate. `dropped_missing`, when given,
// counts records without a sidecar entry.
std::vector<ParallelRecord> quality_filter(
    const std::vector<ParallelRecord>& pairs,
    const std::map<size_t, QualityScores>& scores, const QualityGate& gate,
    int64_t* dropped_missing = nullptr);

bool passes_quality(const QualityScores& s, const QualityGate& gate);

// Uniformly samples `n_directions` distinct directions with neither side
// English from the registry's direction space, each with quota
// `per_direction`. Fixed seed, fixed result.
std::vector<std::pair<Direction, int64_t>> sample_directions(
    int64_t n_directions = 25, int64_t per_direction = 100, uint64_t seed = 0);

struct SftPlan {
  std::vector<std::pair<Direction, int64_t>> quotas;
  double quality_threshold = 0.85;
  uint64_t seed = 0;

  static SftPlan from_json_file(const std::string& path);
  std::string to_json() const;
};

struct TaggedSource {
  SourceTag tag;
  std::vector<ParallelRecord> records;
  // Optional quality sidecar; when present the plan's threshold gates the
  // records bidirectionally before use.
  std::optional<std::map<size_t, QualityScores>> quality;
};

struct SftComposition {
  std::map<std::string, int64_t> per_source_tag;
  int64_t english_centric = 0;  // src or tgt is en
  int64_t other_directions = 0;
  std::map<std::string, int64_t> per_direction;
  std::map<std::string, int64_t> shortfall_per_direction;  // quota unmet
  int64_t quality_dropped = 0;
  int64_t quality_dropped_missing = 0;

  std::string to_json() const;
};

struct SftDataset {
  std::vector<SftRecord> records;
  SftComposition composition;
};

// Fills each direction quota from the tagged sources in order, rendering
// instructions as it goes. Sources are consulted in the order given;
// unsatisfiable quotas surface in the composition report, not as errors.
SftDataset build_sft(const SftPlan& plan, const std::vector<TaggedSource>& sources,
                     const RenderOptions& options = {});

void write_sft_jsonl(const std::string& path, const std::vector<SftRecord>& records);

}  // namespace mtkit
