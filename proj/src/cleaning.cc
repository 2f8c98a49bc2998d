#include "mtkit/cleaning.h"

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>

#include "mtkit/textnorm.h"
#include "mtkit/util.h"

namespace mtkit {

using nlohmann::json;

const char* to_string(Stage s) {
  switch (s) {
    case Stage::Dedup:
      return "dedup";
    case Stage::Heuristic:
      return "heuristic";
    case Stage::LangId:
      return "langid";
    case Stage::Similarity:
      return "similarity";
  }
  return "?";
}

FilterVerdict heuristic_filter(const ParallelRecord& record,
                               const HeuristicParams& params) {
  const int64_t src_len = static_cast<int64_t>(codepoint_count(record.src_text));
  const int64_t tgt_len = static_cast<int64_t>(codepoint_count(record.tgt_text));
  if (src_len < params.min_chars || tgt_len < params.min_chars)
    return FilterVerdict::drop(Stage::Heuristic,
                               "side shorter than " +
                                   std::to_string(params.min_chars) + " chars");
  if (src_len > params.max_chars || tgt_len > params.max_chars)
    return FilterVerdict::drop(Stage::Heuristic,
                               "side longer than " +
                                   std::to_string(params.max_chars) + " chars");
  const double longer = static_cast<double>(std::max(src_len, tgt_len));
  const double shorter = static_cast<double>(std::min(src_len, tgt_len));
  if (longer / shorter > params.max_char_ratio)
    return FilterVerdict::drop(
        Stage::Heuristic, "char ratio " + std::to_string(src_len) + "/" +
                              std::to_string(tgt_len) + " exceeds " +
                              std::to_string(params.max_char_ratio));
  if (params.reject_copy &&
      normalize_key(record.src_text) == normalize_key(record.tgt_text))
    return FilterVerdict::drop(Stage::Heuristic, "copy");
  return FilterVerdict::keep(Stage::Heuristic);
}

FilterVerdict langid_filter(const ParallelRecord& record,
                            const LangScorer& scorer, double min_confidence) {
  auto [src_pred, src_conf] = scorer.classify(record.src_text);
  if (src_pred != record.src_lang)
    return FilterVerdict::drop(Stage::LangId, "src declared " + record.src_lang +
                                                  " but classified " + src_pred);
  auto [tgt_pred, tgt_conf] = scorer.classify(record.tgt_text);
  if (tgt_pred != record.tgt_lang)
    return FilterVerdict::drop(Stage::LangId, "tgt declared " + record.tgt_lang +
                                                  " but classified " + tgt_pred);
  if (src_conf < min_confidence || tgt_conf < min_confidence)
    return FilterVerdict::drop(
        Stage::LangId, "confidence " + std::to_string(std::min(src_conf, tgt_conf)) +
                           " below " + std::to_string(min_confidence));
  return FilterVerdict::keep(Stage::LangId);
}

FilterVerdict similarity_filter(const ParallelRecord& record,
                                const SimilarityBand& band) {
  if (!record.similarity) {
    if (band.on_missing == MissingSimilarity::Error)
      throw MissingScoreError("record has no similarity score");
    return FilterVerdict::drop(Stage::Similarity, "unscored");
  }
  const double s = *record.similarity;
  if (s < band.min)
    return FilterVerdict::drop(Stage::Similarity,
                               "similarity " + std::to_string(s) + " below " +
                                   std::to_string(band.min));
  if (s > band.max)
    return FilterVerdict::drop(Stage::Similarity,
                               "similarity " + std::to_string(s) + " above " +
                                   std::to_string(band.max));
  return FilterVerdict::keep(Stage::Similarity);
}

Digest128 Deduper::key_of(const ParallelRecord& record) {
  std::string key;
  key.reserve(record.src_text.size() + record.tgt_text.size() + 8);
  key += record.src_lang;
  key += '\x1F';
  key += record.tgt_lang;
  key += '\x1F';
  key += normalize_key(record.src_text);
  key += '\x1F';
  key += normalize_key(record.tgt_text);
  return digest128(key);
}

std::string CleaningReport::to_json(const CleaningConfig& c) const {
  json j;
  j["input_count"] = input_count;
  j["dropped"] = {{"dedup", dedup_dropped},
                  {"heuristic", heuristic_dropped},
                  {"langid", langid_dropped},
                  {"similarity", similarity_dropped}};
  j["output_count"] = output_count;
  j["config"] = {{"min_chars", c.heuristic.min_chars},
                 {"max_chars", c.heuristic.max_chars},
                 {"max_char_ratio", c.heuristic.max_char_ratio},
                 {"reject_copy", c.heuristic.reject_copy},
                 {"min_confidence", c.min_confidence},
                 {"min_similarity", c.similarity.min},
                 {"max_similarity", c.similarity.max},
                 {"on_missing_similarity",
                  c.similarity.on_missing == MissingSimilarity::Error ? "error"
                                                                      : "drop"}};
  return j.dump(2);
}

std::map<size_t, double> load_similarity_sidecar(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open sidecar: " + path);
  std::map<size_t, double> scores;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_trailing_cr(std::move(line));
    if (trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("index") || !j.contains("similarity"))
      throw CorpusError("bad sidecar line " + std::to_string(line_no) + " in " +
                        path);
    scores[j.at("index").get<size_t>()] = j.at("similarity").get<double>();
  }
  return scores;
}

CleaningReport run_pipeline(
    ParallelStream& in, const CleaningConfig& config, const LangScorer* scorer,
    const std::function<void(const ParallelRecord&)>& sink,
    const std::map<size_t, double>* sidecar) {
  CleaningReport report;
  Deduper dedup;
  ParallelRecord record;
  size_t index = 0;
  for (; in.next(record); ++index) {
    ++report.input_count;
    if (sidecar && !record.similarity) {
      auto it = sidecar->find(index);
      if (it != sidecar->end()) record.similarity = it->second;
    }
    if (!dedup.first_sight(record)) {
      ++report.dedup_dropped;
      continue;
    }
    if (!heuristic_filter(record, config.heuristic).kept) {
      ++report.heuristic_dropped;
      continue;
    }
    if (scorer) {
      FilterVerdict v;
      try {
        v = langid_filter(record, *scorer, config.min_confidence);
      } catch (const std::exception& e) {
        throw PipelineError("language scorer failed on record " +
                                std::to_string(index) + ": " + e.what(),
                            Stage::LangId, index, report);
      }
      if (!v.kept) {
        ++report.langid_dropped;
        continue;
      }
    }
    try {
      if (!similarity_filter(record, config.similarity).kept) {
        ++report.similarity_dropped;
        continue;
      }
    } catch (const MissingScoreError& e) {
      throw PipelineError("record " + std::to_string(index) + ": " + e.what(),
                          Stage::Similarity, index, report);
    }
    ++report.output_count;
    sink(record);
  }
  return report;
}

std::pair<std::vector<ParallelRecord>, CleaningReport> run_pipeline(
    const std::vector<ParallelRecord>& records, const CleaningConfig& config,
    const LangScorer* scorer, const std::map<size_t, double>* sidecar) {
  VectorParallelStream stream(records);
  std::vector<ParallelRecord> kept;
  auto report = run_pipeline(
      stream, config, scorer,
      [&kept](const ParallelRecord& r) { kept.push_back(r); }, sidecar);
  return {std::move(kept), report};
}

}  // namespace mtkit
