#include "mtkit/sft.h"

#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "mtkit/corpus_io.h"
#include "mtkit/rng.h"
#include "mtkit/util.h"

namespace mtkit {

using nlohmann::json;

const char* to_string(SourceTag t) {
  switch (t) {
    case SourceTag::CuratedCorpus:
      return "curated_corpus";
    case SourceTag::DevBenchmark:
      return "dev_benchmark";
    case SourceTag::QualityFilteredWeb:
      return "quality_filtered_web";
    case SourceTag::NonEnglishCentric:
      return "non_english_centric";
  }
  return "?";
}

SourceTag source_tag_from_string(const std::string& s) {
  if (s == "curated_corpus" || s == "curated") return SourceTag::CuratedCorpus;
  if (s == "dev_benchmark" || s == "dev") return SourceTag::DevBenchmark;
  if (s == "quality_filtered_web" || s == "web")
    return SourceTag::QualityFilteredWeb;
  if (s == "non_english_centric" || s == "noneng")
    return SourceTag::NonEnglishCentric;
  throw std::invalid_argument("unknown source tag: " + s);
}

std::string SftRecord::to_json_line() const {
  json j;
  j["prompt"] = prompt;
  j["completion"] = completion;
  j["src_lang"] = direction.src;
  j["tgt_lang"] = direction.tgt;
  j["source_tag"] = to_string(source_tag);
  return j.dump();
}

SftRecord render_instruction(const ParallelRecord& pair,
                             const RenderOptions& options) {
  const auto& src = language(pair.src_lang);  // throws on unknown codes
  const auto& tgt = language(pair.tgt_lang);
  if (pair.src_text.find('\n') != std::string::npos ||
      pair.tgt_text.find('\n') != std::string::npos)
    throw std::invalid_argument("instruction texts must be single-line");
  if (trim(pair.tgt_text).empty())
    throw std::invalid_argument("completion must be non-empty");

  SftRecord r;
  r.direction = Direction(pair.src_lang, pair.tgt_lang);
  r.prompt = "Translate this from " + src.name + " to " + tgt.name + ":\n" +
             src.name + ": " + pair.src_text + "\n" + tgt.name + ":";
  r.completion =
      options.completion_leading_space ? " " + pair.tgt_text : pair.tgt_text;
  return r;
}

ParsedInstruction parse_instruction(const std::string& prompt) {
  const auto fail = [&](const char* why) {
    throw std::invalid_argument(std::string("prompt does not match template (") +
                                why + ")");
  };
  auto lines = split(prompt, '\n');
  if (lines.size() != 3) fail("expected exactly 3 lines");

  constexpr std::string_view head = "Translate this from ";
  std::string_view l0 = lines[0];
  if (l0.substr(0, head.size()) != head) fail("bad header");
  if (l0.empty() || l0.back() != ':') fail("header must end with ':'");
  l0 = l0.substr(head.size(), l0.size() - head.size() - 1);
  auto sep = l0.find(" to ");
  if (sep == std::string_view::npos) fail("missing ' to '");
  ParsedInstruction out;
  out.src_name = std::string(l0.substr(0, sep));
  out.tgt_name = std::string(l0.substr(sep + 4));
  if (out.src_name.empty() || out.tgt_name.empty()) fail("empty language name");

  const std::string src_prefix = out.src_name + ": ";
  std::string_view l1 = lines[1];
  if (l1.substr(0, src_prefix.size()) != src_prefix) fail("bad source line");
  out.src_text = std::string(l1.substr(src_prefix.size()));

  if (std::string(lines[2]) != out.tgt_name + ":") fail("bad final line");
  return out;
}

std::map<size_t, QualityScores> load_quality_sidecar(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open quality sidecar: " + path);
  std::map<size_t, QualityScores> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_trailing_cr(std::move(line));
    if (trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("index") || !j.contains("score_fwd") ||
        !j.contains("score_rev"))
      throw CorpusError("bad quality sidecar line " + std::to_string(line_no) +
                        " in " + path);
    out[j.at("index").get<size_t>()] = {j.at("score_fwd").get<double>(),
                                        j.at("score_rev").get<double>()};
  }
  return out;
}

bool passes_quality(const QualityScores& s, const QualityGate& gate) {
  // "above" is strict: a score exactly at the threshold is dropped.
  if (gate.bidirectional)
    return s.forward > gate.threshold && s.reverse > gate.threshold;
  return s.forward > gate.threshold;
}

std::vector<ParallelRecord> quality_filter(
    const std::vector<ParallelRecord>& pairs,
    const std::map<size_t, QualityScores>& scores, const QualityGate& gate,
    int64_t* dropped_missing) {
  std::vector<ParallelRecord> kept;
  for (size_t i = 0; i < pairs.size(); ++i) {
    auto it = scores.find(i);
    if (it == scores.end()) {
      if (gate.on_missing == MissingQuality::Error)
        throw std::runtime_error("record " + std::to_string(i) +
                                 " has no quality score");
      if (dropped_missing) ++*dropped_missing;
      continue;
    }
    if (passes_quality(it->second, gate)) kept.push_back(pairs[i]);
  }
  return kept;
}

std::vector<std::pair<Direction, int64_t>> sample_directions(
    int64_t n_directions, int64_t per_direction, uint64_t seed) {
  std::vector<Direction> space;
  for (const auto& a : load_registry()) {
    if (a.iso_code == "en") continue;
    for (const auto& b : load_registry()) {
      if (b.iso_code == "en" || b.iso_code == a.iso_code) continue;
      space.emplace_back(a.iso_code, b.iso_code);
    }
  }
  if (n_directions < 0 || n_directions > static_cast<int64_t>(space.size()))
    throw std::invalid_argument("n_directions out of range (space has " +
                                std::to_string(space.size()) + ")");
  SeededRng rng = SeededRng::derive(seed, "sft-directions");
  // Partial Fisher-Yates: the first n_directions slots are a uniform sample
  // without replacement.
  std::vector<std::pair<Direction, int64_t>> out;
  out.reserve(static_cast<size_t>(n_directions));
  for (int64_t i = 0; i < n_directions; ++i) {
    size_t j = static_cast<size_t>(i) +
               static_cast<size_t>(rng.bounded(space.size() - static_cast<size_t>(i)));
    std::swap(space[static_cast<size_t>(i)], space[j]);
    out.emplace_back(space[static_cast<size_t>(i)], per_direction);
  }
  return out;
}

SftPlan SftPlan::from_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open sft plan: " + path);
  json j;
  in >> j;
  SftPlan plan;
  plan.quality_threshold = j.value("quality_threshold", 0.85);
  if (plan.quality_threshold < 0.0 || plan.quality_threshold > 1.0)
    throw std::invalid_argument("quality_threshold must be in [0,1]");
  plan.seed = j.value("seed", 0ull);
  for (const auto& q : j.at("quotas")) {
    int64_t count = q.at("count").get<int64_t>();
    if (count < 0) throw std::invalid_argument("quota counts must be >= 0");
    plan.quotas.emplace_back(
        Direction(q.at("src").get<std::string>(), q.at("tgt").get<std::string>()),
        count);
  }
  return plan;
}

std::string SftPlan::to_json() const {
  json j;
  j["quality_threshold"] = quality_threshold;
  j["seed"] = seed;
  auto& arr = j["quotas"] = json::array();
  for (const auto& [dir, count] : quotas)
    arr.push_back({{"src", dir.src}, {"tgt", dir.tgt}, {"count", count}});
  return j.dump(2);
}

std::string SftComposition::to_json() const {
  json j;
  j["per_source_tag"] = per_source_tag;
  j["english_centric"] = english_centric;
  j["other_directions"] = other_directions;
  j["per_direction"] = per_direction;
  j["shortfall_per_direction"] = shortfall_per_direction;
  j["quality_dropped"] = quality_dropped;
  j["quality_dropped_missing"] = quality_dropped_missing;
  return j.dump(2);
}

SftDataset build_sft(const SftPlan& plan, const std::vector<TaggedSource>& sources,
                     const RenderOptions& options) {
  SftDataset out;
  QualityGate gate{plan.quality_threshold, true, MissingQuality::Drop};

  // Gate each source once, keeping provenance.
  struct Pool {
    SourceTag tag;
    std::vector<ParallelRecord> records;
  };
  std::vector<Pool> pools;
  for (const auto& src : sources) {
    Pool pool;
    pool.tag = src.tag;
    if (src.quality) {
      int64_t missing = 0;
      auto kept = quality_filter(src.records, *src.quality, gate, &missing);
      out.composition.quality_dropped +=
          static_cast<int64_t>(src.records.size() - kept.size()) - missing;
      out.composition.quality_dropped_missing += missing;
      pool.records = std::move(kept);
    } else {
      pool.records = src.records;
    }
    pools.push_back(std::move(pool));
  }

  for (const auto& [dir, quota] : plan.quotas) {
    int64_t taken = 0;
    for (auto& pool : pools) {
      if (taken >= quota) break;
      for (size_t i = 0; i < pool.records.size() && taken < quota; ++i) {
        const auto& r = pool.records[i];
        if (r.src_lang != dir.src || r.tgt_lang != dir.tgt) continue;
        if (r.src_text.find('\n') != std::string::npos ||
            r.tgt_text.find('\n') != std::string::npos)
          continue;
        SftRecord sft = render_instruction(r, options);
        sft.source_tag = pool.tag;
        out.records.push_back(std::move(sft));
        ++taken;
        ++out.composition.per_source_tag[to_string(pool.tag)];
        if (dir.src == "en" || dir.tgt == "en")
          ++out.composition.english_centric;
        else
          ++out.composition.other_directions;
        ++out.composition.per_direction[dir.str()];
      }
    }
    if (taken < quota)
      out.composition.shortfall_per_direction[dir.str()] = quota - taken;
  }
  return out;
}

void write_sft_jsonl(const std::string& path,
                     const std::vector<SftRecord>& records) {
  std::ofstream outf(path, std::ios::binary);
  if (!outf) throw std::runtime_error("cannot write sft dataset: " + path);
  for (const auto& r : records) outf << r.to_json_line() << '\n';
}

}  // namespace mtkit
