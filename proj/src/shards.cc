#include "mtkit/shards.h"

#include <zlib.h>

#include <filesystem>
#include <fstream>
#include <future>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "mtkit/digest.h"
#include "mtkit/worker_pool.h"

namespace mtkit {

using nlohmann::json;
namespace fs = std::filesystem;

std::string PretrainSample::to_json_line() const {
  json j;
  j["kind"] = kind == Kind::Mono ? "mono" : "pair";
  j["text"] = text;
  j["token_count"] = token_count;
  j["langs"] = langs;
  return j.dump();
}

PretrainSample format_pair(const ParallelRecord& record, SeededRng& rng,
                           const Tokenizer& tok, int64_t separator_cost) {
  if (record.src_text.find('\n') != std::string::npos ||
      record.tgt_text.find('\n') != std::string::npos)
    throw std::invalid_argument(
        "pair sides must be single-line to use the newline separator");
  PretrainSample s;
  s.kind = PretrainSample::Kind::Pair;
  const bool src_first = rng.coin();
  const std::string& first = src_first ? record.src_text : record.tgt_text;
  const std::string& second = src_first ? record.tgt_text : record.src_text;
  s.text = first + "\n" + second;
  s.token_count =
      tok.count(record.src_text) + tok.count(record.tgt_text) + separator_cost;
  s.langs = {record.src_lang, record.tgt_lang};
  return s;
}

std::string pile_for(const ParallelRecord& record, const std::string& lang) {
  std::string other;
  if (record.src_lang == lang)
    other = record.tgt_lang;
  else if (record.tgt_lang == lang)
    other = record.src_lang;
  else
    throw std::invalid_argument("pair " + record.src_lang + "-" +
                                record.tgt_lang + " does not involve " + lang);
  if (other == "en") return kPileEnglishCentric;
  if (other == "zh") return kPileChineseCentric;
  throw std::invalid_argument("pair " + record.src_lang + "-" +
                              record.tgt_lang +
                              " belongs to neither pile for " + lang);
}

namespace {

// Deterministic gzip: deflate with the gzip wrapper and the default header,
// which carries mtime 0. gzopen would be simpler but stamps no guarantee
// about the header across zlib builds.
std::string gzip_compress(const std::string& data) {
  z_stream strm{};
  if (deflateInit2(&strm, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8,
                   Z_DEFAULT_STRATEGY) != Z_OK)
    throw std::runtime_error("deflateInit2 failed");
  std::string out;
  out.resize(deflateBound(&strm, static_cast<uLong>(data.size())));
  strm.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  strm.avail_in = static_cast<uInt>(data.size());
  strm.next_out = reinterpret_cast<Bytef*>(out.data());
  strm.avail_out = static_cast<uInt>(out.size());
  int rc = deflate(&strm, Z_FINISH);
  deflateEnd(&strm);
  if (rc != Z_STREAM_END) throw std::runtime_error("deflate failed");
  out.resize(out.size() - strm.avail_out);
  return out;
}

std::string gzip_decompress_file(const std::string& path) {
  gzFile f = gzopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("cannot open shard: " + path);
  std::string out;
  char buf[1 << 16];
  int n;
  while ((n = gzread(f, buf, sizeof(buf))) > 0) out.append(buf, static_cast<size_t>(n));
  gzclose(f);
  if (n < 0) throw std::runtime_error("gzip read error: " + path);
  return out;
}

struct SourceQuota {
  int64_t quota = 0;
  int64_t used = 0;
  bool open = true;  // closed at the first record that would overshoot

  bool try_take(int64_t tokens) {
    if (!open || used + tokens > quota) {
      open = false;
      return false;
    }
    used += tokens;
    return true;
  }
};

}  // namespace

std::string MixManifest::to_json() const {
  json j;
  j["seed"] = seed;
  j["tokenizer"] = tokenizer;
  j["shard_size"] = shard_size;
  j["separator_cost"] = separator_cost;
  j["lang"] = lang;
  j["token_totals"] = token_totals;
  j["sample_counts"] = sample_counts;
  j["quota_shortfall"] = quota_shortfall;
  j["skipped_other_language"] = skipped_other_language;
  auto& arr = j["shards"] = json::array();
  for (const auto& s : shards)
    arr.push_back({{"path", s.path},
                   {"samples", s.samples},
                   {"tokens", s.tokens},
                   {"sha256", s.sha256}});
  return j.dump(2);
}

MixManifest MixManifest::from_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open manifest: " + path);
  json j;
  in >> j;
  MixManifest m;
  m.seed = j.at("seed").get<uint64_t>();
  m.tokenizer = j.at("tokenizer").get<std::string>();
  m.shard_size = j.at("shard_size").get<int64_t>();
  m.separator_cost = j.at("separator_cost").get<int64_t>();
  m.lang = j.at("lang").get<std::string>();
  m.token_totals = j.at("token_totals").get<std::map<std::string, int64_t>>();
  m.sample_counts = j.at("sample_counts").get<std::map<std::string, int64_t>>();
  m.quota_shortfall =
      j.at("quota_shortfall").get<std::map<std::string, int64_t>>();
  m.skipped_other_language = j.at("skipped_other_language").get<int64_t>();
  for (const auto& s : j.at("shards")) {
    ShardInfo info;
    info.path = s.at("path").get<std::string>();
    info.samples = s.at("samples").get<int64_t>();
    info.tokens = s.at("tokens").get<int64_t>();
    info.sha256 = s.at("sha256").get<std::string>();
    m.shards.push_back(std::move(info));
  }
  return m;
}

MixManifest emit_shards(MonoStream& mono, ParallelStream& pairs,
                        const AllocationPlan& plan, const MixOptions& options,
                        const std::string& out_dir, WorkerPool* pool) {
  if (options.shard_size <= 0)
    throw std::invalid_argument("shard_size must be positive");
  auto tok = make_tokenizer(options.tokenizer_spec);
  fs::create_directories(out_dir);

  MixManifest manifest;
  manifest.seed = options.seed;
  manifest.tokenizer = tok->name();
  manifest.shard_size = options.shard_size;
  manifest.separator_cost = options.separator_cost;
  manifest.lang = plan.lang;

  SourceQuota mono_quota{plan.alloc_mono, 0, true};
  std::map<std::string, SourceQuota> pile_quotas;
  for (const auto& [pile, tokens] : plan.alloc_parallel)
    pile_quotas[pile] = {tokens, 0, true};

  std::vector<PretrainSample> samples;

  MonoRecord m;
  while (mono_quota.open && mono.next(m)) {
    if (m.lang != plan.lang) {
      ++manifest.skipped_other_language;
      continue;
    }
    const int64_t tokens = tok->count(m.text);
    if (!mono_quota.try_take(tokens)) break;
    PretrainSample s;
    s.kind = PretrainSample::Kind::Mono;
    s.text = m.text;
    s.token_count = tokens;
    s.langs = {m.lang};
    samples.push_back(std::move(s));
  }

  auto any_pile_open = [&] {
    for (const auto& [pile, q] : pile_quotas)
      if (q.open) return true;
    return false;
  };

  // The coin stream and the shuffle stream are derived separately so pair
  // formatting cannot perturb the permutation.
  SeededRng coin_rng = SeededRng::derive(options.seed, "pair-order");
  ParallelRecord p;
  while (any_pile_open() && pairs.next(p)) {
    std::string pile;
    try {
      pile = pile_for(p, plan.lang);
    } catch (const std::invalid_argument&) {
      ++manifest.skipped_other_language;
      continue;
    }
    auto it = pile_quotas.find(pile);
    if (it == pile_quotas.end()) continue;  // plan has no quota for this pile
    if (!it->second.open) continue;
    const int64_t tokens =
        tok->count(p.src_text) + tok->count(p.tgt_text) + options.separator_cost;
    if (it->second.used + tokens > it->second.quota) {
      it->second.open = false;
      continue;
    }
    samples.push_back(format_pair(p, coin_rng, *tok, options.separator_cost));
    it->second.used += tokens;
  }

  manifest.token_totals["mono"] = mono_quota.used;
  for (const auto& [pile, q] : pile_quotas) manifest.token_totals[pile] = q.used;
  manifest.quota_shortfall["mono"] = plan.alloc_mono - mono_quota.used;
  for (const auto& [pile, q] : pile_quotas)
    manifest.quota_shortfall[pile] = q.quota - q.used;

  int64_t mono_samples = 0, pair_samples = 0;
  for (const auto& s : samples)
    (s.kind == PretrainSample::Kind::Mono ? mono_samples : pair_samples) += 1;
  manifest.sample_counts["mono"] = mono_samples;
  manifest.sample_counts["pair"] = pair_samples;

  // Random interspersal: one seeded permutation over sample indexes.
  std::vector<uint32_t> perm(samples.size());
  for (size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<uint32_t>(i);
  SeededRng shuffle_rng = SeededRng::derive(options.seed, "shuffle");
  shuffle_rng.shuffle(perm);

  const int64_t n_shards =
      (static_cast<int64_t>(samples.size()) + options.shard_size - 1) /
      options.shard_size;
  manifest.shards.resize(static_cast<size_t>(n_shards));

  auto write_shard = [&](int64_t shard_idx) {
    const int64_t begin = shard_idx * options.shard_size;
    const int64_t end = std::min<int64_t>(begin + options.shard_size,
                                          static_cast<int64_t>(samples.size()));
    std::string body;
    int64_t shard_tokens = 0;
    for (int64_t i = begin; i < end; ++i) {
      const auto& s = samples[perm[static_cast<size_t>(i)]];
      body += s.to_json_line();
      body += '\n';
      shard_tokens += s.token_count;
    }
    char name[32];
    snprintf(name, sizeof(name), "shard-%05lld.jsonl",
             static_cast<long long>(shard_idx));
    std::string rel = std::string(name) + (options.gzip ? ".gz" : "");
    const std::string payload = options.gzip ? gzip_compress(body) : body;
    std::ofstream out(fs::path(out_dir) / rel, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write shard: " + rel);
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    out.close();
    if (!out) throw std::runtime_error("write failed: " + rel);
    ShardInfo info;
    info.path = rel;
    info.samples = end - begin;
    info.tokens = shard_tokens;
    info.sha256 = sha256_hex(payload);
    manifest.shards[static_cast<size_t>(shard_idx)] = std::move(info);
  };

  if (pool) {
    std::vector<std::future<void>> done;
    done.reserve(static_cast<size_t>(n_shards));
    for (int64_t i = 0; i < n_shards; ++i)
      done.push_back(pool->submit([&write_shard, i] { write_shard(i); }));
    for (auto& f : done) f.get();
  } else {
    for (int64_t i = 0; i < n_shards; ++i) write_shard(i);
  }

  std::ofstream mf(fs::path(out_dir) / "manifest.json", std::ios::binary);
  if (!mf) throw std::runtime_error("cannot write manifest.json");
  mf << manifest.to_json() << '\n';
  return manifest;
}

std::vector<PretrainSample> read_shard(const std::string& path) {
  std::string body;
  if (path.size() > 3 && path.substr(path.size() - 3) == ".gz") {
    body = gzip_decompress_file(path);
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open shard: " + path);
    body.assign(std::istreambuf_iterator<char>(in), {});
  }
  std::vector<PretrainSample> out;
  size_t start = 0;
  while (start < body.size()) {
    size_t nl = body.find('\n', start);
    if (nl == std::string::npos) nl = body.size();
    std::string_view line(body.data() + start, nl - start);
    start = nl + 1;
    if (line.empty()) continue;
    json j = json::parse(line);
    PretrainSample s;
    s.kind = j.at("kind").get<std::string>() == "mono"
                 ? PretrainSample::Kind::Mono
                 : PretrainSample::Kind::Pair;
    s.text = j.at("text").get<std::string>();
    s.token_count = j.at("token_count").get<int64_t>();
    s.langs = j.at("langs").get<std::vector<std::string>>();
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace mtkit
