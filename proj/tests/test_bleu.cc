#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "mtkit/bleu.h"

using namespace mtkit;

namespace {

using Corpus = std::vector<std::vector<TokenId>>;

// Brute-force oracle: enumerate n-grams as joined string keys and redo the
// clipping, precision, and penalty arithmetic from scratch.
double oracle_bleu(const Corpus& hyps, const Corpus& refs) {
  double log_sum = 0.0;
  long long hyp_len = 0, ref_len = 0;
  for (size_t s = 0; s < hyps.size(); ++s) {
    hyp_len += static_cast<long long>(hyps[s].size());
    ref_len += static_cast<long long>(refs[s].size());
  }
  for (int n = 1; n <= 4; ++n) {
    long long matched = 0, total = 0;
    for (size_t s = 0; s < hyps.size(); ++s) {
      auto grams = [n](const std::vector<TokenId>& toks) {
        std::map<std::string, long long> m;
        for (int i = 0; i + n <= static_cast<int>(toks.size()); ++i) {
          std::string key;
          for (int k = 0; k < n; ++k) key += std::to_string(toks[i + k]) + "_";
          ++m[key];
        }
        return m;
      };
      auto h = grams(hyps[s]);
      auto r = grams(refs[s]);
      for (const auto& [key, count] : h) {
        total += count;
        auto it = r.find(key);
        if (it != r.end()) matched += std::min(count, it->second);
      }
    }
    if (total == 0 || matched == 0) return 0.0;
    log_sum += std::log(static_cast<double>(matched) / static_cast<double>(total));
  }
  if (hyp_len == 0) return 0.0;
  double bp = hyp_len < ref_len
                  ? std::exp(1.0 - static_cast<double>(ref_len) / hyp_len)
                  : 1.0;
  return bp * std::exp(log_sum / 4.0) * 100.0;
}

}  // namespace

TEST_CASE("identical corpora score exactly 100 with unit brevity penalty") {
  Corpus c = {{1, 2, 3, 4, 5}, {7, 8, 9, 10}};
  auto result = corpus_bleu(c, c);
  CHECK(result.score == 100.0);
  CHECK(result.brevity_penalty == 1.0);
  for (double p : result.precisions) CHECK(p == 1.0);
}

TEST_CASE("brevity penalty on a 3-token hyp against a 6-token ref is e^-1") {
  Corpus hyp = {{1, 2, 3}};
  Corpus ref = {{1, 2, 3, 4, 5, 6}};
  auto result = corpus_bleu(hyp, ref);
  CHECK(result.brevity_penalty ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(result.precisions[0] == 1.0);  // all unigrams match
  CHECK(result.hyp_len == 3);
  CHECK(result.ref_len == 6);
}

TEST_CASE("length mismatch and empty corpus are errors") {
  Corpus one = {{1}};
  Corpus two = {{1}, {2}};
  CHECK_THROWS_AS(corpus_bleu(one, two), std::invalid_argument);
  CHECK_THROWS_AS(corpus_bleu(Corpus{}, Corpus{}), std::invalid_argument);
}

TEST_CASE("no-smoothing zero precision zeroes the score but not the parts") {
  Corpus hyp = {{1, 2}};
  Corpus ref = {{1, 2}};
  auto result = corpus_bleu(hyp, ref);  // no 3-grams or 4-grams exist
  CHECK(result.score == 0.0);
  CHECK(result.precisions[0] == 1.0);
  CHECK(result.smoothing == "none");
}

TEST_CASE("floor smoothing substitutes zero precisions and is labeled") {
  Corpus hyp = {{1, 2}};
  Corpus ref = {{1, 2}};
  BleuOptions options;
  options.smoothing = BleuSmoothing::Floor;
  options.floor = 0.01;
  auto result = corpus_bleu(hyp, ref, options);
  CHECK(result.score > 0.0);
  CHECK(result.smoothing == "floor");
  double expect = std::exp((std::log(1.0) * 2 + std::log(0.01) * 2) / 4.0) * 100.0;
  CHECK(result.score == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("randomized corpora agree with the brute-force oracle to 1e-9") {
  std::mt19937_64 gen(808);
  for (int trial = 0; trial < 100; ++trial) {
    const int sentences = 1 + static_cast<int>(gen() % 20);
    const TokenId vocab = 2 + static_cast<TokenId>(gen() % 9);
    Corpus hyps, refs;
    for (int s = 0; s < sentences; ++s) {
      std::vector<TokenId> h(1 + gen() % 12), r(1 + gen() % 12);
      for (auto& t : h) t = static_cast<TokenId>(gen() % vocab);
      for (auto& t : r) t = static_cast<TokenId>(gen() % vocab);
      hyps.push_back(h);
      refs.push_back(r);
    }
    auto got = corpus_bleu(hyps, refs);
    CHECK(got.score == doctest::Approx(oracle_bleu(hyps, refs)).epsilon(1e-9));
  }
}

TEST_CASE("exhaustive small hyp/ref length grid matches the oracle") {
  std::mt19937_64 gen(121);
  for (int hl = 1; hl <= 12; ++hl) {
    for (int rl = 1; rl <= 12; ++rl) {
      std::vector<TokenId> h(static_cast<size_t>(hl)), r(static_cast<size_t>(rl));
      for (auto& t : h) t = static_cast<TokenId>(gen() % 3);
      for (auto& t : r) t = static_cast<TokenId>(gen() % 3);
      Corpus hyps = {h}, refs = {r};
      auto got = corpus_bleu(hyps, refs);
      CHECK(got.score == doctest::Approx(oracle_bleu(hyps, refs)).epsilon(1e-9));
    }
  }
}

TEST_CASE("lengthening the hypothesis toward ref_len never decreases BP") {
  Corpus ref = {{1, 2, 3, 4, 5, 6, 7, 8}};
  double last_bp = -1.0;
  for (size_t len = 1; len <= 8; ++len) {
    Corpus hyp = {std::vector<TokenId>(len, 1)};
    auto result = corpus_bleu(hyp, ref);
    CHECK(result.brevity_penalty >= last_bp);
    last_bp = result.brevity_penalty;
  }
  CHECK(last_bp == 1.0);
}

TEST_CASE("string interface tokenizes both sides with the same tokenizer") {
  WhitespaceTokenizer tok;
  std::vector<std::string> hyps = {"the cat sat on the mat"};
  std::vector<std::string> refs = {"the cat sat on the mat"};
  CHECK(corpus_bleu(hyps, refs, tok).score == 100.0);

  CharTokenizer chars;
  // Subword-style scoring differs from word-level scoring.
  std::vector<std::string> h2 = {"abcd efgh"};
  std::vector<std::string> r2 = {"abcd efgx"};
  auto word_level = corpus_bleu(h2, r2, tok);
  auto char_level = corpus_bleu(h2, r2, chars);
  CHECK(word_level.score == 0.0);
  CHECK(char_level.score > 0.0);
}

TEST_CASE("result serializes with all fields") {
  Corpus c = {{1, 2, 3, 4, 5}};
  auto j = corpus_bleu(c, c).to_json();
  CHECK(j.find("\"score\": 100.0") != std::string::npos);
  CHECK(j.find("\"brevity_penalty\"") != std::string::npos);
  CHECK(j.find("\"smoothing\": \"none\"") != std::string::npos);
}
