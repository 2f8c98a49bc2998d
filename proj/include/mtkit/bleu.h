#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mtkit/tokenizer.h"

namespace mtkit {

enum class BleuSmoothing { None, Floor };

struct BleuResult {
  double score = 0.0;  // [0, 100]
  std::array<double, 4> precisions{};
  double brevity_penalty = 0.0;
  int64_t hyp_len = 0;
  int64_t ref_len = 0;
  std::string smoothing = "none";

  std::string to_json() const;
};

struct BleuOptions {
  BleuSmoothing smoothing = BleuSmoothing::None;
  // Floor smoothing substitutes this value for any zero n-gram precision.
  double floor = 0.01;
};

// Corpus-level BLEU-4: clipped n-gram matches are summed over the whole
// corpus, the score is BP * exp(mean log p_n) * 100, and
// BP = min(1, exp(1 - ref_len/hyp_len)). One reference per hypothesis. With
// no smoothing any zero precision zeroes the score.
BleuResult corpus_bleu(const std::vector<std::vector<TokenId>>& hyps,
                       const std::vector<std::vector<TokenId>>& refs,
                       const BleuOptions& options = {});

// Tokenizes both sides with `tok` first. Plugging a subword tokenizer makes
// this the subword-piece variant of the metric.
BleuResult corpus_bleu(const std::vector<std::string>& hyps,
                       const std::vector<std::string>& refs,
                       const Tokenizer& tok, const BleuOptions& options = {});

}  // namespace mtkit
