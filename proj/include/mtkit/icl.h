#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mtkit/rng.h"

namespace mtkit {

using ExemplarPair = std::pair<std::string, std::string>;  // (src, tgt)

// k distinct pairs, uniform without replacement, in seeded order. The caller
// reuses the same list for every test sentence of a direction. k = size
// returns the whole set shuffled; throws when the pool is too small.
std::vector<ExemplarPair> select_exemplars(const std::vector<ExemplarPair>& dev_pairs,
                                           size_t k, uint64_t seed);

struct IclPrompt {
  std::vector<ExemplarPair> exemplars;
  std::string query_src;
  std::string rendered;  // "x1=y1\n...\nxk=yk\nquery="
};

// Renders the "<X>=<Y>" template: one exemplar per line, then the query
// source followed by a bare '='. Exemplar or query texts containing a
// newline are errors.
IclPrompt build_icl_prompt(const std::vector<ExemplarPair>& exemplars,
                           const std::string& query_src);

// Takes the completion up to its first newline, trimmed. The template makes
// models continue with fresh exemplar lines, so everything after the first
// line break is noise. Empty extractions are legitimate values; callers flag
// them.
std::string extract_translation(const std::string& completion);

}  // namespace mtkit
