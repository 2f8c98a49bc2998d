#include "mtkit/icl.h"

#include <stdexcept>

#include "mtkit/util.h"

namespace mtkit {

std::vector<ExemplarPair> select_exemplars(const std::vector<ExemplarPair>& dev_pairs,
                                           size_t k, uint64_t seed) {
  if (k > dev_pairs.size())
    throw std::invalid_argument("dev set too small: need " + std::to_string(k) +
                                " exemplars, have " +
                                std::to_string(dev_pairs.size()));
  std::vector<size_t> idx(dev_pairs.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  SeededRng rng = SeededRng::derive(seed, "exemplars");
  std::vector<ExemplarPair> out;
  out.reserve(k);
  for (size_t i = 0; i < k; ++i) {
    size_t j = i + static_cast<size_t>(rng.bounded(idx.size() - i));
    std::swap(idx[i], idx[j]);
    out.push_back(dev_pairs[idx[i]]);
  }
  return out;
}

IclPrompt build_icl_prompt(const std::vector<ExemplarPair>& exemplars,
                           const std::string& query_src) {
  IclPrompt p;
  p.exemplars = exemplars;
  p.query_src = query_src;
  for (const auto& [x, y] : exemplars) {
    if (x.find('\n') != std::string::npos || y.find('\n') != std::string::npos)
      throw std::invalid_argument("exemplar texts must be single-line");
    p.rendered += x;
    p.rendered += '=';
    p.rendered += y;
    p.rendered += '\n';
  }
  if (query_src.find('\n') != std::string::npos)
    throw std::invalid_argument("query text must be single-line");
  p.rendered += query_src;
  p.rendered += '=';
  return p;
}

std::string extract_translation(const std::string& completion) {
  auto nl = completion.find('\n');
  std::string_view first =
      nl == std::string::npos ? std::string_view(completion)
                              : std::string_view(completion).substr(0, nl);
  return std::string(trim(first));
}

}  // namespace mtkit
