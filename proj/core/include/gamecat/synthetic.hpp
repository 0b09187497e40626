#pragma once

#include <cstdint>
#include <vector>

#include "gamecat/corpus.hpp"

namespace gamecat {

struct SyntheticCorpusParams {
  int num_classes = 3;
  int docs_per_class = 10;
  int vocab_size = 100;
  int keywords_per_class = 5;
  double noise_ratio = 0.2;
  std::uint64_t seed = 42;
  int title_tokens = 3;
  int description_tokens = 40;
};

// Each class owns a disjoint keyword set; the remaining vocabulary is shared
// noise. Every token is a class keyword with probability 1 - noise_ratio.
// Words are fixed points of the stemmer and never stop words, so the
// generated vocabulary survives preprocessing intact.
std::vector<RawDocument> generate_synthetic_corpus(const SyntheticCorpusParams& params);

std::vector<RawDocument> generate_synthetic_corpus(int num_classes, int docs_per_class,
                                                   int vocab_size, int keywords_per_class,
                                                   double noise_ratio, std::uint64_t seed);

}  // namespace gamecat
