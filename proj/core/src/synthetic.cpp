#include "gamecat/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <string>
#include <unordered_set>

#include "gamecat/error.hpp"
#include "gamecat/porter_stemmer.hpp"
#include "gamecat/random.hpp"

namespace gamecat {
namespace {

constexpr std::string_view kConsonants = "bdfgklmnprtvz";
constexpr std::string_view kVowels = "aiou";

std::string zero_padded(std::string_view prefix, std::size_t value, int width) {
  std::string digits = std::to_string(value);
  if (static_cast<int>(digits.size()) < width) {
    digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  }
  return std::string(prefix) + digits;
}

int width_for(std::size_t count) {
  int w = 1;
  for (std::size_t n = count > 0 ? count - 1 : 0; n >= 10; n /= 10) ++w;
  return w;
}

// Distinct consonant-vowel pseudo-words that the stemmer leaves untouched.
std::vector<std::string> make_words(std::size_t count, Rng& rng) {
  std::unordered_set<std::string> seen;
  std::unordered_set<std::string_view> stops(stop_words().begin(), stop_words().end());
  std::vector<std::string> words;
  words.reserve(count);
  std::size_t attempts = 0;
  while (words.size() < count) {
    if (++attempts > count * 1000 + 10000) {
      throw InvalidArgument("synthetic corpus: cannot generate enough distinct words");
    }
    const std::size_t syllables = 2 + uniform_below(rng, 2);
    std::string w;
    for (std::size_t s = 0; s < syllables; ++s) {
      w += kConsonants[uniform_below(rng, kConsonants.size())];
      w += kVowels[uniform_below(rng, kVowels.size())];
    }
    w += kConsonants[uniform_below(rng, kConsonants.size())];
    if (stops.contains(w) || stem(w) != w || !seen.insert(w).second) continue;
    words.push_back(std::move(w));
  }
  return words;
}

}  // namespace

std::vector<RawDocument> generate_synthetic_corpus(const SyntheticCorpusParams& params) {
  if (params.num_classes < 2) throw InvalidArgument("synthetic corpus: need at least 2 classes");
  if (params.docs_per_class < 1) throw InvalidArgument("synthetic corpus: docs_per_class < 1");
  if (params.keywords_per_class < 1) {
    throw InvalidArgument("synthetic corpus: keywords_per_class < 1");
  }
  if (!(params.noise_ratio >= 0.0 && params.noise_ratio <= 1.0)) {
    throw InvalidArgument("synthetic corpus: noise_ratio must lie in [0, 1]");
  }
  if (params.title_tokens < 1 || params.description_tokens < 1) {
    throw InvalidArgument("synthetic corpus: token counts must be positive");
  }
  const auto classes = static_cast<std::size_t>(params.num_classes);
  const auto keywords = static_cast<std::size_t>(params.keywords_per_class);
  if (params.vocab_size < 0 || static_cast<std::size_t>(params.vocab_size) < classes * keywords) {
    throw InvalidArgument("synthetic corpus: vocab_size smaller than all keyword sets");
  }
  const std::size_t noise_words = static_cast<std::size_t>(params.vocab_size) - classes * keywords;
  if (noise_words == 0 && params.noise_ratio > 0.0) {
    throw InvalidArgument("synthetic corpus: noise_ratio > 0 needs shared noise words");
  }

  Rng rng(params.seed);
  const auto words = make_words(static_cast<std::size_t>(params.vocab_size), rng);
  auto draw_token = [&](std::size_t cls) -> const std::string& {
    if (noise_words > 0 && uniform_unit(rng) < params.noise_ratio) {
      return words[classes * keywords + uniform_below(rng, noise_words)];
    }
    return words[cls * keywords + uniform_below(rng, keywords)];
  };

  const std::size_t total = classes * static_cast<std::size_t>(params.docs_per_class);
  const int label_width = width_for(classes) < 2 ? 2 : width_for(classes);
  const int id_width = std::max(5, width_for(total));
  std::vector<RawDocument> docs;
  docs.reserve(total);
  for (std::size_t c = 0; c < classes; ++c) {
    const std::string label = zero_padded("genre_", c, label_width);
    for (int d = 0; d < params.docs_per_class; ++d) {
      RawDocument doc;
      doc.id = zero_padded("doc_", docs.size(), id_width);
      doc.label = label;
      for (int t = 0; t < params.title_tokens; ++t) {
        std::string w = draw_token(c);
        w[0] = static_cast<char>(w[0] - 'a' + 'A');
        if (t > 0) doc.title += ' ';
        doc.title += w;
      }
      for (int t = 0; t < params.description_tokens; ++t) {
        if (t > 0) doc.description += ' ';
        doc.description += draw_token(c);
      }
      doc.description += '.';
      docs.push_back(std::move(doc));
    }
  }
  return docs;
}

std::vector<RawDocument> generate_synthetic_corpus(int num_classes, int docs_per_class,
                                                   int vocab_size, int keywords_per_class,
                                                   double noise_ratio, std::uint64_t seed) {
  SyntheticCorpusParams params;
  params.num_classes = num_classes;
  params.docs_per_class = docs_per_class;
  params.vocab_size = vocab_size;
  params.keywords_per_class = keywords_per_class;
  params.noise_ratio = noise_ratio;
  params.seed = seed;
  return generate_synthetic_corpus(params);
}

}  // namespace gamecat
