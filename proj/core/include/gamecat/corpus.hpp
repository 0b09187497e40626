#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gamecat {

struct RawDocument {
  std::string id;
  std::string title;
  std::string description;
  std::optional<std::string> label;

  bool operator==(const RawDocument&) const = default;
};

// Characters stripped by scrub_text: punctuation, symbols and digits, plus
// line feed and carriage return.
std::span<const char32_t> default_removed_characters();

// The 25 most frequent English words (Fry's instant-word list).
std::span<const std::string_view> stop_words();

struct ScrubRules {
  std::vector<char32_t> remove_chars{default_removed_characters().begin(),
                                     default_removed_characters().end()};
  std::vector<std::string> company_names;
  std::vector<std::string> ad_patterns;

  // Company names and advertisement phrases observed in App Store game
  // descriptions. Matching is case-insensitive.
  static ScrubRules defaults();

  // Parses `{"company_names": [...], "ad_patterns": [...]}`. Missing keys
  // mean empty lists. Throws FormatError on malformed JSON.
  static ScrubRules from_json(std::string_view text);
  static ScrubRules load(const std::filesystem::path& path);

  std::string to_json() const;

  bool operator==(const ScrubRules&) const = default;
};

struct CleanDocument {
  std::string id;
  std::vector<std::string> tokens;
  std::optional<std::string> label;

  bool operator==(const CleanDocument&) const = default;
};

// Sorted (byte order) set of stemmed terms with dense 0-based column indices.
class Vocabulary {
 public:
  Vocabulary() = default;

  // `terms` must be strictly increasing; throws InvalidArgument otherwise.
  explicit Vocabulary(std::vector<std::string> terms);

  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  const std::string& term(std::size_t index) const { return terms_.at(index); }
  std::optional<std::size_t> index_of(std::string_view term) const;

  bool operator==(const Vocabulary& other) const { return terms_ == other.terms_; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::size_t, Hash, std::equal_to<>> index_;
};

enum class CorpusFormat { csv, jsonl };

// Picks the format from the file extension (.csv, .jsonl/.json).
CorpusFormat corpus_format_for(const std::filesystem::path& path);

std::vector<RawDocument> load_corpus(const std::filesystem::path& path,
                                     CorpusFormat format);
std::vector<RawDocument> read_corpus(std::istream& in, CorpusFormat format);

void write_jsonl(std::ostream& out, std::span<const RawDocument> docs);
void write_csv(std::ostream& out, std::span<const RawDocument> docs);

std::string scrub_text(std::string_view text, const ScrubRules& rules);
std::vector<std::string> tokenize(std::string_view text);
std::vector<std::string> remove_stopwords(std::vector<std::string> tokens);

CleanDocument preprocess(const RawDocument& doc, const ScrubRules& rules);
std::vector<CleanDocument> preprocess_all(std::span<const RawDocument> docs,
                                          const ScrubRules& rules);

// Union of all tokens. Throws DataError when no document has a token.
Vocabulary build_vocabulary(std::span<const CleanDocument> docs);

}  // namespace gamecat
