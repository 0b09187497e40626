#include "gamecat/corpus.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "csv_reader.hpp"
#include "gamecat/error.hpp"
#include "gamecat/porter_stemmer.hpp"

namespace gamecat {
namespace {

using nlohmann::json;

// Punctuation, symbols and digits, deduplicated, plus straight ASCII quotes,
// line feed and carriage return.
constexpr std::array<char32_t, 41> kRemovedCharacters{
    U'?', U'*', U'_', U'@', U'-', U'+', U'!', U'=', U'®', U'™',
    U'•', U'…', U'“', U'”', U'"', U'~', U'&', U'—',
    U'.', U',', U'#', U'‘', U'’', U'\'', U'(', U')', U':', U'©',
    U'0', U'1', U'2', U'3', U'4', U'5', U'6', U'7', U'8', U'9', U'/', U'\n', U'\r',
};

constexpr std::array<std::string_view, 25> kStopWords{
    "the", "of",   "and",  "a",    "to",   "in",   "is", "you", "that",
    "it",  "he",   "was",  "for",  "on",   "are",  "as", "with", "his",
    "they", "i",   "at",   "be",   "this", "have", "from",
};

struct Utf8Unit {
  char32_t code_point;
  std::size_t length;
};

// Decodes one UTF-8 sequence. Invalid bytes decode as a single unit whose
// code point cannot match any removed character.
Utf8Unit decode_utf8(std::string_view s, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  constexpr Utf8Unit kInvalid{0xFFFFFFFFu, 1};
  if (b0 < 0x80) return {b0, 1};
  std::size_t len;
  char32_t cp;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return kInvalid;
  }
  if (pos + len > s.size()) return kInvalid;
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) return kInvalid;
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, len};
}

char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](char c) { return ascii_lower(c); });
  return out;
}

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Removes every case-insensitive occurrence of each pattern, repeating until
// none remain (a deletion can join two halves of a new occurrence).
bool delete_phrases(std::string& text, const std::vector<std::string>& patterns) {
  bool changed = false;
  for (const auto& pattern : patterns) {
    if (pattern.empty()) continue;
    const std::string needle = ascii_lower(pattern);
    for (;;) {
      const std::string folded = ascii_lower(text);
      const auto pos = folded.find(needle);
      if (pos == std::string::npos) break;
      text.erase(pos, needle.size());
      changed = true;
    }
  }
  return changed;
}

// One scrub pass: phrase deletion, then each maximal run of whitespace and
// removed characters that contains at least one removed character becomes a
// single space, then ASCII lowercasing.
std::string scrub_once(std::string_view input, const ScrubRules& rules) {
  std::string text(input);
  delete_phrases(text, rules.ad_patterns);
  delete_phrases(text, rules.company_names);

  auto removed = [&](char32_t cp) {
    return std::find(rules.remove_chars.begin(), rules.remove_chars.end(), cp) !=
               rules.remove_chars.end();
  };

  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const Utf8Unit unit = decode_utf8(text, pos);
    const bool is_removed = removed(unit.code_point);
    const bool is_space = unit.length == 1 && is_ascii_space(text[pos]);
    if (!is_removed && !is_space) {
      out.append(text, pos, unit.length);
      pos += unit.length;
      continue;
    }
    const std::size_t run_start = pos;
    bool run_has_removed = false;
    while (pos < text.size()) {
      const Utf8Unit u = decode_utf8(text, pos);
      const bool r = removed(u.code_point);
      const bool s = u.length == 1 && is_ascii_space(text[pos]);
      if (!r && !s) break;
      run_has_removed = run_has_removed || r;
      pos += u.length;
    }
    if (run_has_removed) {
      out.push_back(' ');
    } else {
      out.append(text, run_start, pos - run_start);
    }
  }
  std::transform(out.begin(), out.end(), out.begin(),
                 [](char c) { return ascii_lower(c); });
  return out;
}

std::vector<std::string> read_string_list(const json& doc, const char* key) {
  std::vector<std::string> out;
  if (!doc.contains(key)) return out;
  const auto& arr = doc.at(key);
  if (!arr.is_array()) {
    throw DataError(std::string("scrub rules: '") + key + "' must be an array");
  }
  for (const auto& item : arr) {
    if (!item.is_string()) {
      throw DataError(std::string("scrub rules: '") + key +
                      "' must contain only strings");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

void check_and_register(const RawDocument& doc, std::size_t line,
                        std::unordered_set<std::string>& seen) {
  if (doc.id.empty()) {
    throw DataError("line " + std::to_string(line) + ": empty id");
  }
  if (!seen.insert(doc.id).second) {
    throw DataError("line " + std::to_string(line) + ": duplicate id '" + doc.id +
                    "'");
  }
}

std::vector<RawDocument> read_jsonl(std::istream& in) {
  std::vector<RawDocument> docs;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (std::all_of(line.begin(), line.end(), is_ascii_space)) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError("line " + std::to_string(line_no) + ": malformed JSON (" +
                      e.what() + ")");
    }
    auto field = [&](const char* key, bool required) -> std::optional<std::string> {
      if (!obj.is_object()) {
        throw DataError("line " + std::to_string(line_no) + ": expected a JSON object");
      }
      const auto it = obj.find(key);
      if (it == obj.end() || it->is_null()) {
        if (required) {
          throw DataError("line " + std::to_string(line_no) + ": missing field '" +
                          key + "'");
        }
        return std::nullopt;
      }
      if (!it->is_string()) {
        throw DataError("line " + std::to_string(line_no) + ": field '" + key +
                        "' must be a string");
      }
      return it->get<std::string>();
    };
    RawDocument doc;
    doc.id = *field("id", true);
    doc.title = *field("title", true);
    doc.description = *field("description", true);
    doc.label = field("label", false);
    check_and_register(doc, line_no, seen);
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<RawDocument> read_csv(std::istream& in) {
  std::vector<RawDocument> docs;
  detail::CsvReader reader(in);
  detail::CsvRecord record;
  if (!reader.next(record)) return docs;

  std::optional<std::size_t> id_col, title_col, desc_col, label_col;
  for (std::size_t i = 0; i < record.fields.size(); ++i) {
    std::string name = record.fields[i];
    if (i == 0 && name.rfind("\xEF\xBB\xBF", 0) == 0) name.erase(0, 3);
    if (name == "id") id_col = i;
    else if (name == "title") title_col = i;
    else if (name == "description") desc_col = i;
    else if (name == "label") label_col = i;
  }
  if (!id_col || !title_col || !desc_col) {
    throw DataError("line 1: CSV header must contain id, title and description");
  }
  const std::size_t width = record.fields.size();

  std::unordered_set<std::string> seen;
  while (reader.next(record)) {
    if (record.fields.size() == 1 && record.fields[0].empty()) continue;
    if (record.fields.size() != width) {
      throw DataError("line " + std::to_string(record.line) + ": expected " +
                      std::to_string(width) + " fields, found " +
                      std::to_string(record.fields.size()));
    }
    RawDocument doc;
    doc.id = record.fields[*id_col];
    doc.title = record.fields[*title_col];
    doc.description = record.fields[*desc_col];
    if (label_col && !record.fields[*label_col].empty()) {
      doc.label = record.fields[*label_col];
    }
    check_and_register(doc, record.line, seen);
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace

std::span<const char32_t> default_removed_characters() { return kRemovedCharacters; }

std::span<const std::string_view> stop_words() { return kStopWords; }

ScrubRules ScrubRules::defaults() {
  ScrubRules rules;
  rules.company_names = {"Big Fish",  "Electronic Arts", "Activision",
                         "NaturalMotion", "PlayFirst", "SEGA",
                         "Imperial Game Studio"};
  rules.ad_patterns = {"Don't miss our other exciting games!",
                       "Don’t miss our other exciting games!"};
  return rules;
}

ScrubRules ScrubRules::from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("scrub rules: ") + e.what(), e.byte);
  }
  if (!doc.is_object()) throw DataError("scrub rules: expected a JSON object");
  ScrubRules rules;
  rules.company_names = read_string_list(doc, "company_names");
  rules.ad_patterns = read_string_list(doc, "ad_patterns");
  return rules;
}

ScrubRules ScrubRules::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scrub rules '" + path.string() + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json(text);
}

std::string ScrubRules::to_json() const {
  json doc{{"company_names", company_names}, {"ad_patterns", ad_patterns}};
  return doc.dump(2);
}

Vocabulary::Vocabulary(std::vector<std::string> terms) : terms_(std::move(terms)) {
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i > 0 && !(terms_[i - 1] < terms_[i])) {
      throw InvalidArgument("vocabulary terms must be sorted and unique");
    }
    index_.emplace(terms_[i], i);
  }
}

std::optional<std::size_t> Vocabulary::index_of(std::string_view term) const {
  const auto it = index_.find(term);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

CorpusFormat corpus_format_for(const std::filesystem::path& path) {
  const auto ext = ascii_lower(path.extension().string());
  if (ext == ".csv") return CorpusFormat::csv;
  if (ext == ".jsonl" || ext == ".json" || ext == ".ndjson") return CorpusFormat::jsonl;
  throw InvalidArgument("cannot infer corpus format from '" + path.string() +
                        "'; use .csv or .jsonl");
}

std::vector<RawDocument> read_corpus(std::istream& in, CorpusFormat format) {
  return format == CorpusFormat::csv ? read_csv(in) : read_jsonl(in);
}

std::vector<RawDocument> load_corpus(const std::filesystem::path& path,
                                     CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus '" + path.string() + "'");
  return read_corpus(in, format);
}

void write_jsonl(std::ostream& out, std::span<const RawDocument> docs) {
  for (const auto& doc : docs) {
    json obj{{"id", doc.id}, {"title", doc.title}, {"description", doc.description}};
    if (doc.label) obj["label"] = *doc.label;
    out << obj.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
}

void write_csv(std::ostream& out, std::span<const RawDocument> docs) {
  out << "id,title,description,label\n";
  for (const auto& doc : docs) {
    out << detail::csv_escape(doc.id) << ',' << detail::csv_escape(doc.title) << ','
        << detail::csv_escape(doc.description) << ','
        << detail::csv_escape(doc.label.value_or("")) << '\n';
  }
}

std::string scrub_text(std::string_view text, const ScrubRules& rules) {
  // Iterate to a fixed point so phrases exposed by character stripping
  // (e.g. "Big-Fish") are removed too.
  std::string current = scrub_once(text, rules);
  for (;;) {
    std::string next = scrub_once(current, rules);
    if (next == current) return current;
    current = std::move(next);
  }
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && is_ascii_space(text[pos])) ++pos;
    const std::size_t start = pos;
    while (pos < text.size() && !is_ascii_space(text[pos])) ++pos;
    if (pos > start) tokens.emplace_back(text.substr(start, pos - start));
  }
  return tokens;
}

std::vector<std::string> remove_stopwords(std::vector<std::string> tokens) {
  std::erase_if(tokens, [](const std::string& token) {
    return std::find(kStopWords.begin(), kStopWords.end(), token) != kStopWords.end();
  });
  return tokens;
}

CleanDocument preprocess(const RawDocument& doc, const ScrubRules& rules) {
  std::string joined = doc.title;
  joined.push_back(' ');
  joined.append(doc.description);

  CleanDocument clean;
  clean.id = doc.id;
  clean.label = doc.label;
  clean.tokens = remove_stopwords(tokenize(scrub_text(joined, rules)));
  for (auto& token : clean.tokens) token = stem(token);
  return clean;
}

std::vector<CleanDocument> preprocess_all(std::span<const RawDocument> docs,
                                          const ScrubRules& rules) {
  std::vector<CleanDocument> out;
  out.reserve(docs.size());
  for (const auto& doc : docs) out.push_back(preprocess(doc, rules));
  return out;
}

Vocabulary build_vocabulary(std::span<const CleanDocument> docs) {
  std::set<std::string> terms;
  for (const auto& doc : docs) terms.insert(doc.tokens.begin(), doc.tokens.end());
  if (terms.empty()) throw DataError("cannot build a vocabulary: no terms in corpus");
  return Vocabulary(std::vector<std::string>(terms.begin(), terms.end()));
}

}  // namespace gamecat
