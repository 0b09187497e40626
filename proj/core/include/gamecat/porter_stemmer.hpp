#pragma once

#include <string>
#include <string_view>

namespace gamecat {

// Porter (1980) suffix-stripping stemmer for lowercase English words.
// Bytes outside a-z are treated as consonants; words of one or two
// characters are returned unchanged.
std::string stem(std::string_view word);

}  // namespace gamecat
