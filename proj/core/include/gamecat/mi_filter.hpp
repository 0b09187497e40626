#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gamecat/corpus.hpp"
#include "gamecat/dtm.hpp"

namespace gamecat {

struct SelectionRule {
  double threshold_bits = 0.0035;
  int bins = 100;

  void validate() const;
};

// Mutual information in bits between each term column and each one-vs-rest
// category indicator. values is terms x categories.
struct MiTable {
  Eigen::MatrixXd values;
  std::vector<std::string> categories;
  std::vector<std::string> terms;
};

// Plug-in estimate of I(X; Y) in bits. x is discretized into `bins`
// equal-width bins over [min(x), max(x)] (the maximum falls in the top bin;
// a constant x occupies a single bin). y holds 0/1 indicators.
double estimate_mi(std::span<const double> x, std::span<const std::uint8_t> y, int bins);

// Requires a probability matrix and one label per row. Categories are the
// distinct labels, sorted.
MiTable compute_mi_table(const TermMatrix& m, std::span<const std::string> labels,
                         const Vocabulary& vocab, const SelectionRule& rule,
                         unsigned threads = 1);

// Indices of terms whose maximum MI over categories is strictly above the
// threshold, in term order.
std::vector<std::size_t> select_terms(const MiTable& table, const SelectionRule& rule);

// `selected` must be sorted, unique and in range; throws DataError if empty.
Vocabulary filter_vocabulary(const Vocabulary& vocab, std::span<const std::size_t> selected);

// CSV with header `term,category,mi_bits`, one line per (term, category).
void write_mi_csv(std::ostream& out, const MiTable& table);

}  // namespace gamecat
