#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "gamecat/corpus.hpp"

namespace gamecat {

enum class Weighting { frequency, probability, boolean, tfidf };

std::string_view to_string(Weighting scheme);
Weighting parse_weighting(std::string_view name);

// Documents x terms matrix in compressed sparse row form. Column indices are
// strictly increasing within a row and no zero is stored explicitly.
struct TermMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> col_idx;
  std::vector<double> values;
  Weighting scheme = Weighting::frequency;
  std::vector<std::string> doc_ids;

  std::size_t nonzeros() const noexcept { return values.size(); }
  std::span<const std::uint32_t> row_columns(std::size_t row) const {
    return {col_idx.data() + row_ptr[row], row_ptr[row + 1] - row_ptr[row]};
  }
  std::span<const double> row_values(std::size_t row) const {
    return {values.data() + row_ptr[row], row_ptr[row + 1] - row_ptr[row]};
  }
  double row_sum(std::size_t row) const;

  Eigen::VectorXd dense_row(std::size_t row) const;
  Eigen::MatrixXd to_dense() const;
  // Dense copy of one column, length rows.
  Eigen::VectorXd dense_column(std::size_t col) const;

  // Keeps the listed rows, in the given order.
  TermMatrix select_rows(std::span<const std::size_t> rows_to_keep) const;

  bool operator==(const TermMatrix&) const = default;
};

// Term counts; tokens missing from vocab are skipped.
TermMatrix build_tfm(std::span<const CleanDocument> docs, const Vocabulary& vocab);

TermMatrix to_probability(const TermMatrix& m);
TermMatrix to_boolean(const TermMatrix& m);

// Smoothed idf: ln((1 + p) / (1 + df_j)).
std::vector<double> inverse_document_frequency(const TermMatrix& m);

// Row-probability tf times smoothed natural-log idf. Columns whose idf is
// zero (terms present in every document) vanish.
TermMatrix to_tfidf(const TermMatrix& m);

// Multiplies each column of a probability matrix by idf[col].
TermMatrix apply_idf(const TermMatrix& probability, std::span<const double> idf);

TermMatrix apply_weighting(const TermMatrix& frequency, Weighting scheme);

// Single-document counterpart of build_tfm + weighting. tfidf is rejected:
// idf needs corpus statistics (see PipelineModel).
Eigen::VectorXd vectorize_document(std::span<const std::string> tokens,
                                   const Vocabulary& vocab, Weighting scheme);

// `%%MatrixMarket matrix coordinate real general`, 1-based indices.
void write_matrix_market(std::ostream& out, const TermMatrix& m);

}  // namespace gamecat
