#include "gamecat/dtm.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>

#include "gamecat/error.hpp"

namespace gamecat {
namespace {

void require_scheme(const TermMatrix& m, Weighting expected, const char* op) {
  if (m.scheme != expected) {
    throw InvalidArgument(std::string(op) + ": expected a " +
                          std::string(to_string(expected)) + " matrix, got " +
                          std::string(to_string(m.scheme)));
  }
}

// Copies the sparsity pattern and maps each stored value through fn(row,
// col, value); results equal to zero are dropped.
template <typename Fn>
TermMatrix transform_values(const TermMatrix& m, Weighting scheme, Fn&& fn) {
  TermMatrix out;
  out.rows = m.rows;
  out.cols = m.cols;
  out.scheme = scheme;
  out.doc_ids = m.doc_ids;
  out.row_ptr.assign(1, 0);
  out.row_ptr.reserve(m.rows + 1);
  out.col_idx.reserve(m.col_idx.size());
  out.values.reserve(m.values.size());
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
      const double v = fn(r, m.col_idx[k], m.values[k]);
      if (v != 0.0) {
        out.col_idx.push_back(m.col_idx[k]);
        out.values.push_back(v);
      }
    }
    out.row_ptr.push_back(out.values.size());
  }
  return out;
}

}  // namespace

std::string_view to_string(Weighting scheme) {
  switch (scheme) {
    case Weighting::frequency: return "frequency";
    case Weighting::probability: return "probability";
    case Weighting::boolean: return "boolean";
    case Weighting::tfidf: return "tfidf";
  }
  return "unknown";
}

Weighting parse_weighting(std::string_view name) {
  if (name == "frequency") return Weighting::frequency;
  if (name == "probability") return Weighting::probability;
  if (name == "boolean") return Weighting::boolean;
  if (name == "tfidf") return Weighting::tfidf;
  throw InvalidArgument("unknown weighting scheme '" + std::string(name) + "'");
}

double TermMatrix::row_sum(std::size_t row) const {
  double sum = 0.0;
  for (double v : row_values(row)) sum += v;
  return sum;
}

Eigen::VectorXd TermMatrix::dense_row(std::size_t row) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cols));
  const auto c = row_columns(row);
  const auto v = row_values(row);
  for (std::size_t k = 0; k < c.size(); ++k) out[c[k]] = v[k];
  return out;
}

Eigen::MatrixXd TermMatrix::to_dense() const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows),
                                              static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      out(static_cast<Eigen::Index>(r), col_idx[k]) = values[k];
    }
  }
  return out;
}

Eigen::VectorXd TermMatrix::dense_column(std::size_t col) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    const auto c = row_columns(r);
    const auto it = std::lower_bound(c.begin(), c.end(), col);
    if (it != c.end() && *it == col) {
      out[static_cast<Eigen::Index>(r)] = values[row_ptr[r] + (it - c.begin())];
    }
  }
  return out;
}

TermMatrix TermMatrix::select_rows(std::span<const std::size_t> rows_to_keep) const {
  TermMatrix out;
  out.rows = rows_to_keep.size();
  out.cols = cols;
  out.scheme = scheme;
  out.row_ptr.assign(1, 0);
  for (std::size_t r : rows_to_keep) {
    if (r >= rows) throw InvalidArgument("select_rows: row index out of range");
    out.col_idx.insert(out.col_idx.end(), col_idx.begin() + row_ptr[r],
                       col_idx.begin() + row_ptr[r + 1]);
    out.values.insert(out.values.end(), values.begin() + row_ptr[r],
                      values.begin() + row_ptr[r + 1]);
    out.row_ptr.push_back(out.values.size());
    if (!doc_ids.empty()) out.doc_ids.push_back(doc_ids[r]);
  }
  return out;
}

TermMatrix build_tfm(std::span<const CleanDocument> docs, const Vocabulary& vocab) {
  TermMatrix m;
  m.rows = docs.size();
  m.cols = vocab.size();
  m.scheme = Weighting::frequency;
  m.row_ptr.reserve(docs.size() + 1);
  m.doc_ids.reserve(docs.size());
  std::map<std::uint32_t, double> counts;
  for (const auto& doc : docs) {
    counts.clear();
    for (const auto& token : doc.tokens) {
      if (const auto idx = vocab.index_of(token)) {
        counts[static_cast<std::uint32_t>(*idx)] += 1.0;
      }
    }
    for (const auto& [col, count] : counts) {
      m.col_idx.push_back(col);
      m.values.push_back(count);
    }
    m.row_ptr.push_back(m.values.size());
    m.doc_ids.push_back(doc.id);
  }
  return m;
}

TermMatrix to_probability(const TermMatrix& m) {
  require_scheme(m, Weighting::frequency, "to_probability");
  std::vector<double> sums(m.rows);
  for (std::size_t r = 0; r < m.rows; ++r) sums[r] = m.row_sum(r);
  return transform_values(m, Weighting::probability,
                          [&](std::size_t r, std::uint32_t, double v) { return v / sums[r]; });
}

TermMatrix to_boolean(const TermMatrix& m) {
  require_scheme(m, Weighting::frequency, "to_boolean");
  return transform_values(m, Weighting::boolean,
                          [](std::size_t, std::uint32_t, double v) { return v > 0.0 ? 1.0 : 0.0; });
}

std::vector<double> inverse_document_frequency(const TermMatrix& m) {
  std::vector<double> df(m.cols, 0.0);
  for (std::uint32_t c : m.col_idx) df[c] += 1.0;
  std::vector<double> idf(m.cols);
  const double p = static_cast<double>(m.rows);
  for (std::size_t j = 0; j < m.cols; ++j) idf[j] = std::log((1.0 + p) / (1.0 + df[j]));
  return idf;
}

TermMatrix apply_idf(const TermMatrix& probability, std::span<const double> idf) {
  require_scheme(probability, Weighting::probability, "apply_idf");
  if (idf.size() != probability.cols) {
    throw InvalidArgument("apply_idf: idf length does not match column count");
  }
  return transform_values(probability, Weighting::tfidf,
                          [&](std::size_t, std::uint32_t c, double v) { return v * idf[c]; });
}

TermMatrix to_tfidf(const TermMatrix& m) {
  require_scheme(m, Weighting::frequency, "to_tfidf");
  if (m.rows == 0) throw InvalidArgument("to_tfidf: matrix has no rows");
  const auto idf = inverse_document_frequency(m);
  return apply_idf(to_probability(m), idf);
}

TermMatrix apply_weighting(const TermMatrix& frequency, Weighting scheme) {
  switch (scheme) {
    case Weighting::frequency:
      require_scheme(frequency, Weighting::frequency, "apply_weighting");
      return frequency;
    case Weighting::probability: return to_probability(frequency);
    case Weighting::boolean: return to_boolean(frequency);
    case Weighting::tfidf: return to_tfidf(frequency);
  }
  throw InvalidArgument("apply_weighting: unknown scheme");
}

Eigen::VectorXd vectorize_document(std::span<const std::string> tokens,
                                   const Vocabulary& vocab, Weighting scheme) {
  if (scheme == Weighting::tfidf) {
    throw InvalidArgument(
        "vectorize_document: tfidf needs corpus idf statistics; use the fitted model");
  }
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(vocab.size()));
  double total = 0.0;
  for (const auto& token : tokens) {
    if (const auto idx = vocab.index_of(token)) {
      v[static_cast<Eigen::Index>(*idx)] += 1.0;
      total += 1.0;
    }
  }
  if (scheme == Weighting::probability && total > 0.0) {
    v /= total;
  } else if (scheme == Weighting::boolean) {
    v = v.unaryExpr([](double x) { return x > 0.0 ? 1.0 : 0.0; });
  }
  return v;
}

void write_matrix_market(std::ostream& out, const TermMatrix& m) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << "% scheme: " << to_string(m.scheme) << '\n';
  out << m.rows << ' ' << m.cols << ' ' << m.nonzeros() << '\n';
  out << std::setprecision(17);
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
      out << (r + 1) << ' ' << (m.col_idx[k] + 1) << ' ' << m.values[k] << '\n';
    }
  }
}

}  // namespace gamecat
