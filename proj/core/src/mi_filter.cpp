#include "gamecat/mi_filter.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <set>

#include "csv_reader.hpp"
#include "gamecat/error.hpp"
#include "gamecat/parallel.hpp"

namespace gamecat {
namespace {

#if defined(__SIZEOF_FLOAT128__)
__extension__ typedef __float128 Wide;
#else
typedef long double Wide;
#endif

// True iff x lies at or above edge b, i.e. bins * (x - lo) >= b * (hi - lo),
// evaluated in extended precision so edge samples land in the upper bin.
bool at_or_above_edge(double x, double lo, double hi, int bins, int b) {
  return static_cast<Wide>(bins) * (static_cast<Wide>(x) - static_cast<Wide>(lo)) >=
         static_cast<Wide>(b) * (static_cast<Wide>(hi) - static_cast<Wide>(lo));
}

// Bin b holds lo + b * w <= x < lo + (b + 1) * w with w = (hi - lo) / bins;
// the top bin also holds hi. All samples share bin 0 when the range is empty.
std::vector<int> discretize(std::span<const double> x, int bins) {
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  std::vector<int> out(x.size(), 0);
  if (!(hi > lo)) return out;
  const double scale = static_cast<double>(bins) / (hi - lo);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == lo) continue;
    if (x[i] == hi) {
      out[i] = bins - 1;
      continue;
    }
    const double t = (x[i] - lo) * scale;
    int b = std::clamp(static_cast<int>(std::floor(t)), 0, bins - 1);
    if (std::abs(t - std::round(t)) < 1e-6) {
      while (b + 1 < bins && at_or_above_edge(x[i], lo, hi, bins, b + 1)) ++b;
      while (b > 0 && !at_or_above_edge(x[i], lo, hi, bins, b)) --b;
    }
    out[i] = b;
  }
  return out;
}

double entropy_bits(std::span<const double> counts, double total) {
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) {
      const double p = c / total;
      h -= p * std::log2(p);
    }
  }
  return h;
}

// I = H(X) + H(Y) - H(X, Y) from a bins x 2 joint count table.
double mi_from_bins(std::span<const int> bin_of, std::span<const std::uint8_t> y, int bins) {
  std::vector<double> joint(static_cast<std::size_t>(bins) * 2, 0.0);
  std::vector<double> marginal_x(static_cast<std::size_t>(bins), 0.0);
  double marginal_y[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < bin_of.size(); ++i) {
    const int yi = y[i] ? 1 : 0;
    joint[static_cast<std::size_t>(bin_of[i]) * 2 + yi] += 1.0;
    marginal_x[static_cast<std::size_t>(bin_of[i])] += 1.0;
    marginal_y[yi] += 1.0;
  }
  const double n = static_cast<double>(bin_of.size());
  const double mi = entropy_bits(marginal_x, n) + entropy_bits(marginal_y, n) -
                    entropy_bits(joint, n);
  // Cancellation can leave a tiny negative residue for independent inputs.
  return std::max(mi, 0.0);
}

}  // namespace

void SelectionRule::validate() const {
  if (!(threshold_bits >= 0.0) || !std::isfinite(threshold_bits)) {
    throw InvalidArgument("mi threshold must be a finite non-negative number of bits");
  }
  if (bins < 2) throw InvalidArgument("mi bins must be at least 2");
}

double estimate_mi(std::span<const double> x, std::span<const std::uint8_t> y, int bins) {
  if (x.size() != y.size()) {
    throw InvalidArgument("estimate_mi: x and y lengths differ");
  }
  if (x.size() < 2) throw InvalidArgument("estimate_mi: need at least two samples");
  if (bins < 1) throw InvalidArgument("estimate_mi: bins must be positive");
  for (double v : x) {
    if (!std::isfinite(v)) throw InvalidArgument("estimate_mi: non-finite sample");
  }
  const auto bin_of = discretize(x, bins);
  return mi_from_bins(bin_of, y, bins);
}

MiTable compute_mi_table(const TermMatrix& m, std::span<const std::string> labels,
                         const Vocabulary& vocab, const SelectionRule& rule,
                         unsigned threads) {
  rule.validate();
  if (m.scheme != Weighting::probability) {
    throw InvalidArgument("compute_mi_table: expected a probability matrix");
  }
  if (labels.size() != m.rows) {
    throw InvalidArgument("compute_mi_table: one label per document required");
  }
  if (vocab.size() != m.cols) {
    throw InvalidArgument("compute_mi_table: vocabulary does not match matrix columns");
  }
  if (m.rows < 2) throw DataError("compute_mi_table: need at least two documents");

  MiTable table;
  table.terms = vocab.terms();
  const std::set<std::string> distinct(labels.begin(), labels.end());
  table.categories.assign(distinct.begin(), distinct.end());
  const std::size_t num_categories = table.categories.size();

  std::vector<std::vector<std::uint8_t>> indicators(num_categories,
                                                    std::vector<std::uint8_t>(m.rows));
  for (std::size_t r = 0; r < m.rows; ++r) {
    const auto c = static_cast<std::size_t>(
        std::lower_bound(table.categories.begin(), table.categories.end(), labels[r]) -
        table.categories.begin());
    indicators[c][r] = 1;
  }

  // Column-major copy of the sparse matrix so each term is a contiguous run.
  std::vector<std::size_t> col_ptr(m.cols + 1, 0);
  for (std::uint32_t c : m.col_idx) ++col_ptr[c + 1];
  for (std::size_t j = 0; j < m.cols; ++j) col_ptr[j + 1] += col_ptr[j];
  std::vector<std::size_t> col_rows(m.nonzeros());
  std::vector<double> col_vals(m.nonzeros());
  {
    std::vector<std::size_t> cursor(col_ptr.begin(), col_ptr.end() - 1);
    for (std::size_t r = 0; r < m.rows; ++r) {
      for (std::size_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
        const std::size_t slot = cursor[m.col_idx[k]]++;
        col_rows[slot] = r;
        col_vals[slot] = m.values[k];
      }
    }
  }

  table.values.resize(static_cast<Eigen::Index>(m.cols),
                      static_cast<Eigen::Index>(num_categories));
  parallel_for(m.cols, threads, [&](std::size_t j) {
    std::vector<double> column(m.rows, 0.0);
    for (std::size_t k = col_ptr[j]; k < col_ptr[j + 1]; ++k) column[col_rows[k]] = col_vals[k];
    const auto bin_of = discretize(column, rule.bins);
    for (std::size_t c = 0; c < num_categories; ++c) {
      table.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)) =
          mi_from_bins(bin_of, indicators[c], rule.bins);
    }
  });
  return table;
}

std::vector<std::size_t> select_terms(const MiTable& table, const SelectionRule& rule) {
  std::vector<std::size_t> selected;
  for (Eigen::Index j = 0; j < table.values.rows(); ++j) {
    if (table.values.cols() > 0 && table.values.row(j).maxCoeff() > rule.threshold_bits) {
      selected.push_back(static_cast<std::size_t>(j));
    }
  }
  return selected;
}

Vocabulary filter_vocabulary(const Vocabulary& vocab, std::span<const std::size_t> selected) {
  if (selected.empty()) throw DataError("filter_vocabulary: no terms selected");
  std::vector<std::string> terms;
  terms.reserve(selected.size());
  for (std::size_t i = 0; i < selected.size(); ++i) {
    if (selected[i] >= vocab.size() || (i > 0 && selected[i] <= selected[i - 1])) {
      throw InvalidArgument("filter_vocabulary: indices must be sorted, unique and in range");
    }
    terms.push_back(vocab.term(selected[i]));
  }
  return Vocabulary(std::move(terms));
}

void write_mi_csv(std::ostream& out, const MiTable& table) {
  out << "term,category,mi_bits\n" << std::setprecision(17);
  for (std::size_t j = 0; j < table.terms.size(); ++j) {
    for (std::size_t c = 0; c < table.categories.size(); ++c) {
      out << detail::csv_escape(table.terms[j]) << ',' << detail::csv_escape(table.categories[c]) << ','
          << table.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c))
          << '\n';
    }
  }
}

}  // namespace gamecat
