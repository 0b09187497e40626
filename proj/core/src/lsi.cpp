#include "gamecat/lsi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/QR>
#include <Eigen/SVD>
#include <Eigen/SparseCore>

#include "gamecat/error.hpp"
#include "gamecat/random.hpp"

namespace gamecat {
namespace {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

void check_rank(Eigen::Index p, Eigen::Index n, int k) {
  if (k < 1 || k > std::min(p, n)) {
    throw InvalidArgument("truncated_svd: k = " + std::to_string(k) +
                          " outside [1, min(p, n) = " +
                          std::to_string(std::min(p, n)) + "]");
  }
}

// Sign convention and tie order. Flips (u_i, v_i) so the largest-magnitude
// entry of v_i is positive, then orders components by non-increasing d with
// exact ties broken by lexicographic order of v columns.
SvdFactors canonicalize(Eigen::MatrixXd u, Eigen::VectorXd d, Eigen::MatrixXd v) {
  for (Eigen::Index i = 0; i < v.cols(); ++i) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      if (std::abs(v(r, i)) > best) {
        best = std::abs(v(r, i));
        arg = r;
      }
    }
    if (v(arg, i) < 0.0) {
      v.col(i) *= -1.0;
      u.col(i) *= -1.0;
    }
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (d[a] != d[b]) return d[a] > d[b];
    return std::lexicographical_compare(v.col(a).begin(), v.col(a).end(),
                                        v.col(b).begin(), v.col(b).end());
  });
  SvdFactors out;
  out.u.resize(u.rows(), u.cols());
  out.v.resize(v.rows(), v.cols());
  out.d.resize(d.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto dst = static_cast<Eigen::Index>(i);
    out.u.col(dst) = u.col(order[i]);
    out.v.col(dst) = v.col(order[i]);
    out.d[dst] = d[order[i]];
  }
  return out;
}

SvdFactors dense_svd(const Eigen::MatrixXd& a, int k) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return canonicalize(svd.matrixU().leftCols(k), svd.singularValues().head(k),
                      svd.matrixV().leftCols(k));
}

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

Eigen::MatrixXd gaussian_block(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      // Box-Muller on the raw stream keeps draws platform independent.
      const double u1 = 1.0 - uniform_unit(rng);
      const double u2 = uniform_unit(rng);
      out(i, j) = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
  }
  return out;
}

// Block subspace iteration on A^T A with a Rayleigh-Ritz step each sweep.
SvdFactors iterative_svd(const SparseRowMatrix& a, int k, const SvdOptions& options) {
  const Eigen::Index p = a.rows();
  const Eigen::Index n = a.cols();
  const Eigen::Index block =
      std::min<Eigen::Index>(std::min(p, n), k + std::max(options.oversampling, 0));
  Rng rng(options.seed);
  Eigen::MatrixXd q = orthonormal_basis(a * gaussian_block(n, block, rng));

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const Eigen::MatrixXd bt = a.transpose() * q;  // n x block, B = Q^T A
    Eigen::JacobiSVD<Eigen::MatrixXd> small(bt.transpose(),
                                            Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::MatrixXd u = q * small.matrixU().leftCols(k);
    const Eigen::VectorXd d = small.singularValues().head(k);
    const Eigen::MatrixXd v = small.matrixV().leftCols(k);

    const Eigen::MatrixXd residual = a * v - u * d.asDiagonal();
    const double limit = options.residual_tolerance * std::max(d[0], 1e-300);
    bool converged = true;
    for (Eigen::Index i = 0; i < k && converged; ++i) {
      converged = residual.col(i).norm() <= limit;
    }
    if (converged) return canonicalize(u, d, v);

    q = orthonormal_basis(a * orthonormal_basis(bt));
  }
  throw ConvergenceError("truncated_svd: subspace iteration did not converge",
                         options.max_iterations);
}

SparseRowMatrix to_sparse(const TermMatrix& m) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(m.nonzeros());
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
      triplets.emplace_back(static_cast<int>(r), static_cast<int>(m.col_idx[k]), m.values[k]);
    }
  }
  SparseRowMatrix out(static_cast<Eigen::Index>(m.rows), static_cast<Eigen::Index>(m.cols));
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

}  // namespace

SvdFactors truncated_svd(const TermMatrix& a, int k, const SvdOptions& options) {
  check_rank(static_cast<Eigen::Index>(a.rows), static_cast<Eigen::Index>(a.cols), k);
  if (std::none_of(a.values.begin(), a.values.end(), [](double v) { return v != 0.0; })) {
    throw DataError("truncated_svd: matrix is all zero");
  }
  if (a.rows * a.cols <= options.dense_entry_limit) return dense_svd(a.to_dense(), k);
  return iterative_svd(to_sparse(a), k, options);
}

SvdFactors truncated_svd(const Eigen::MatrixXd& a, int k, const SvdOptions& options) {
  check_rank(a.rows(), a.cols(), k);
  if (a.size() == 0 || a.cwiseAbs().maxCoeff() == 0.0) {
    throw DataError("truncated_svd: matrix is all zero");
  }
  if (static_cast<std::size_t>(a.size()) <= options.dense_entry_limit) return dense_svd(a, k);
  return iterative_svd(a.sparseView(), k, options);
}

LsiProjector::LsiProjector(Eigen::MatrixXd v, Eigen::VectorXd d)
    : v_(std::move(v)), d_(std::move(d)) {
  if (v_.cols() != d_.size()) {
    throw InvalidArgument("LsiProjector: v has " + std::to_string(v_.cols()) +
                          " columns but " + std::to_string(d_.size()) +
                          " singular values given");
  }
}

void LsiProjector::check_length(const Eigen::VectorXd& b) const {
  if (b.size() != v_.rows()) {
    throw InvalidArgument("project: term vector has length " + std::to_string(b.size()) +
                          ", expected " + std::to_string(v_.rows()));
  }
}

Eigen::VectorXd LsiProjector::project(const Eigen::VectorXd& b) const {
  check_length(b);
  return v_.transpose() * b;
}

Eigen::VectorXd LsiProjector::project_whitened(const Eigen::VectorXd& b) const {
  check_length(b);
  if ((d_.array() == 0.0).any()) {
    throw InvalidArgument("project_whitened: singular scaling, a retained singular value is 0");
  }
  return (v_.transpose() * b).cwiseQuotient(d_);
}

Eigen::MatrixXd LsiProjector::project_rows(const TermMatrix& m) const {
  if (static_cast<Eigen::Index>(m.cols) != v_.rows()) {
    throw InvalidArgument("project_rows: matrix has " + std::to_string(m.cols) +
                          " columns, expected " + std::to_string(v_.rows()));
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.rows), k());
  for (std::size_t r = 0; r < m.rows; ++r) {
    const auto cols = m.row_columns(r);
    const auto vals = m.row_values(r);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out.row(static_cast<Eigen::Index>(r)) += vals[j] * v_.row(cols[j]);
    }
  }
  return out;
}

std::vector<std::pair<int, double>> singular_value_report(const SvdFactors& factors) {
  std::vector<std::pair<int, double>> out;
  out.reserve(static_cast<std::size_t>(factors.d.size()));
  for (Eigen::Index i = 0; i < factors.d.size(); ++i) {
    out.emplace_back(static_cast<int>(i + 1), factors.d[i]);
  }
  return out;
}

}  // namespace gamecat
