#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "gamecat/dtm.hpp"

namespace gamecat {

// Rank-k truncation A_k = U * diag(d) * V^T. Each column of v has its
// largest-magnitude entry positive (first index on ties).
struct SvdFactors {
  Eigen::MatrixXd u;  // p x k
  Eigen::VectorXd d;  // k, non-increasing
  Eigen::MatrixXd v;  // n x k

  Eigen::Index k() const noexcept { return d.size(); }
};

struct SvdOptions {
  // Matrices with at most this many entries are factorized densely.
  std::size_t dense_entry_limit = 25'000'000;
  // Subspace iteration (large matrices only).
  int oversampling = 16;
  int max_iterations = 500;
  double residual_tolerance = 1e-9;  // relative to d_1
  std::uint64_t seed = 0x5eedULL;
};

// Throws InvalidArgument unless 1 <= k <= min(p, n) and DataError when A has
// no nonzero entry.
SvdFactors truncated_svd(const TermMatrix& a, int k, const SvdOptions& options = {});
SvdFactors truncated_svd(const Eigen::MatrixXd& a, int k, const SvdOptions& options = {});

// Maps term vectors (length n) into the k-dimensional latent space.
class LsiProjector {
 public:
  LsiProjector() = default;
  LsiProjector(Eigen::MatrixXd v, Eigen::VectorXd d);
  explicit LsiProjector(const SvdFactors& factors) : LsiProjector(factors.v, factors.d) {}

  Eigen::Index vocab_size() const noexcept { return v_.rows(); }
  Eigen::Index k() const noexcept { return v_.cols(); }
  const Eigen::MatrixXd& v() const noexcept { return v_; }
  const Eigen::VectorXd& d() const noexcept { return d_; }

  // b * V_k. The whitened coordinates rescaled by the singular values, which
  // needs no inverse of D_k.
  Eigen::VectorXd project(const Eigen::VectorXd& b) const;

  // b * V_k * D_k^-1. Throws InvalidArgument if a retained value is zero.
  Eigen::VectorXd project_whitened(const Eigen::VectorXd& b) const;

  // Row-wise project() of a sparse matrix; result is rows x k.
  Eigen::MatrixXd project_rows(const TermMatrix& m) const;

 private:
  void check_length(const Eigen::VectorXd& b) const;

  Eigen::MatrixXd v_;
  Eigen::VectorXd d_;
};

// (1-based index, singular value) pairs in stored order.
std::vector<std::pair<int, double>> singular_value_report(const SvdFactors& factors);

}  // namespace gamecat
