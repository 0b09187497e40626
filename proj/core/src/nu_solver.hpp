#pragma once

#include <cstddef>
#include <list>
#include <vector>

#include <Eigen/Core>

#include "gamecat/nusvm.hpp"

namespace gamecat::detail {

// Rows of Q_ij = y_i y_j K(x_i, x_j) for the RBF kernel, computed on demand
// and kept in an LRU cache bounded by a byte budget (at least two rows).
class KernelRows {
 public:
  KernelRows(const Eigen::MatrixXd& points, std::span<const int> y, double gamma,
             std::size_t cache_bytes);

  std::size_t size() const noexcept { return y_.size(); }
  const double* row(std::size_t i);
  double diagonal(std::size_t) const noexcept { return 1.0; }

 private:
  void compute_row(std::size_t i, std::vector<double>& out) const;

  Eigen::MatrixXd columns_;  // one point per column
  std::vector<int> y_;
  double gamma_;
  std::size_t capacity_;
  std::vector<std::vector<double>> rows_;
  std::list<std::size_t> lru_;
  std::vector<std::list<std::size_t>::iterator> where_;
  std::vector<bool> cached_;
};

struct NuSolution {
  std::vector<double> alpha;
  std::vector<double> gradient;
  double r_positive = 0.0;
  double r_negative = 0.0;
  long iterations = 0;
  double max_violation = 0.0;
};

// Minimizes 1/2 a^T Q a subject to sum_{y=+1} a = sum_{y=-1} a = target and
// 0 <= a_i <= upper[i], starting from a feasible alpha.
NuSolution solve_nu(KernelRows& q, std::span<const int> y, std::span<const double> upper,
                    std::vector<double> alpha, double tolerance, long max_iterations);

}  // namespace gamecat::detail
