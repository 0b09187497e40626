#include "nu_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <limits>

#include "gamecat/error.hpp"

namespace gamecat::detail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTau = 1e-12;  // floor for non-positive curvature

std::string format_violation(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

KernelRows::KernelRows(const Eigen::MatrixXd& points, std::span<const int> y, double gamma,
                       std::size_t cache_bytes)
    : columns_(points.transpose()),
      y_(y.begin(), y.end()),
      gamma_(gamma),
      rows_(y.size()),
      where_(y.size()),
      cached_(y.size(), false) {
  const std::size_t row_bytes = std::max<std::size_t>(1, y.size() * sizeof(double));
  capacity_ = std::max<std::size_t>(2, cache_bytes / row_bytes);
}

void KernelRows::compute_row(std::size_t i, std::vector<double>& out) const {
  out.resize(y_.size());
  const auto xi = columns_.col(static_cast<Eigen::Index>(i));
  for (std::size_t j = 0; j < y_.size(); ++j) {
    const double dist2 = (xi - columns_.col(static_cast<Eigen::Index>(j))).squaredNorm();
    out[j] = static_cast<double>(y_[i] * y_[j]) * std::exp(-gamma_ * dist2);
  }
}

const double* KernelRows::row(std::size_t i) {
  if (cached_[i]) {
    lru_.splice(lru_.end(), lru_, where_[i]);
    return rows_[i].data();
  }
  if (lru_.size() >= capacity_) {
    const std::size_t victim = lru_.front();
    lru_.pop_front();
    cached_[victim] = false;
    std::vector<double>().swap(rows_[victim]);
  }
  compute_row(i, rows_[i]);
  where_[i] = lru_.insert(lru_.end(), i);
  cached_[i] = true;
  return rows_[i].data();
}

NuSolution solve_nu(KernelRows& q, std::span<const int> y, std::span<const double> upper,
                    std::vector<double> alpha, double tolerance, long max_iterations) {
  const std::size_t m = y.size();
  auto at_upper = [&](std::size_t t) { return alpha[t] >= upper[t]; };
  auto at_lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

  // Pairwise updates preserve the per-label sums only up to rounding; the
  // starting sums are restored on a free variable at every refresh.
  long double target_pos = 0.0L, target_neg = 0.0L;
  for (std::size_t t = 0; t < m; ++t) (y[t] == +1 ? target_pos : target_neg) += alpha[t];
  auto restore_sums = [&] {
    for (const int label : {+1, -1}) {
      long double sum = 0.0L;
      std::ptrdiff_t roomiest = -1;
      double room = 0.0;
      for (std::size_t t = 0; t < m; ++t) {
        if (y[t] != label) continue;
        sum += alpha[t];
        const double slack = std::min(alpha[t], upper[t] - alpha[t]);
        if (slack > room) {
          room = slack;
          roomiest = static_cast<std::ptrdiff_t>(t);
        }
      }
      const double drift = static_cast<double>((label == +1 ? target_pos : target_neg) - sum);
      if (roomiest >= 0 && std::abs(drift) < room) alpha[static_cast<std::size_t>(roomiest)] += drift;
    }
  };

  std::vector<double> grad(m, 0.0);
  // Exact gradient, accumulated in extended precision. Incremental updates
  // drift over millions of iterations; refreshing bounds the drift.
  auto refresh_gradient = [&] {
    restore_sums();
    std::vector<long double> acc(m, 0.0L);
    for (std::size_t i = 0; i < m; ++i) {
      if (alpha[i] == 0.0) continue;
      const double* qi = q.row(i);
      for (std::size_t j = 0; j < m; ++j) acc[j] += static_cast<long double>(alpha[i]) * qi[j];
    }
    for (std::size_t j = 0; j < m; ++j) grad[j] = static_cast<double>(acc[j]);
  };
  refresh_gradient();
  const long refresh_period = std::max<long>(1'000'000, static_cast<long>(m) * 100);
  long last_refresh = 0;
  bool fresh = true;

  NuSolution out;
  long iter = 0;
  for (;;) {
    // Working set: within each label group, i maximizes the violation among
    // variables that can move up and j gives the largest second-order
    // decrease among those that can move down.
    double gmax_pos = -kInf, gmax_pos2 = -kInf;
    double gmax_neg = -kInf, gmax_neg2 = -kInf;
    std::ptrdiff_t ip = -1, in = -1;
    for (std::size_t t = 0; t < m; ++t) {
      if (y[t] == +1) {
        if (!at_upper(t) && -grad[t] >= gmax_pos) {
          gmax_pos = -grad[t];
          ip = static_cast<std::ptrdiff_t>(t);
        }
      } else if (!at_lower(t) && grad[t] >= gmax_neg) {
        gmax_neg = grad[t];
        in = static_cast<std::ptrdiff_t>(t);
      }
    }
    const double* q_ip = ip >= 0 ? q.row(static_cast<std::size_t>(ip)) : nullptr;
    const double* q_in = in >= 0 ? q.row(static_cast<std::size_t>(in)) : nullptr;

    std::ptrdiff_t jmin = -1;
    double best_decrease = kInf;
    for (std::size_t t = 0; t < m; ++t) {
      if (y[t] == +1) {
        if (at_lower(t)) continue;
        gmax_pos2 = std::max(gmax_pos2, grad[t]);
        const double diff = gmax_pos + grad[t];
        if (diff > 0.0) {
          const double quad = 2.0 - 2.0 * q_ip[t];
          const double decrease = -(diff * diff) / (quad > 0.0 ? quad : kTau);
          if (decrease <= best_decrease) {
            jmin = static_cast<std::ptrdiff_t>(t);
            best_decrease = decrease;
          }
        }
      } else {
        if (at_upper(t)) continue;
        gmax_neg2 = std::max(gmax_neg2, -grad[t]);
        const double diff = gmax_neg - grad[t];
        if (diff > 0.0) {
          const double quad = 2.0 - 2.0 * q_in[t];
          const double decrease = -(diff * diff) / (quad > 0.0 ? quad : kTau);
          if (decrease <= best_decrease) {
            jmin = static_cast<std::ptrdiff_t>(t);
            best_decrease = decrease;
          }
        }
      }
    }

    const double violation = std::max(gmax_pos + gmax_pos2, gmax_neg + gmax_neg2);
    out.max_violation = violation;
    if (violation < tolerance || jmin < 0) {
      if (fresh) break;
      refresh_gradient();
      fresh = true;
      last_refresh = iter;
      continue;
    }
    if (iter >= max_iterations) {
      throw ConvergenceError("nu-SVC solver: no convergence after " +
                                 std::to_string(iter) + " iterations (max violation " +
                                 format_violation(violation) + ")",
                             iter);
    }
    ++iter;

    const auto j = static_cast<std::size_t>(jmin);
    const auto i = static_cast<std::size_t>(y[j] == +1 ? ip : in);
    const double* qi = q.row(i);
    const double* qj = q.row(j);
    const double ci = upper[i];
    const double cj = upper[j];
    const double old_i = alpha[i];
    const double old_j = alpha[j];

    // Same-label pair: move along alpha_i + alpha_j = const inside the box.
    double quad = q.diagonal(i) + q.diagonal(j) - 2.0 * qi[j];
    if (quad <= 0.0) quad = kTau;
    const double delta = (grad[i] - grad[j]) / quad;
    const double sum = alpha[i] + alpha[j];
    alpha[i] -= delta;
    alpha[j] += delta;
    if (sum > ci) {
      if (alpha[i] > ci) {
        alpha[i] = ci;
        alpha[j] = sum - ci;
      }
    } else if (alpha[j] < 0.0) {
      alpha[j] = 0.0;
      alpha[i] = sum;
    }
    if (sum > cj) {
      if (alpha[j] > cj) {
        alpha[j] = cj;
        alpha[i] = sum - cj;
      }
    } else if (alpha[i] < 0.0) {
      alpha[i] = 0.0;
      alpha[j] = sum;
    }

    const double di = alpha[i] - old_i;
    const double dj = alpha[j] - old_j;
    for (std::size_t t = 0; t < m; ++t) grad[t] += qi[t] * di + qj[t] * dj;
    fresh = false;
    if (iter - last_refresh >= refresh_period) {
      refresh_gradient();
      fresh = true;
      last_refresh = iter;
    }
  }

  // Margin multipliers per label group: the mean gradient over free
  // variables, else the finite end of the interval allowed by bounded ones.
  auto multiplier = [&](int label) {
    double lower = -kInf, upper_bound = kInf, free_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t t = 0; t < m; ++t) {
      if (y[t] != label) continue;
      if (at_upper(t)) {
        lower = std::max(lower, grad[t]);
      } else if (at_lower(t)) {
        upper_bound = std::min(upper_bound, grad[t]);
      } else {
        ++free_count;
        free_sum += grad[t];
      }
    }
    if (free_count > 0) return free_sum / static_cast<double>(free_count);
    if (std::isinf(upper_bound)) return lower;
    if (std::isinf(lower)) return upper_bound;
    return (lower + upper_bound) / 2.0;
  };

  out.r_positive = multiplier(+1);
  out.r_negative = multiplier(-1);
  out.iterations = iter;
  out.alpha = std::move(alpha);
  out.gradient = std::move(grad);
  return out;
}

}  // namespace gamecat::detail
