#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "oracles.hpp"

namespace gamecat::oracle {
namespace {

Eigen::MatrixXd kernel_q(const Eigen::MatrixXd& x, std::span<const int> y, double gamma) {
  const Eigen::Index m = x.rows();
  Eigen::MatrixXd q(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      q(i, j) = y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)] *
                std::exp(-gamma * (x.row(i) - x.row(j)).squaredNorm());
    }
  }
  return q;
}

// Euclidean projection of v onto {0 <= a_i <= ub_i, sum a_i = target} for
// the indices in `members`, via bisection on the shift tau.
void project_box_simplex(Eigen::VectorXd& v, const std::vector<Eigen::Index>& members,
                         const Eigen::VectorXd& ub, double target) {
  auto total = [&](double tau) {
    double s = 0.0;
    for (auto i : members) s += std::clamp(v[i] - tau, 0.0, ub[i]);
    return s;
  };
  double lo = std::numeric_limits<double>::max(), hi = std::numeric_limits<double>::lowest();
  for (auto i : members) {
    lo = std::min(lo, v[i] - ub[i]);
    hi = std::max(hi, v[i]);
  }
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (total(mid) > target) lo = mid;
    else hi = mid;
  }
  const double tau = 0.5 * (lo + hi);
  for (auto i : members) v[i] = std::clamp(v[i] - tau, 0.0, ub[i]);
}

struct Multipliers {
  double positive = 0.0;
  double negative = 0.0;
};

// r_c from free variables, else the midpoint of the admissible interval
// (or its finite end).
double class_multiplier(const Eigen::VectorXd& a, const Eigen::VectorXd& g,
                        const Eigen::VectorXd& ub, const std::vector<Eigen::Index>& members,
                        double free_tol) {
  double sum = 0.0;
  int free = 0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  for (auto i : members) {
    if (a[i] > free_tol && a[i] < ub[i] - free_tol) {
      sum += g[i];
      ++free;
    } else if (a[i] >= ub[i] - free_tol) {
      lower = std::max(lower, g[i]);
    } else {
      upper = std::min(upper, g[i]);
    }
  }
  if (free > 0) return sum / free;
  if (std::isinf(lower)) return upper;
  if (std::isinf(upper)) return lower;
  return 0.5 * (lower + upper);
}

}  // namespace

double NuSvcReference::decision(const Eigen::MatrixXd& points, std::span<const int> y,
                                double gamma, const Eigen::VectorXd& x) const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    s += alpha[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)] *
         std::exp(-gamma * (points.row(i).transpose() - x).squaredNorm());
  }
  const double r = 0.5 * (r_positive + r_negative);
  return (s - 0.5 * (r_positive - r_negative)) / r;
}

NuSvcReference solve_nu_svc(const Eigen::MatrixXd& points, std::span<const int> y, double gamma,
                            double nu, double weight_positive, double weight_negative) {
  const Eigen::Index m = points.rows();
  const Eigen::MatrixXd q = kernel_q(points, y, gamma);
  std::vector<Eigen::Index> pos, neg;
  Eigen::VectorXd ub(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (y[static_cast<std::size_t>(i)] > 0) {
      pos.push_back(i);
      ub[i] = weight_positive;
    } else {
      neg.push_back(i);
      ub[i] = weight_negative;
    }
  }
  const double mass = weight_positive * static_cast<double>(pos.size()) +
                      weight_negative * static_cast<double>(neg.size());
  const double target = nu * mass / 2.0;

  auto project = [&](Eigen::VectorXd& v) {
    project_box_simplex(v, pos, ub, target);
    project_box_simplex(v, neg, ub, target);
  };

  // FISTA with adaptive restart.
  const double lipschitz =
      std::max(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(q, Eigen::EigenvaluesOnly)
                   .eigenvalues()
                   .maxCoeff(),
               1e-12);
  Eigen::VectorXd a = Eigen::VectorXd::Constant(m, 0.0);
  project(a);
  Eigen::VectorXd z = a, prev = a;
  double t = 1.0;
  for (int it = 0; it < 50000; ++it) {
    Eigen::VectorXd next = z - (q * z) / lipschitz;
    project(next);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    if ((next - a).dot(a - prev) < 0.0 && it > 0) {
      t = 1.0;
    }
    z = next + ((t - 1.0) / t_next) * (next - a);
    prev = a;
    a = next;
    t = t_next;
    if (it > 100 && (a - prev).lpNorm<Eigen::Infinity>() < 1e-15) break;
  }

  NuSvcReference out;
  // Active-set refinement seeded from the first-order solution. state: 0 at
  // the lower bound, 1 free, 2 at the upper bound.
  const double tol = 1e-7;
  std::vector<int> state(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    state[static_cast<std::size_t>(i)] = a[i] <= tol ? 0 : (a[i] >= ub[i] - tol ? 2 : 1);
  }
  for (int round = 0; round < 400; ++round) {
    std::vector<Eigen::Index> free;
    Eigen::VectorXd fixed = Eigen::VectorXd::Zero(m);
    bool has_free_pos = false, has_free_neg = false;
    for (Eigen::Index i = 0; i < m; ++i) {
      const int st = state[static_cast<std::size_t>(i)];
      if (st == 1) {
        free.push_back(i);
        (y[static_cast<std::size_t>(i)] > 0 ? has_free_pos : has_free_neg) = true;
      } else if (st == 2) {
        fixed[i] = ub[i];
      }
    }
    if (!has_free_pos || !has_free_neg) break;
    const auto f = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(f + 2, f + 2);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(f + 2);
    const Eigen::VectorXd qfixed = q * fixed;
    double fixed_pos = 0.0, fixed_neg = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      (y[static_cast<std::size_t>(i)] > 0 ? fixed_pos : fixed_neg) += fixed[i];
    }
    for (Eigen::Index r = 0; r < f; ++r) {
      const Eigen::Index i = free[static_cast<std::size_t>(r)];
      for (Eigen::Index c = 0; c < f; ++c) kkt(r, c) = q(i, free[static_cast<std::size_t>(c)]);
      const Eigen::Index cls = y[static_cast<std::size_t>(i)] > 0 ? f : f + 1;
      kkt(r, cls) = -1.0;
      kkt(cls, r) = 1.0;
      rhs[r] = -qfixed[i];
    }
    rhs[f] = target - fixed_pos;
    rhs[f + 1] = target - fixed_neg;
    const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
    if (!sol.allFinite()) break;

    // Primal feasibility: pin the worst bound violation and retry.
    Eigen::Index worst = -1;
    double worst_amount = 1e-13;
    for (Eigen::Index r = 0; r < f; ++r) {
      const Eigen::Index i = free[static_cast<std::size_t>(r)];
      const double over = std::max(-sol[r], sol[r] - ub[i]);
      if (over > worst_amount) {
        worst_amount = over;
        worst = r;
      }
    }
    if (worst >= 0) {
      const Eigen::Index i = free[static_cast<std::size_t>(worst)];
      state[static_cast<std::size_t>(i)] = sol[worst] < 0.0 ? 0 : 2;
      continue;
    }

    Eigen::VectorXd candidate = fixed;
    for (Eigen::Index r = 0; r < f; ++r) {
      candidate[free[static_cast<std::size_t>(r)]] = std::clamp(sol[r], 0.0, ub[free[static_cast<std::size_t>(r)]]);
    }
    // Dual feasibility: release the worst multiplier sign violation.
    const Eigen::VectorXd g = q * candidate;
    const double rp = sol[f], rn = sol[f + 1];
    worst = -1;
    worst_amount = 1e-12;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double r = y[static_cast<std::size_t>(i)] > 0 ? rp : rn;
      const int st = state[static_cast<std::size_t>(i)];
      const double violation = st == 0 ? r - g[i] : (st == 2 ? g[i] - r : 0.0);
      if (violation > worst_amount) {
        worst_amount = violation;
        worst = i;
      }
    }
    if (worst >= 0) {
      state[static_cast<std::size_t>(worst)] = 1;
      continue;
    }
    out.alpha.assign(candidate.data(), candidate.data() + m);
    out.r_positive = rp;
    out.r_negative = rn;
    out.polished = true;
    return out;
  }

  const Eigen::VectorXd g = q * a;
  out.alpha.assign(a.data(), a.data() + m);
  out.r_positive = class_multiplier(a, g, ub, pos, tol);
  out.r_negative = class_multiplier(a, g, ub, neg, tol);
  return out;
}

}  // namespace gamecat::oracle
