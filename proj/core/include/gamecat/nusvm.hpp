#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace gamecat {

// exp(-gamma * ||x - z||^2). Throws InvalidArgument on a length mismatch.
double rbf(std::span<const double> x, std::span<const double> z, double gamma);

// Largest admissible nu for a binary problem with the given (possibly
// weighted) class sizes: 2 * min(pos, neg) / (pos + neg).
double nu_upper_bound(double positive, double negative);

// True iff nu lies in (0, nu_upper_bound]; the bound is inclusive.
bool nu_feasible(double positive, double negative, double nu);

struct SolverOptions {
  double tolerance = 1e-3;  // stop when the maximal KKT violation drops below
  long max_iterations = 10'000'000;
  std::size_t cache_megabytes = 200;  // kernel row cache
};

struct ClassWeights {
  double positive = 1.0;
  double negative = 1.0;
};

struct SolveInfo {
  long iterations = 0;
  double max_violation = 0.0;  // at termination, in the unscaled dual
  double margin = 0.0;         // r: dual coefficients are alpha_i * y_i / r
  double objective = 0.0;      // unscaled dual objective 1/2 a^T Q a
};

// f(x) = sum_i dual_coefs[i] * K(sv_i, x) - rho. Positive values select
// classes[0].
struct BinaryNuSvc {
  Eigen::MatrixXd support_vectors;  // one support vector per row
  std::vector<double> dual_coefs;
  double rho = 0.0;
  double nu = 0.0;
  double gamma = 0.0;
  std::array<std::string, 2> classes{"+1", "-1"};
  std::vector<std::size_t> support_indices;  // rows of the training matrix
  SolveInfo info;

  double decision_value(std::span<const double> x) const;
  double decision_value(const Eigen::VectorXd& x) const {
    return decision_value(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  }
};

// Solves the nu-SVC dual with a two-variable working-set decomposition.
// points holds one sample per row and labels are +1 / -1. Class weights
// scale the per-class box constraints and the feasibility bound.
// Throws InfeasibleNuError, ConvergenceError, InvalidArgument.
BinaryNuSvc train_binary(const Eigen::MatrixXd& points, std::span<const int> labels,
                         double gamma, double nu, ClassWeights weights = {},
                         const SolverOptions& options = {});

enum class BalancingKind { none, oversample, inverse_weights };

std::string_view to_string(BalancingKind kind);
BalancingKind parse_balancing(std::string_view name);

struct BalancingStrategy {
  BalancingKind kind = BalancingKind::none;
  std::optional<std::uint64_t> seed;  // set iff kind == oversample

  void validate() const;
};

// One-vs-one ensemble. binary_models follow the (i < j) order of classes;
// the model for (classes[i], classes[j]) treats classes[i] as positive.
struct MultiClassNuSvc {
  std::vector<std::string> classes;
  std::vector<BinaryNuSvc> binary_models;
  std::size_t total_support_vectors = 0;  // distinct training points
  Eigen::Index dimension = 0;
  double gamma = 0.0;
  double nu = 0.0;
};

MultiClassNuSvc train_multiclass(const Eigen::MatrixXd& points,
                                 std::span<const std::string> labels, double gamma,
                                 double nu, const BalancingStrategy& balancing = {},
                                 const SolverOptions& options = {}, unsigned threads = 1);

struct Prediction {
  std::string label;
  std::vector<int> votes;  // aligned with MultiClassNuSvc::classes

  bool operator==(const Prediction&) const = default;
};

// Majority vote. A decision value of exactly 0 and tied vote counts both go
// to the lexicographically smaller label.
Prediction predict(const MultiClassNuSvc& model, const Eigen::VectorXd& x);

struct ResampledSet {
  Eigen::MatrixXd points;
  std::vector<std::string> labels;
  std::vector<std::size_t> origin;  // source row of each output row
};

// Duplicates rows of minority classes, sampled with replacement, until every
// class matches the majority count. Original rows come first, in order.
ResampledSet oversample(const Eigen::MatrixXd& points, std::span<const std::string> labels,
                        std::uint64_t seed);

// total / (num_classes * count_c) per class.
std::map<std::string, double> inverse_weights(std::span<const std::string> labels);

}  // namespace gamecat
