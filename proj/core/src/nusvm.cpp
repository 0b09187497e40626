#include "gamecat/nusvm.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gamecat/error.hpp"
#include "gamecat/parallel.hpp"
#include "gamecat/random.hpp"
#include "nu_solver.hpp"

namespace gamecat {
namespace {

constexpr double kBoundSlack = 1e-12;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<std::string> sorted_classes(std::span<const std::string> labels) {
  const std::set<std::string> distinct(labels.begin(), labels.end());
  return {distinct.begin(), distinct.end()};
}

std::size_t class_index(const std::vector<std::string>& classes, const std::string& label) {
  return static_cast<std::size_t>(
      std::lower_bound(classes.begin(), classes.end(), label) - classes.begin());
}

}  // namespace

double rbf(std::span<const double> x, std::span<const double> z, double gamma) {
  if (x.size() != z.size()) {
    throw InvalidArgument("rbf: vectors have lengths " + std::to_string(x.size()) + " and " +
                          std::to_string(z.size()));
  }
  double dist2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = x[i] - z[i];
    dist2 += diff * diff;
  }
  return std::exp(-gamma * dist2);
}

double nu_upper_bound(double positive, double negative) {
  return 2.0 * std::min(positive, negative) / (positive + negative);
}

bool nu_feasible(double positive, double negative, double nu) {
  if (!(positive > 0.0) || !(negative > 0.0) || !(nu > 0.0)) return false;
  return nu <= nu_upper_bound(positive, negative) * (1.0 + kBoundSlack);
}

double BinaryNuSvc::decision_value(std::span<const double> x) const {
  if (static_cast<Eigen::Index>(x.size()) != support_vectors.cols()) {
    throw InvalidArgument("decision_value: input has dimension " + std::to_string(x.size()) +
                          ", model expects " + std::to_string(support_vectors.cols()));
  }
  const Eigen::Map<const Eigen::VectorXd> point(x.data(), static_cast<Eigen::Index>(x.size()));
  double sum = 0.0;
  for (Eigen::Index i = 0; i < support_vectors.rows(); ++i) {
    const double dist2 = (support_vectors.row(i).transpose() - point).squaredNorm();
    sum += dual_coefs[static_cast<std::size_t>(i)] * std::exp(-gamma * dist2);
  }
  return sum - rho;
}

BinaryNuSvc train_binary(const Eigen::MatrixXd& points, std::span<const int> labels,
                         double gamma, double nu, ClassWeights weights,
                         const SolverOptions& options) {
  const auto m = static_cast<std::size_t>(points.rows());
  if (labels.size() != m) {
    throw InvalidArgument("train_binary: " + std::to_string(labels.size()) + " labels for " +
                          std::to_string(m) + " points");
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw InvalidArgument("train_binary: gamma must be finite and non-negative");
  }
  if (!(weights.positive > 0.0) || !(weights.negative > 0.0)) {
    throw InvalidArgument("train_binary: class weights must be positive");
  }
  std::size_t count_pos = 0, count_neg = 0;
  for (int label : labels) {
    if (label == +1) ++count_pos;
    else if (label == -1) ++count_neg;
    else throw InvalidArgument("train_binary: labels must be +1 or -1");
  }
  if (count_pos == 0 || count_neg == 0) {
    throw InvalidArgument("train_binary: both classes must be present");
  }
  const double mass_pos = weights.positive * static_cast<double>(count_pos);
  const double mass_neg = weights.negative * static_cast<double>(count_neg);
  if (!nu_feasible(mass_pos, mass_neg, nu)) {
    throw InfeasibleNuError("infeasible nu: " + format_double(nu) + " exceeds bound " +
                            format_double(nu_upper_bound(mass_pos, mass_neg)) +
                            " for class sizes (" + std::to_string(count_pos) + ", " +
                            std::to_string(count_neg) + ")");
  }

  std::vector<double> upper(m);
  std::vector<double> alpha(m, 0.0);
  const double target = std::min(nu * (mass_pos + mass_neg) / 2.0, std::min(mass_pos, mass_neg));
  double remaining_pos = target, remaining_neg = target;
  for (std::size_t i = 0; i < m; ++i) {
    if (labels[i] == +1) {
      upper[i] = weights.positive;
      alpha[i] = std::min(upper[i], remaining_pos);
      remaining_pos -= alpha[i];
    } else {
      upper[i] = weights.negative;
      alpha[i] = std::min(upper[i], remaining_neg);
      remaining_neg -= alpha[i];
    }
  }

  detail::KernelRows q(points, labels, gamma, options.cache_megabytes << 20);
  const auto solution = detail::solve_nu(q, labels, upper, std::move(alpha),
                                         options.tolerance, options.max_iterations);

  const double r = (solution.r_positive + solution.r_negative) / 2.0;
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw DataError("train_binary: degenerate problem, the classes cannot be separated "
                    "by any margin (identical points?)");
  }

  BinaryNuSvc model;
  model.nu = nu;
  model.gamma = gamma;
  model.rho = (solution.r_positive - solution.r_negative) / 2.0 / r;
  for (std::size_t i = 0; i < m; ++i) {
    if (solution.alpha[i] > 0.0) model.support_indices.push_back(i);
  }
  model.support_vectors.resize(static_cast<Eigen::Index>(model.support_indices.size()),
                               points.cols());
  model.dual_coefs.reserve(model.support_indices.size());
  for (std::size_t s = 0; s < model.support_indices.size(); ++s) {
    const std::size_t i = model.support_indices[s];
    model.support_vectors.row(static_cast<Eigen::Index>(s)) =
        points.row(static_cast<Eigen::Index>(i));
    model.dual_coefs.push_back(solution.alpha[i] * labels[i] / r);
  }
  double objective = 0.0;
  for (std::size_t i = 0; i < m; ++i) objective += solution.alpha[i] * solution.gradient[i];
  model.info = {solution.iterations, solution.max_violation, r, objective / 2.0};
  return model;
}

std::string_view to_string(BalancingKind kind) {
  switch (kind) {
    case BalancingKind::none: return "none";
    case BalancingKind::oversample: return "oversample";
    case BalancingKind::inverse_weights: return "inverse_weights";
  }
  return "unknown";
}

BalancingKind parse_balancing(std::string_view name) {
  if (name == "none") return BalancingKind::none;
  if (name == "oversample") return BalancingKind::oversample;
  if (name == "inverse_weights" || name == "inverse-weights") {
    return BalancingKind::inverse_weights;
  }
  throw InvalidArgument("unknown balancing strategy '" + std::string(name) + "'");
}

void BalancingStrategy::validate() const {
  if ((kind == BalancingKind::oversample) != seed.has_value()) {
    throw InvalidArgument("balancing: a seed is required for oversample and only for it");
  }
}

ResampledSet oversample(const Eigen::MatrixXd& points, std::span<const std::string> labels,
                        std::uint64_t seed) {
  if (labels.size() != static_cast<std::size_t>(points.rows())) {
    throw InvalidArgument("oversample: one label per point required");
  }
  const auto classes = sorted_classes(labels);
  std::vector<std::vector<std::size_t>> members(classes.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    members[class_index(classes, labels[i])].push_back(i);
  }
  std::size_t majority = 0;
  for (const auto& rows : members) majority = std::max(majority, rows.size());

  ResampledSet out;
  out.origin.resize(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out.origin[i] = i;
  Rng rng(seed);
  for (const auto& rows : members) {
    for (std::size_t extra = rows.size(); extra < majority; ++extra) {
      out.origin.push_back(rows[uniform_below(rng, rows.size())]);
    }
  }
  out.points.resize(static_cast<Eigen::Index>(out.origin.size()), points.cols());
  out.labels.reserve(out.origin.size());
  for (std::size_t i = 0; i < out.origin.size(); ++i) {
    out.points.row(static_cast<Eigen::Index>(i)) =
        points.row(static_cast<Eigen::Index>(out.origin[i]));
    out.labels.push_back(labels[out.origin[i]]);
  }
  return out;
}

std::map<std::string, double> inverse_weights(std::span<const std::string> labels) {
  std::map<std::string, double> counts;
  for (const auto& label : labels) counts[label] += 1.0;
  const double total = static_cast<double>(labels.size());
  const double num_classes = static_cast<double>(counts.size());
  std::map<std::string, double> weights;
  for (const auto& [label, count] : counts) weights[label] = total / (num_classes * count);
  return weights;
}

MultiClassNuSvc train_multiclass(const Eigen::MatrixXd& points,
                                 std::span<const std::string> labels, double gamma,
                                 double nu, const BalancingStrategy& balancing,
                                 const SolverOptions& options, unsigned threads) {
  balancing.validate();
  if (labels.size() != static_cast<std::size_t>(points.rows())) {
    throw InvalidArgument("train_multiclass: one label per point required");
  }

  ResampledSet data;
  if (balancing.kind == BalancingKind::oversample) {
    data = oversample(points, labels, *balancing.seed);
  } else {
    data.points = points;
    data.labels.assign(labels.begin(), labels.end());
    data.origin.resize(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) data.origin[i] = i;
  }

  MultiClassNuSvc model;
  model.classes = sorted_classes(data.labels);
  model.dimension = points.cols();
  model.gamma = gamma;
  model.nu = nu;
  const std::size_t k = model.classes.size();
  if (k < 2) throw DataError("train_multiclass: need at least two classes");

  std::map<std::string, double> weight_of;
  if (balancing.kind == BalancingKind::inverse_weights) {
    weight_of = inverse_weights(data.labels);
  } else {
    for (const auto& c : model.classes) weight_of[c] = 1.0;
  }

  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    members[class_index(model.classes, data.labels[i])].push_back(i);
  }

  struct PairJob {
    std::size_t first, second;
  };
  std::vector<PairJob> jobs;
  std::vector<std::pair<std::string, std::string>> infeasible;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      jobs.push_back({a, b});
      const double mass_a = weight_of[model.classes[a]] * static_cast<double>(members[a].size());
      const double mass_b = weight_of[model.classes[b]] * static_cast<double>(members[b].size());
      if (!nu_feasible(mass_a, mass_b, nu)) {
        infeasible.emplace_back(model.classes[a], model.classes[b]);
      }
    }
  }
  if (!infeasible.empty()) {
    std::string list;
    for (std::size_t i = 0; i < infeasible.size() && i < 10; ++i) {
      if (i) list += ", ";
      list += "(" + infeasible[i].first + ", " + infeasible[i].second + ")";
    }
    if (infeasible.size() > 10) list += ", ...";
    throw InfeasibleNuError("infeasible nu " + format_double(nu) + " for " +
                                std::to_string(infeasible.size()) + " class pair(s): " + list,
                            std::move(infeasible));
  }

  model.binary_models.resize(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t job_index) {
    const auto [a, b] = jobs[job_index];
    std::vector<std::size_t> rows = members[a];
    rows.insert(rows.end(), members[b].begin(), members[b].end());
    Eigen::MatrixXd pair_points(static_cast<Eigen::Index>(rows.size()), data.points.cols());
    std::vector<int> pair_labels(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      pair_points.row(static_cast<Eigen::Index>(i)) =
          data.points.row(static_cast<Eigen::Index>(rows[i]));
      pair_labels[i] = i < members[a].size() ? +1 : -1;
    }
    const ClassWeights weights{weight_of[model.classes[a]], weight_of[model.classes[b]]};
    BinaryNuSvc binary = train_binary(pair_points, pair_labels, gamma, nu, weights, options);
    binary.classes = {model.classes[a], model.classes[b]};
    for (auto& index : binary.support_indices) index = data.origin[rows[index]];
    model.binary_models[job_index] = std::move(binary);
  });

  std::set<std::size_t> distinct;
  for (const auto& binary : model.binary_models) {
    distinct.insert(binary.support_indices.begin(), binary.support_indices.end());
  }
  model.total_support_vectors = distinct.size();
  return model;
}

Prediction predict(const MultiClassNuSvc& model, const Eigen::VectorXd& x) {
  if (x.size() != model.dimension) {
    throw InvalidArgument("predict: input has dimension " + std::to_string(x.size()) +
                          ", model expects " + std::to_string(model.dimension));
  }
  Prediction out;
  out.votes.assign(model.classes.size(), 0);
  std::size_t job = 0;
  for (std::size_t a = 0; a < model.classes.size(); ++a) {
    for (std::size_t b = a + 1; b < model.classes.size(); ++b, ++job) {
      const double f = model.binary_models[job].decision_value(x);
      ++out.votes[f >= 0.0 ? a : b];
    }
  }
  // First maximum wins; classes are sorted so ties favour the smaller label.
  const auto winner = std::max_element(out.votes.begin(), out.votes.end()) - out.votes.begin();
  out.label = model.classes[static_cast<std::size_t>(winner)];
  return out;
}

}  // namespace gamecat
