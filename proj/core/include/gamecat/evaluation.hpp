#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gamecat/corpus.hpp"
#include "gamecat/lsi.hpp"
#include "gamecat/pipeline.hpp"

namespace gamecat {

enum class RunStatus { ok, infeasible_nu, failed };

std::string_view to_string(RunStatus status);

struct CvReport {
  RunStatus status = RunStatus::ok;
  std::string message;  // reason when status != ok
  std::vector<double> fold_accuracies;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // sample standard deviation
  double ci95_lower = 0.0;    // mean - 1.96 * std
  std::vector<std::size_t> fold_support_vectors;
  double mean_support_vectors = 0.0;
};

// Assigns every document to one of `folds` chunks. Stratified splits deal
// each class's shuffled members round-robin; otherwise the whole shuffled
// corpus is dealt. Returns the test indices of each fold, sorted.
std::vector<std::vector<std::size_t>> make_folds(std::span<const std::string> labels, int folds,
                                                 std::uint64_t seed, bool stratified);

// Every fold refits the complete pipeline on its training chunks unless
// config.fit_transform_once is set. Infeasible nu and solver failures are
// reported through status; malformed corpora throw.
CvReport cross_validate(std::span<const RawDocument> corpus, const PipelineConfig& config);

struct GridRow {
  double gamma = 0.0;
  double nu = 0.0;
  RunStatus status = RunStatus::ok;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  double ci95_lower = 0.0;
  double mean_support_vectors = 0.0;
  std::string message;
};

struct GridReport {
  std::vector<double> gamma_grid;
  std::vector<double> nu_grid;
  std::vector<GridRow> rows;  // gamma-major, nu-minor
  std::optional<std::size_t> best;
};

// Highest mean accuracy among ok rows; ties go to fewer support vectors,
// then smaller gamma, then smaller nu.
std::optional<std::size_t> select_best(std::span<const GridRow> rows);

// The 24 gamma and 17 nu values searched for the published model (408 cells).
std::vector<double> default_gamma_grid();
std::vector<double> default_nu_grid();

GridReport grid_search(std::span<const RawDocument> corpus, std::span<const double> gamma_grid,
                       std::span<const double> nu_grid, const PipelineConfig& config);

std::string to_json(const CvReport& report);
std::string to_json(const GridReport& report);

struct ScatterPoint {
  std::string id;
  double axis1 = 0.0;
  double axis2 = 0.0;
  std::string label;
  std::string split;  // "train" or "test"
  bool correct = false;
};

struct ScatterResult {
  std::vector<ScatterPoint> points;
  SvdFactors factors;
};

// Stratified train/test split, fit on the training part, and the first two
// latent coordinates of every document with its prediction outcome.
ScatterResult latent_scatter(std::span<const RawDocument> corpus, const PipelineConfig& config,
                             double train_fraction = 0.7);

}  // namespace gamecat
