#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "gamecat/corpus.hpp"
#include "gamecat/dtm.hpp"
#include "gamecat/lsi.hpp"
#include "gamecat/mi_filter.hpp"
#include "gamecat/nusvm.hpp"

namespace gamecat {

inline constexpr int kModelFormatVersion = 1;

struct PipelineConfig {
  Weighting weighting = Weighting::probability;
  double mi_threshold_bits = 0.0035;
  int mi_bins = 100;
  int k_latent = 2400;  // capped at min(documents, filtered terms)
  double gamma = 3.5;
  double nu = 0.025;
  BalancingStrategy balancing;
  int folds = 20;
  std::uint64_t seed = 1;
  ScrubRules scrub_rules = ScrubRules::defaults();
  bool stratified = true;
  // Fit vocabulary, term selection and SVD once on the whole corpus and
  // cross-validate only the classifier.
  bool fit_transform_once = false;
  SolverOptions solver;
  SvdOptions svd;
  unsigned threads = 1;

  SelectionRule selection_rule() const { return {mi_threshold_bits, mi_bins}; }
  void validate() const;
};

std::string config_to_json(const PipelineConfig& config);
// Keys present in `json` override the corresponding fields of `base`.
// Accepts snake_case and kebab-case keys.
PipelineConfig config_from_json(std::string_view json, PipelineConfig base = {});

// Everything between a cleaned document and its latent vector.
struct FeatureModel {
  Vocabulary vocabulary;  // after term selection
  Weighting weighting = Weighting::probability;
  std::vector<double> idf;  // tfidf only, one entry per term
  LsiProjector projector;

  Eigen::VectorXd term_vector(const CleanDocument& doc) const;
  Eigen::VectorXd embed(const CleanDocument& doc) const;
};

struct FeatureFit {
  FeatureModel features;
  SvdFactors factors;
  Eigen::MatrixXd latent;  // one row per input document
  std::vector<bool> zero_rows;  // documents with no selected term
  std::size_t full_vocabulary_size = 0;
};

// Vocabulary, weighting, MI term selection, re-weighting on the filtered
// vocabulary and truncated SVD. Every document must be labeled.
FeatureFit fit_features(std::span<const CleanDocument> docs, const PipelineConfig& config);

struct PipelineModel {
  int format_version = kModelFormatVersion;
  PipelineConfig config;
  FeatureModel features;
  MultiClassNuSvc classifier;

  const ScrubRules& scrub_rules() const noexcept { return config.scrub_rules; }
  const Vocabulary& vocabulary() const noexcept { return features.vocabulary; }
};

struct FitResult {
  PipelineModel model;
  SvdFactors factors;
  std::size_t full_vocabulary_size = 0;
  std::size_t dropped_documents = 0;
};

// Errors carry the pipeline stage that raised them (Error::stage()).
PipelineModel fit(std::span<const RawDocument> corpus, const PipelineConfig& config);
FitResult fit_detailed(std::span<const RawDocument> corpus, const PipelineConfig& config);

Prediction predict_document(const PipelineModel& model, const RawDocument& doc);

// Trains the classifier on precomputed latent rows, skipping rows flagged in
// `skip` (empty documents). Shared by fit and cross-validation.
MultiClassNuSvc train_classifier(const Eigen::MatrixXd& latent,
                                 std::span<const std::string> labels,
                                 const std::vector<bool>& skip, const PipelineConfig& config);

}  // namespace gamecat
