#include "gamecat/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gamecat/error.hpp"
#include "gamecat/log.hpp"

namespace gamecat {
namespace {

template <typename Fn>
decltype(auto) in_stage(const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (Error& e) {
    e.set_stage(stage);
    throw;
  }
}

std::vector<std::string> require_labels(std::span<const CleanDocument> docs) {
  std::vector<std::string> labels;
  labels.reserve(docs.size());
  for (const auto& doc : docs) {
    if (!doc.label) throw DataError("document '" + doc.id + "' has no label");
    labels.push_back(*doc.label);
  }
  return labels;
}

}  // namespace

void PipelineConfig::validate() const {
  selection_rule().validate();
  balancing.validate();
  if (k_latent < 1) throw InvalidArgument("k_latent must be at least 1");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw InvalidArgument("gamma must be finite and non-negative");
  }
  if (!(nu > 0.0) || nu > 1.0) throw InvalidArgument("nu must lie in (0, 1]");
  if (folds < 2) throw InvalidArgument("folds must be at least 2");
  if (!(solver.tolerance > 0.0)) throw InvalidArgument("solver tolerance must be positive");
  if (solver.max_iterations < 1) throw InvalidArgument("solver max_iterations must be positive");
}

Eigen::VectorXd FeatureModel::term_vector(const CleanDocument& doc) const {
  if (weighting == Weighting::tfidf) {
    Eigen::VectorXd v = vectorize_document(doc.tokens, vocabulary, Weighting::probability);
    for (Eigen::Index j = 0; j < v.size(); ++j) v[j] *= idf[static_cast<std::size_t>(j)];
    return v;
  }
  return vectorize_document(doc.tokens, vocabulary, weighting);
}

Eigen::VectorXd FeatureModel::embed(const CleanDocument& doc) const {
  return projector.project(term_vector(doc));
}

FeatureFit fit_features(std::span<const CleanDocument> docs, const PipelineConfig& config) {
  const auto labels = in_stage("preprocess", [&] { return require_labels(docs); });
  const auto full_vocab = in_stage("vocabulary", [&] { return build_vocabulary(docs); });

  const auto probability = in_stage("weighting", [&] {
    return to_probability(build_tfm(docs, full_vocab));
  });

  const auto filtered_vocab = in_stage("mi_filter", [&] {
    const auto rule = config.selection_rule();
    const auto table = compute_mi_table(probability, labels, full_vocab, rule, config.threads);
    const auto selected = select_terms(table, rule);
    if (selected.empty()) {
      warn("no term has mutual information above " + std::to_string(rule.threshold_bits) +
           " bits");
    }
    return filter_vocabulary(full_vocab, selected);
  });

  FeatureFit fit;
  fit.full_vocabulary_size = full_vocab.size();
  fit.features.vocabulary = filtered_vocab;
  fit.features.weighting = config.weighting;

  const auto weighted = in_stage("weighting", [&] {
    const auto counts = build_tfm(docs, filtered_vocab);
    if (config.weighting == Weighting::tfidf) {
      fit.features.idf = inverse_document_frequency(counts);
      return apply_idf(to_probability(counts), fit.features.idf);
    }
    return apply_weighting(counts, config.weighting);
  });

  in_stage("lsi", [&] {
    const auto cap = std::min<std::size_t>(weighted.rows, weighted.cols);
    const int k = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(config.k_latent), cap));
    fit.factors = truncated_svd(weighted, k, config.svd);
    fit.features.projector = LsiProjector(fit.factors);
    fit.latent = fit.features.projector.project_rows(weighted);
  });

  fit.zero_rows.resize(weighted.rows);
  for (std::size_t r = 0; r < weighted.rows; ++r) {
    fit.zero_rows[r] = weighted.row_ptr[r] == weighted.row_ptr[r + 1];
  }
  return fit;
}

MultiClassNuSvc train_classifier(const Eigen::MatrixXd& latent,
                                 std::span<const std::string> labels,
                                 const std::vector<bool>& skip, const PipelineConfig& config) {
  return in_stage("nusvm", [&] {
    std::vector<Eigen::Index> keep;
    for (std::size_t r = 0; r < labels.size(); ++r) {
      if (skip.empty() || !skip[r]) keep.push_back(static_cast<Eigen::Index>(r));
    }
    Eigen::MatrixXd points(static_cast<Eigen::Index>(keep.size()), latent.cols());
    std::vector<std::string> kept_labels;
    kept_labels.reserve(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
      points.row(static_cast<Eigen::Index>(i)) = latent.row(keep[i]);
      kept_labels.push_back(labels[static_cast<std::size_t>(keep[i])]);
    }
    return train_multiclass(points, kept_labels, config.gamma, config.nu, config.balancing,
                            config.solver, config.threads);
  });
}

FitResult fit_detailed(std::span<const RawDocument> corpus, const PipelineConfig& config) {
  in_stage("config", [&] { config.validate(); });
  const auto docs = in_stage("preprocess", [&] {
    for (const auto& doc : corpus) {
      if (!doc.label) throw DataError("document '" + doc.id + "' has no label");
    }
    std::set<std::string> classes;
    for (const auto& doc : corpus) classes.insert(*doc.label);
    if (classes.size() < 2) {
      throw DataError("training needs at least two classes, found " +
                      std::to_string(classes.size()));
    }
    return preprocess_all(corpus, config.scrub_rules);
  });

  FeatureFit features = fit_features(docs, config);
  std::vector<std::string> labels;
  labels.reserve(docs.size());
  for (const auto& doc : docs) labels.push_back(*doc.label);

  FitResult result;
  result.model.config = config;
  result.model.features = std::move(features.features);
  result.model.classifier = train_classifier(features.latent, labels, features.zero_rows, config);
  result.factors = std::move(features.factors);
  result.full_vocabulary_size = features.full_vocabulary_size;
  result.dropped_documents = static_cast<std::size_t>(
      std::count(features.zero_rows.begin(), features.zero_rows.end(), true));
  if (result.dropped_documents > 0) {
    warn("dropped " + std::to_string(result.dropped_documents) +
         " training document(s) with no selected term");
  }
  return result;
}

PipelineModel fit(std::span<const RawDocument> corpus, const PipelineConfig& config) {
  return fit_detailed(corpus, config).model;
}

Prediction predict_document(const PipelineModel& model, const RawDocument& doc) {
  const CleanDocument clean = preprocess(doc, model.scrub_rules());
  return predict(model.classifier, model.features.embed(clean));
}

}  // namespace gamecat
