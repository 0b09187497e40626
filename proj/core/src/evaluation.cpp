#include "gamecat/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <json.hpp>

#include "gamecat/error.hpp"
#include "gamecat/parallel.hpp"
#include "gamecat/random.hpp"

namespace gamecat {
namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Latent rows of one fold, fitted without looking at its test documents.
struct FoldData {
  Eigen::MatrixXd train_latent;
  std::vector<std::string> train_labels;
  std::vector<bool> train_skip;
  Eigen::MatrixXd test_latent;
  std::vector<std::string> test_labels;
};

std::vector<std::string> labels_of(std::span<const CleanDocument> docs) {
  std::vector<std::string> labels;
  labels.reserve(docs.size());
  for (const auto& doc : docs) {
    if (!doc.label) throw DataError("document '" + doc.id + "' has no label");
    labels.push_back(*doc.label);
  }
  return labels;
}

void check_fold_feasibility(std::span<const std::string> labels, const PipelineConfig& config) {
  if (labels.size() < static_cast<std::size_t>(config.folds)) {
    throw DataError("corpus has " + std::to_string(labels.size()) + " documents, fewer than " +
                    std::to_string(config.folds) + " folds");
  }
  if (!config.stratified) return;
  std::map<std::string, std::size_t> counts;
  for (const auto& label : labels) ++counts[label];
  for (const auto& [label, count] : counts) {
    if (count < static_cast<std::size_t>(config.folds)) {
      throw DataError("class '" + label + "' has " + std::to_string(count) +
                      " documents, fewer than " + std::to_string(config.folds) +
                      " folds; use fewer folds or an unstratified split");
    }
  }
}

std::vector<FoldData> prepare_folds(std::span<const CleanDocument> docs,
                                    std::span<const std::string> labels,
                                    const PipelineConfig& config) {
  const auto test_sets = make_folds(labels, config.folds, config.seed, config.stratified);
  std::vector<FoldData> folds(test_sets.size());

  std::optional<FeatureFit> shared;
  if (config.fit_transform_once) shared = fit_features(docs, config);

  for (std::size_t f = 0; f < test_sets.size(); ++f) {
    std::vector<bool> is_test(docs.size(), false);
    for (std::size_t i : test_sets[f]) is_test[i] = true;
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      (is_test[i] ? test_rows : train_rows).push_back(i);
    }

    FoldData& fold = folds[f];
    const Eigen::Index k = shared ? shared->latent.cols() : 0;
    if (shared) {
      fold.train_latent.resize(static_cast<Eigen::Index>(train_rows.size()), k);
      for (std::size_t i = 0; i < train_rows.size(); ++i) {
        fold.train_latent.row(static_cast<Eigen::Index>(i)) =
            shared->latent.row(static_cast<Eigen::Index>(train_rows[i]));
        fold.train_skip.push_back(shared->zero_rows[train_rows[i]]);
      }
      fold.test_latent.resize(static_cast<Eigen::Index>(test_rows.size()), k);
      for (std::size_t i = 0; i < test_rows.size(); ++i) {
        fold.test_latent.row(static_cast<Eigen::Index>(i)) =
            shared->latent.row(static_cast<Eigen::Index>(test_rows[i]));
      }
    } else {
      std::vector<CleanDocument> train_docs;
      train_docs.reserve(train_rows.size());
      for (std::size_t i : train_rows) train_docs.push_back(docs[i]);
      FeatureFit fit = fit_features(train_docs, config);
      fold.train_latent = std::move(fit.latent);
      fold.train_skip = std::move(fit.zero_rows);
      fold.test_latent.resize(static_cast<Eigen::Index>(test_rows.size()),
                              fit.features.projector.k());
      for (std::size_t i = 0; i < test_rows.size(); ++i) {
        fold.test_latent.row(static_cast<Eigen::Index>(i)) =
            fit.features.embed(docs[test_rows[i]]).transpose();
      }
    }
    for (std::size_t i : train_rows) fold.train_labels.push_back(labels[i]);
    for (std::size_t i : test_rows) fold.test_labels.push_back(labels[i]);
  }
  return folds;
}

void summarize(CvReport& report) {
  const auto n = static_cast<double>(report.fold_accuracies.size());
  double sum = 0.0;
  for (double a : report.fold_accuracies) sum += a;
  report.mean_accuracy = sum / n;
  double squares = 0.0;
  for (double a : report.fold_accuracies) {
    squares += (a - report.mean_accuracy) * (a - report.mean_accuracy);
  }
  report.std_accuracy = n > 1.0 ? std::sqrt(squares / (n - 1.0)) : 0.0;
  report.ci95_lower = report.mean_accuracy - 1.96 * report.std_accuracy;
  double sv = 0.0;
  for (std::size_t c : report.fold_support_vectors) sv += static_cast<double>(c);
  report.mean_support_vectors = sv / n;
}

CvReport failed_report(RunStatus status, std::string message) {
  CvReport report;
  report.status = status;
  report.message = std::move(message);
  report.mean_accuracy = report.std_accuracy = report.ci95_lower = kNaN;
  report.mean_support_vectors = kNaN;
  return report;
}

CvReport evaluate(const std::vector<FoldData>& folds, const PipelineConfig& config) {
  CvReport report;
  try {
    for (const auto& fold : folds) {
      const auto model =
          train_classifier(fold.train_latent, fold.train_labels, fold.train_skip, config);
      std::size_t correct = 0;
      for (Eigen::Index i = 0; i < fold.test_latent.rows(); ++i) {
        const auto prediction = predict(model, fold.test_latent.row(i).transpose());
        if (prediction.label == fold.test_labels[static_cast<std::size_t>(i)]) ++correct;
      }
      report.fold_accuracies.push_back(static_cast<double>(correct) /
                                       static_cast<double>(fold.test_labels.size()));
      report.fold_support_vectors.push_back(model.total_support_vectors);
    }
  } catch (const InfeasibleNuError& e) {
    return failed_report(RunStatus::infeasible_nu, e.what());
  } catch (const Error& e) {
    return failed_report(RunStatus::failed, e.what());
  }
  summarize(report);
  return report;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::ok: return "ok";
    case RunStatus::infeasible_nu: return "infeasible_nu";
    case RunStatus::failed: return "failed";
  }
  return "unknown";
}

std::vector<std::vector<std::size_t>> make_folds(std::span<const std::string> labels, int folds,
                                                 std::uint64_t seed, bool stratified) {
  if (folds < 2) throw InvalidArgument("make_folds: need at least two folds");
  std::vector<std::vector<std::size_t>> groups;
  if (stratified) {
    std::map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    for (auto& [label, rows] : by_class) groups.push_back(std::move(rows));
  } else {
    groups.emplace_back(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) groups[0][i] = i;
  }
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(folds));
  std::size_t next = 0;
  for (auto& rows : groups) {
    shuffle_in_place(std::span<std::size_t>(rows), rng);
    for (std::size_t i : rows) {
      out[next].push_back(i);
      next = (next + 1) % out.size();
    }
  }
  for (auto& fold : out) std::sort(fold.begin(), fold.end());
  return out;
}

CvReport cross_validate(std::span<const RawDocument> corpus, const PipelineConfig& config) {
  config.validate();
  const auto docs = preprocess_all(corpus, config.scrub_rules);
  const auto labels = labels_of(docs);
  check_fold_feasibility(labels, config);
  std::vector<FoldData> folds;
  try {
    folds = prepare_folds(docs, labels, config);
  } catch (const Error& e) {
    return failed_report(RunStatus::failed, e.what());
  }
  return evaluate(folds, config);
}

std::optional<std::size_t> select_best(std::span<const GridRow> rows) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.status != RunStatus::ok) continue;
    if (!best) {
      best = i;
      continue;
    }
    const auto& cur = rows[*best];
    const bool better =
        row.mean_accuracy != cur.mean_accuracy ? row.mean_accuracy > cur.mean_accuracy
        : row.mean_support_vectors != cur.mean_support_vectors
            ? row.mean_support_vectors < cur.mean_support_vectors
        : row.gamma != cur.gamma ? row.gamma < cur.gamma
                                 : row.nu < cur.nu;
    if (better) best = i;
  }
  return best;
}

std::vector<double> default_gamma_grid() {
  return {0.01, 0.5, 1,    1.5,  2,  2.5,  3,  3.5, 3.75, 4,   4.5, 5,
          7.5,  10,  12.5, 15,   22.5, 25, 30, 35,  37.5, 45,  128, 256};
}

std::vector<double> default_nu_grid() {
  return {0.005, 0.01, 0.0125, 0.015, 0.0175, 0.02, 0.025, 0.03, 0.035,
          0.04,  0.045, 0.05,  0.07,  0.08,   0.10, 0.15,  0.25};
}

GridReport grid_search(std::span<const RawDocument> corpus, std::span<const double> gamma_grid,
                       std::span<const double> nu_grid, const PipelineConfig& config) {
  if (gamma_grid.empty() || nu_grid.empty()) {
    throw InvalidArgument("grid_search: gamma and nu grids must be non-empty");
  }
  config.validate();
  GridReport report;
  report.gamma_grid.assign(gamma_grid.begin(), gamma_grid.end());
  report.nu_grid.assign(nu_grid.begin(), nu_grid.end());
  for (double g : gamma_grid) {
    for (double n : nu_grid) {
      GridRow row;
      row.gamma = g;
      row.nu = n;
      report.rows.push_back(row);
    }
  }

  const auto docs = preprocess_all(corpus, config.scrub_rules);
  const auto labels = labels_of(docs);
  check_fold_feasibility(labels, config);

  std::vector<FoldData> folds;
  try {
    folds = prepare_folds(docs, labels, config);
  } catch (const Error& e) {
    for (auto& row : report.rows) {
      row.status = RunStatus::failed;
      row.message = e.what();
      row.mean_accuracy = row.std_accuracy = row.ci95_lower = row.mean_support_vectors = kNaN;
    }
    return report;
  }

  parallel_for(report.rows.size(), config.threads, [&](std::size_t i) {
    GridRow& row = report.rows[i];
    PipelineConfig cell = config;
    cell.gamma = row.gamma;
    cell.nu = row.nu;
    cell.threads = 1;
    CvReport cv;
    if (!(row.gamma >= 0.0) || !(row.nu > 0.0) || row.nu > 1.0) {
      cv = failed_report(RunStatus::failed, "invalid grid point");
    } else {
      cv = evaluate(folds, cell);
    }
    row.status = cv.status;
    row.message = cv.message;
    row.mean_accuracy = cv.mean_accuracy;
    row.std_accuracy = cv.std_accuracy;
    row.ci95_lower = cv.ci95_lower;
    row.mean_support_vectors = cv.mean_support_vectors;
  });
  report.best = select_best(report.rows);
  return report;
}

std::string to_json(const CvReport& report) {
  json doc{
      {"status", to_string(report.status)},
      {"fold_accuracies", report.fold_accuracies},
      {"mean_accuracy", number_or_null(report.mean_accuracy)},
      {"std_accuracy", number_or_null(report.std_accuracy)},
      {"ci95_lower", number_or_null(report.ci95_lower)},
      {"fold_support_vectors", report.fold_support_vectors},
      {"mean_support_vectors", number_or_null(report.mean_support_vectors)},
  };
  if (!report.message.empty()) doc["message"] = report.message;
  return doc.dump(2);
}

std::string to_json(const GridReport& report) {
  json rows = json::array();
  for (const auto& row : report.rows) {
    json r{
        {"gamma", row.gamma},
        {"nu", row.nu},
        {"status", to_string(row.status)},
        {"mean_accuracy", number_or_null(row.mean_accuracy)},
        {"std_accuracy", number_or_null(row.std_accuracy)},
        {"ci95_lower", number_or_null(row.ci95_lower)},
        {"mean_support_vectors", number_or_null(row.mean_support_vectors)},
    };
    if (!row.message.empty()) r["message"] = row.message;
    rows.push_back(std::move(r));
  }
  json doc{{"gamma_grid", report.gamma_grid},
           {"nu_grid", report.nu_grid},
           {"rows", std::move(rows)},
           {"best", report.best ? json(*report.best) : json(nullptr)}};
  return doc.dump(2);
}

ScatterResult latent_scatter(std::span<const RawDocument> corpus, const PipelineConfig& config,
                             double train_fraction) {
  if (!(train_fraction > 0.0) || !(train_fraction < 1.0)) {
    throw InvalidArgument("latent_scatter: train_fraction must lie in (0, 1)");
  }
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!corpus[i].label) throw DataError("document '" + corpus[i].id + "' has no label");
    by_class[*corpus[i].label].push_back(i);
  }
  Rng rng(config.seed);
  std::vector<bool> is_train(corpus.size(), false);
  for (auto& [label, rows] : by_class) {
    shuffle_in_place(std::span<std::size_t>(rows), rng);
    auto n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(rows.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, rows.size());
    for (std::size_t i = 0; i < n_train; ++i) is_train[rows[i]] = true;
  }
  std::vector<RawDocument> train;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (is_train[i]) train.push_back(corpus[i]);
  }
  FitResult fitted = fit_detailed(train, config);

  ScatterResult out;
  out.factors = std::move(fitted.factors);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const CleanDocument clean = preprocess(corpus[i], config.scrub_rules);
    const Eigen::VectorXd z = fitted.model.features.embed(clean);
    const auto prediction = predict(fitted.model.classifier, z);
    ScatterPoint point;
    point.id = corpus[i].id;
    point.axis1 = z.size() > 0 ? z[0] : 0.0;
    point.axis2 = z.size() > 1 ? z[1] : 0.0;
    point.label = *corpus[i].label;
    point.split = is_train[i] ? "train" : "test";
    point.correct = prediction.label == point.label;
    out.points.push_back(std::move(point));
  }
  return out;
}

}  // namespace gamecat
