#include "gamecat/model_io.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "gamecat/error.hpp"

namespace gamecat {
namespace {

using nlohmann::json;

json rules_to_json(const ScrubRules& rules) {
  return {{"company_names", rules.company_names}, {"ad_patterns", rules.ad_patterns}};
}

json config_to_json_value(const PipelineConfig& c) {
  json balancing{{"kind", to_string(c.balancing.kind)}};
  if (c.balancing.seed) balancing["seed"] = *c.balancing.seed;
  return {
      {"weighting", to_string(c.weighting)},
      {"mi_threshold_bits", c.mi_threshold_bits},
      {"mi_bins", c.mi_bins},
      {"k_latent", c.k_latent},
      {"gamma", c.gamma},
      {"nu", c.nu},
      {"balancing", std::move(balancing)},
      {"folds", c.folds},
      {"seed", c.seed},
      {"scrub_rules", rules_to_json(c.scrub_rules)},
      {"stratified", c.stratified},
      {"fit_transform_once", c.fit_transform_once},
      {"solver",
       {{"tolerance", c.solver.tolerance},
        {"max_iterations", c.solver.max_iterations},
        {"cache_megabytes", c.solver.cache_megabytes}}},
      {"threads", c.threads},
  };
}

const json* find_key(const json& obj, std::string_view snake) {
  if (auto it = obj.find(std::string(snake)); it != obj.end()) return &*it;
  std::string kebab(snake);
  std::replace(kebab.begin(), kebab.end(), '_', '-');
  if (auto it = obj.find(kebab); it != obj.end()) return &*it;
  return nullptr;
}

template <typename T>
void read_into(const json& obj, std::string_view key, T& out) {
  if (const json* v = find_key(obj, key)) out = v->get<T>();
}

PipelineConfig config_from_json_value(const json& obj, PipelineConfig c) {
  if (!obj.is_object()) throw DataError("config: expected a JSON object");
  if (const json* w = find_key(obj, "weighting")) c.weighting = parse_weighting(w->get<std::string>());
  read_into(obj, "mi_threshold_bits", c.mi_threshold_bits);
  read_into(obj, "mi_bins", c.mi_bins);
  read_into(obj, "k_latent", c.k_latent);
  read_into(obj, "gamma", c.gamma);
  read_into(obj, "nu", c.nu);
  read_into(obj, "folds", c.folds);
  read_into(obj, "seed", c.seed);
  read_into(obj, "stratified", c.stratified);
  read_into(obj, "fit_transform_once", c.fit_transform_once);
  read_into(obj, "threads", c.threads);
  if (const json* b = find_key(obj, "balancing")) {
    if (b->is_string()) {
      c.balancing.kind = parse_balancing(b->get<std::string>());
      if (c.balancing.kind != BalancingKind::oversample) c.balancing.seed.reset();
      else if (!c.balancing.seed) c.balancing.seed = c.seed;
    } else {
      c.balancing.kind = parse_balancing(b->at("kind").get<std::string>());
      c.balancing.seed.reset();
      if (const json* s = find_key(*b, "seed"); s && !s->is_null()) {
        c.balancing.seed = s->get<std::uint64_t>();
      }
    }
  }
  if (const json* r = find_key(obj, "scrub_rules")) {
    c.scrub_rules = ScrubRules::from_json(r->dump());
  }
  if (const json* s = find_key(obj, "solver")) {
    read_into(*s, "tolerance", c.solver.tolerance);
    read_into(*s, "max_iterations", c.solver.max_iterations);
    read_into(*s, "cache_megabytes", c.solver.cache_megabytes);
  }
  return c;
}

json binary_to_json(const BinaryNuSvc& b) {
  json svs = json::array();
  for (Eigen::Index i = 0; i < b.support_vectors.rows(); ++i) {
    svs.push_back(std::vector<double>(b.support_vectors.row(i).begin(),
                                      b.support_vectors.row(i).end()));
  }
  return {{"classes", b.classes},          {"rho", b.rho},
          {"nu", b.nu},                    {"gamma", b.gamma},
          {"dual_coefs", b.dual_coefs},    {"support_indices", b.support_indices},
          {"support_vectors", std::move(svs)}};
}

BinaryNuSvc binary_from_json(const json& j, Eigen::Index dimension) {
  BinaryNuSvc b;
  b.classes = j.at("classes").get<std::array<std::string, 2>>();
  b.rho = j.at("rho").get<double>();
  b.nu = j.at("nu").get<double>();
  b.gamma = j.at("gamma").get<double>();
  b.dual_coefs = j.at("dual_coefs").get<std::vector<double>>();
  b.support_indices = j.at("support_indices").get<std::vector<std::size_t>>();
  const auto& svs = j.at("support_vectors");
  if (svs.size() != b.dual_coefs.size()) {
    throw DataError("model: support vector and dual coefficient counts differ");
  }
  b.support_vectors.resize(static_cast<Eigen::Index>(svs.size()), dimension);
  for (std::size_t i = 0; i < svs.size(); ++i) {
    const auto row = svs[i].get<std::vector<double>>();
    if (static_cast<Eigen::Index>(row.size()) != dimension) {
      throw DataError("model: support vector has the wrong dimension");
    }
    for (Eigen::Index c = 0; c < dimension; ++c) {
      b.support_vectors(static_cast<Eigen::Index>(i), c) = row[static_cast<std::size_t>(c)];
    }
  }
  return b;
}

json model_to_json(const PipelineModel& model) {
  const auto& proj = model.features.projector;
  json v = json::array();
  for (Eigen::Index r = 0; r < proj.v().rows(); ++r) {
    v.push_back(std::vector<double>(proj.v().row(r).begin(), proj.v().row(r).end()));
  }
  json binaries = json::array();
  for (const auto& b : model.classifier.binary_models) binaries.push_back(binary_to_json(b));
  return {
      {"format_version", model.format_version},
      {"config", config_to_json_value(model.config)},
      {"vocabulary", model.features.vocabulary.terms()},
      {"weighting", to_string(model.features.weighting)},
      {"idf", model.features.idf},
      {"projector",
       {{"vocab_size", proj.vocab_size()},
        {"k", proj.k()},
        {"d", std::vector<double>(proj.d().begin(), proj.d().end())},
        {"v", std::move(v)}}},
      {"classifier",
       {{"classes", model.classifier.classes},
        {"dimension", model.classifier.dimension},
        {"gamma", model.classifier.gamma},
        {"nu", model.classifier.nu},
        {"total_support_vectors", model.classifier.total_support_vectors},
        {"binary_models", std::move(binaries)}}},
  };
}

PipelineModel model_from_json(const json& doc) {
  PipelineModel model;
  model.config = config_from_json_value(doc.at("config"), PipelineConfig{});
  model.features.vocabulary = Vocabulary(doc.at("vocabulary").get<std::vector<std::string>>());
  model.features.weighting = parse_weighting(doc.at("weighting").get<std::string>());
  model.features.idf = doc.at("idf").get<std::vector<double>>();
  if (model.features.weighting == Weighting::tfidf &&
      model.features.idf.size() != model.features.vocabulary.size()) {
    throw DataError("model: idf length does not match the vocabulary");
  }

  const auto& proj = doc.at("projector");
  const auto n = proj.at("vocab_size").get<Eigen::Index>();
  const auto k = proj.at("k").get<Eigen::Index>();
  const auto d = proj.at("d").get<std::vector<double>>();
  const auto& rows = proj.at("v");
  if (static_cast<Eigen::Index>(d.size()) != k || static_cast<Eigen::Index>(rows.size()) != n ||
      n != static_cast<Eigen::Index>(model.features.vocabulary.size())) {
    throw DataError("model: projector shape is inconsistent");
  }
  Eigen::MatrixXd v(n, k);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto row = rows[static_cast<std::size_t>(r)].get<std::vector<double>>();
    if (static_cast<Eigen::Index>(row.size()) != k) {
      throw DataError("model: projector row has the wrong length");
    }
    for (Eigen::Index c = 0; c < k; ++c) v(r, c) = row[static_cast<std::size_t>(c)];
  }
  model.features.projector =
      LsiProjector(std::move(v), Eigen::Map<const Eigen::VectorXd>(d.data(), k));

  const auto& cls = doc.at("classifier");
  model.classifier.classes = cls.at("classes").get<std::vector<std::string>>();
  model.classifier.dimension = cls.at("dimension").get<Eigen::Index>();
  model.classifier.gamma = cls.at("gamma").get<double>();
  model.classifier.nu = cls.at("nu").get<double>();
  model.classifier.total_support_vectors = cls.at("total_support_vectors").get<std::size_t>();
  if (model.classifier.dimension != k) {
    throw DataError("model: classifier dimension does not match the projector");
  }
  for (const auto& b : cls.at("binary_models")) {
    model.classifier.binary_models.push_back(binary_from_json(b, k));
  }
  const std::size_t c = model.classifier.classes.size();
  if (model.classifier.binary_models.size() != c * (c - 1) / 2) {
    throw DataError("model: expected one binary model per class pair");
  }
  return model;
}

}  // namespace

std::string config_to_json(const PipelineConfig& config) {
  return config_to_json_value(config).dump(2);
}

PipelineConfig config_from_json(std::string_view text, PipelineConfig base) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("config: ") + e.what(), e.byte);
  }
  try {
    return config_from_json_value(doc, std::move(base));
  } catch (const json::exception& e) {
    throw DataError(std::string("config: ") + e.what());
  }
}

std::string serialize_model(const PipelineModel& model) { return model_to_json(model).dump(); }

PipelineModel deserialize_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("model: ") + e.what(), e.byte);
  }
  if (!doc.is_object() || !doc.contains("format_version") ||
      !doc["format_version"].is_number_integer()) {
    throw FormatError("model: missing integer format_version", 0);
  }
  const int version = doc["format_version"].get<int>();
  if (version != kModelFormatVersion) {
    throw VersionError("model: unsupported format_version " + std::to_string(version) +
                       " (this build reads version " + std::to_string(kModelFormatVersion) +
                       ")");
  }
  try {
    return model_from_json(doc);
  } catch (const json::exception& e) {
    throw FormatError(std::string("model: ") + e.what(), text.size());
  }
}

void save_model(const PipelineModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write model '" + path.string() + "'");
  out << serialize_model(model);
  if (!out) throw IoError("failed writing model '" + path.string() + "'");
}

PipelineModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model '" + path.string() + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(text);
}

}  // namespace gamecat
