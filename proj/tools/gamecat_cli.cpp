// gamecat: command-line front end for the genre classification pipeline.

#include <charconv>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gamecat/corpus.hpp"
#include "gamecat/error.hpp"
#include "gamecat/evaluation.hpp"
#include "gamecat/model_io.hpp"
#include "gamecat/pipeline.hpp"
#include "gamecat/reports.hpp"
#include "gamecat/synthetic.hpp"

namespace {

using namespace gamecat;

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kSearch = 3 };

struct ConfigFlags {
  std::string weighting = "probability";
  std::string balancing = "none";
  std::optional<std::uint64_t> balancing_seed;
  std::string scrub_rules;
  std::string config;
  bool unstratified = false;
};

void add_config_flags(CLI::App& cmd, PipelineConfig& config, ConfigFlags& flags) {
  cmd.add_option("--weighting", flags.weighting, "frequency|probability|boolean|tfidf")
      ->capture_default_str();
  cmd.add_option("--mi-threshold-bits", config.mi_threshold_bits, "Term selection threshold")
      ->capture_default_str();
  cmd.add_option("--mi-bins", config.mi_bins, "Histogram bins for MI")->capture_default_str();
  cmd.add_option("--k-latent", config.k_latent, "Latent dimensions")->capture_default_str();
  cmd.add_option("--gamma", config.gamma, "RBF kernel gamma")->capture_default_str();
  cmd.add_option("--nu", config.nu, "nu-SVC parameter")->capture_default_str();
  cmd.add_option("--balancing", flags.balancing, "none|oversample|inverse-weights")
      ->capture_default_str();
  cmd.add_option("--balancing-seed", flags.balancing_seed,
                 "Seed for oversampling (defaults to --seed)");
  cmd.add_option("--folds", config.folds, "Cross-validation folds")->capture_default_str();
  cmd.add_option("--seed", config.seed, "Random seed")->capture_default_str();
  cmd.add_option("--scrub-rules", flags.scrub_rules, "JSON file of company names and ad phrases");
  cmd.add_option("--threads", config.threads, "Worker threads")->capture_default_str();
  cmd.add_flag("--unstratified", flags.unstratified, "Plain shuffled folds");
  cmd.add_flag("--fit-transform-once", config.fit_transform_once,
               "Fit features once on the whole corpus during CV");
  cmd.add_option("--solver-tolerance", config.solver.tolerance, "KKT violation tolerance")
      ->capture_default_str();
  cmd.add_option("--config", flags.config, "JSON config file; its keys override flags");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

PipelineConfig resolve_config(PipelineConfig config, const ConfigFlags& flags) {
  config.weighting = parse_weighting(flags.weighting);
  config.balancing.kind = parse_balancing(flags.balancing);
  if (config.balancing.kind == BalancingKind::oversample) {
    config.balancing.seed = flags.balancing_seed.value_or(config.seed);
  }
  config.stratified = !flags.unstratified;
  if (!flags.scrub_rules.empty()) config.scrub_rules = ScrubRules::load(flags.scrub_rules);
  if (!flags.config.empty()) config = config_from_json(read_file(flags.config), config);
  config.validate();
  return config;
}

std::vector<RawDocument> read_input(const std::string& path) {
  if (path == "-") return read_corpus(std::cin, CorpusFormat::jsonl);
  return load_corpus(path, corpus_format_for(path));
}

template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  fn(out);
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    const auto* end = item.data() + item.size();
    const auto res = std::from_chars(item.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end) {
      throw InvalidArgument("bad grid value '" + item + "'");
    }
    values.push_back(v);
  }
  if (values.empty()) throw InvalidArgument("empty grid");
  return values;
}

std::string format_votes(const MultiClassNuSvc& model, const Prediction& p) {
  std::string out;
  for (std::size_t i = 0; i < model.classes.size(); ++i) {
    if (i > 0) out += ';';
    out += model.classes[i] + ':' + std::to_string(p.votes[i]);
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Game genre classification: preprocessing, MI term selection, LSI and nu-SVC"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "gamecat 0.1.0");

  PipelineConfig config;
  ConfigFlags flags;
  std::string input;
  std::string output;
  std::string model_path;
  std::string out_dir = "reports";
  std::string gamma_grid;
  std::string nu_grid;
  std::string format = "jsonl";
  SyntheticCorpusParams synth;

  auto* ingest = app.add_subcommand("ingest", "Validate a corpus and rewrite it as JSONL");
  ingest->add_option("input", input, "Corpus (.csv or .jsonl)")->required();
  ingest->add_option("-o,--output", output, "Output JSONL (default stdout)");

  auto* train = app.add_subcommand("train", "Fit the pipeline and save a model");
  train->add_option("input", input, "Labeled corpus")->required();
  train->add_option("-m,--model", model_path, "Model file to write")->required();
  add_config_flags(*train, config, flags);

  auto* predict_cmd = app.add_subcommand("predict", "Classify documents as CSV id,label,votes");
  predict_cmd->add_option("input", input, "Corpus to classify")->required();
  predict_cmd->add_option("-m,--model", model_path, "Model file")->required();
  predict_cmd->add_option("-o,--output", output, "Output CSV (default stdout)");

  auto* cv = app.add_subcommand("cv", "Cross-validate one configuration; JSON to stdout");
  cv->add_option("input", input, "Labeled corpus")->required();
  add_config_flags(*cv, config, flags);

  auto* grid = app.add_subcommand("grid-search", "Cross-validate a gamma x nu grid");
  grid->add_option("input", input, "Labeled corpus")->required();
  grid->add_option("--out-dir", out_dir, "Report directory")->capture_default_str();
  grid->add_option("--gamma-grid", gamma_grid, "Comma-separated gammas (default: full grid)");
  grid->add_option("--nu-grid", nu_grid, "Comma-separated nus (default: full grid)");
  add_config_flags(*grid, config, flags);

  auto* gen = app.add_subcommand("gen-corpus", "Write a synthetic labeled corpus");
  gen->add_option("--num-classes", synth.num_classes)->capture_default_str();
  gen->add_option("--docs-per-class", synth.docs_per_class)->capture_default_str();
  gen->add_option("--vocab-size", synth.vocab_size)->capture_default_str();
  gen->add_option("--keywords-per-class", synth.keywords_per_class)->capture_default_str();
  gen->add_option("--noise-ratio", synth.noise_ratio)->capture_default_str();
  gen->add_option("--seed", synth.seed)->capture_default_str();
  gen->add_option("--title-tokens", synth.title_tokens)->capture_default_str();
  gen->add_option("--description-tokens", synth.description_tokens)->capture_default_str();
  gen->add_option("--format", format, "jsonl|csv")
      ->check(CLI::IsMember({"jsonl", "csv"}))
      ->capture_default_str();
  gen->add_option("-o,--output", output, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (ingest->parsed()) {
      const auto docs = read_input(input);
      with_output(output, [&](std::ostream& out) { write_jsonl(out, docs); });
      std::cerr << "ingested " << docs.size() << " documents\n";
      return kOk;
    }

    if (gen->parsed()) {
      const auto docs = generate_synthetic_corpus(synth);
      with_output(output, [&](std::ostream& out) {
        if (format == "csv") write_csv(out, docs);
        else write_jsonl(out, docs);
      });
      return kOk;
    }

    if (predict_cmd->parsed()) {
      const auto model = load_model(model_path);
      const auto docs = read_input(input);
      with_output(output, [&](std::ostream& out) {
        out << "id,label,votes\n";
        for (const auto& doc : docs) {
          const auto p = predict_document(model, doc);
          out << csv_field(doc.id) << ',' << csv_field(p.label) << ','
              << csv_field(format_votes(model.classifier, p)) << '\n';
        }
      });
      return kOk;
    }

    const PipelineConfig resolved = resolve_config(config, flags);
    const auto docs = read_input(input);

    if (train->parsed()) {
      const auto result = fit_detailed(docs, resolved);
      save_model(result.model, model_path);
      std::cerr << "trained on " << docs.size() << " documents: vocabulary "
                << result.full_vocabulary_size << " -> " << result.model.vocabulary().size()
                << ", k = " << result.model.features.projector.k() << ", "
                << result.model.classifier.total_support_vectors << " support vectors\n";
      return kOk;
    }

    if (cv->parsed()) {
      const auto report = cross_validate(docs, resolved);
      std::cout << to_json(report) << '\n';
      return report.status == RunStatus::ok ? kOk : kSearch;
    }

    if (grid->parsed()) {
      const auto gammas = gamma_grid.empty() ? default_gamma_grid() : parse_grid(gamma_grid);
      const auto nus = nu_grid.empty() ? default_nu_grid() : parse_grid(nu_grid);
      const auto report = grid_search(docs, gammas, nus, resolved);
      std::filesystem::create_directories(out_dir);
      with_output((std::filesystem::path(out_dir) / "grid.json").string(),
                  [&](std::ostream& out) { out << to_json(report) << '\n'; });
      if (!report.best) {
        emit_reports(report, SvdFactors{}, {}, out_dir);
        std::cerr << "no feasible grid cell\n";
        return kSearch;
      }
      PipelineConfig best = resolved;
      best.gamma = report.rows[*report.best].gamma;
      best.nu = report.rows[*report.best].nu;
      ScatterResult scatter;
      try {
        scatter = latent_scatter(docs, best);
      } catch (const Error& e) {
        std::cerr << "warning: latent scatter skipped: " << e.what() << '\n';
      }
      emit_reports(report, scatter.factors, scatter.points, out_dir);
      const auto& row = report.rows[*report.best];
      std::cerr << "best gamma=" << row.gamma << " nu=" << row.nu
                << " mean accuracy=" << row.mean_accuracy << '\n';
      return kOk;
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InfeasibleNuError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSearch;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSearch;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}
