#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "gamecat/corpus.hpp"
#include "gamecat/dtm.hpp"
#include "gamecat/lsi.hpp"
#include "gamecat/mi_filter.hpp"
#include "gamecat/nusvm.hpp"
#include "gamecat/porter_stemmer.hpp"
#include "gamecat/synthetic.hpp"

namespace {

using namespace gamecat;

std::vector<CleanDocument> clean_corpus(int classes, int per_class, int vocab) {
  const auto raw = generate_synthetic_corpus(classes, per_class, vocab, 8, 0.3, 7);
  return preprocess_all(raw, ScrubRules::defaults());
}

void BM_Stem(benchmark::State& state) {
  const std::vector<std::string> words{"generalizations", "conquering", "relational", "hopping",
                                       "adventure",       "strategies", "racing",     "puzzles"};
  for (auto _ : state) {
    for (const auto& w : words) benchmark::DoNotOptimize(stem(w));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(words.size()));
}
BENCHMARK(BM_Stem);

void BM_Preprocess(benchmark::State& state) {
  const auto raw = generate_synthetic_corpus(5, 40, 500, 8, 0.3, 3);
  const auto rules = ScrubRules::defaults();
  for (auto _ : state) benchmark::DoNotOptimize(preprocess_all(raw, rules));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(raw.size()));
}
BENCHMARK(BM_Preprocess);

void BM_EstimateMi(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit;
  std::vector<double> x(n);
  std::vector<std::uint8_t> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = static_cast<std::uint8_t>(rng() % 2);
    x[i] = unit(rng) < 0.9 ? 0.0 : unit(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(estimate_mi(x, y, 100));
}
BENCHMARK(BM_EstimateMi)->Arg(500)->Arg(2500);

void BM_MiTable(benchmark::State& state) {
  const auto docs = clean_corpus(21, 30, 2000);
  const auto vocab = build_vocabulary(docs);
  const auto m = to_probability(build_tfm(docs, vocab));
  std::vector<std::string> labels;
  for (const auto& d : docs) labels.push_back(*d.label);
  for (auto _ : state) benchmark::DoNotOptimize(compute_mi_table(m, labels, vocab, SelectionRule{}));
}
BENCHMARK(BM_MiTable)->Unit(benchmark::kMillisecond);

void BM_TruncatedSvd(benchmark::State& state) {
  const auto docs = clean_corpus(21, 30, 2000);
  const auto m = to_probability(build_tfm(docs, build_vocabulary(docs)));
  SvdOptions options;
  if (state.range(1) != 0) options.dense_entry_limit = 0;
  for (auto _ : state) benchmark::DoNotOptimize(truncated_svd(m, static_cast<int>(state.range(0)), options));
}
BENCHMARK(BM_TruncatedSvd)->Args({50, 0})->Args({50, 1})->Args({200, 0})->Unit(benchmark::kMillisecond);

void BM_TrainBinary(benchmark::State& state) {
  const auto n = state.range(0);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd points(n, 20);
  std::vector<int> y;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int label = i % 2 ? 1 : -1;
    for (Eigen::Index c = 0; c < 20; ++c) points(i, c) = normal(rng) + (c == 0 ? label : 0);
    y.push_back(label);
  }
  for (auto _ : state) benchmark::DoNotOptimize(train_binary(points, y, 0.05, 0.2));
}
BENCHMARK(BM_TrainBinary)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
