#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "gamecat/error.hpp"
#include "gamecat/mi_filter.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace gamecat;

namespace {

double mi(std::vector<double> x, std::vector<std::uint8_t> y, int bins = 100) {
  return estimate_mi(x, y, bins);
}

MiTable table_of(std::vector<std::vector<double>> rows) {
  MiTable t;
  t.values.resize(static_cast<Eigen::Index>(rows.size()), 2);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    t.terms.push_back("t" + std::to_string(j));
    for (int c = 0; c < 2; ++c) t.values(static_cast<Eigen::Index>(j), c) = rows[j][c];
  }
  t.categories = {"a", "b"};
  return t;
}

}  // namespace

TEST_CASE("estimate_mi examples") {
  CHECK(mi({0.3, 0.3, 0.3, 0.3}, {0, 1, 0, 1}) == 0.0);
  CHECK(mi({0, 0, 0.5, 0.5}, {0, 0, 1, 1}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mi({0, 0.5, 0, 0.5}, {0, 0, 1, 1}) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(mi({0, 1, 2}, {0, 1}), InvalidArgument);
  CHECK_THROWS_AS(mi({0.0}, {1}), InvalidArgument);
  CHECK_THROWS_AS(mi({0, 1}, {0, 1}, 0), InvalidArgument);
}

TEST_CASE("estimate_mi agrees with the brute-force histogram") {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> unit;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 199;
    std::vector<double> x(n);
    std::vector<std::uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<std::uint8_t>(rng() % 2);
      x[i] = trial % 2 ? unit(rng) + 0.3 * y[i] : (unit(rng) < 0.7 ? 0.0 : unit(rng));
    }
    const int bins = trial % 3 == 0 ? 100 : 1 + static_cast<int>(rng() % 20);
    CAPTURE(trial);
    CHECK(std::abs(estimate_mi(x, y, bins) - oracle::brute_force_mi(x, y, bins)) <= 1e-12);
  }
}

TEST_CASE("estimate_mi properties") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 10 + rng() % 80;
    std::vector<double> x(n), shifted(n);
    std::vector<std::uint8_t> y(n), flipped(n);
    // Dyadic values keep the affine map exact.
    const double a = std::ldexp(1.0, static_cast<int>(rng() % 7) - 3);
    const double b = static_cast<double>(rng() % 9) - 4.0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<std::uint8_t>(rng() % 2);
      flipped[i] = static_cast<std::uint8_t>(1 - y[i]);
      x[i] = std::ldexp(static_cast<double>(rng() % 64 + 16 * y[i]), -6);
      shifted[i] = a * x[i] + b;
    }
    const double base = estimate_mi(x, y, 100);
    CHECK(base >= 0.0);
    CHECK(base <= 1.0 + 1e-12);
    CHECK(estimate_mi(shifted, y, 100) == doctest::Approx(base).epsilon(1e-12));
    CHECK(estimate_mi(x, flipped, 100) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("select_terms uses a strict threshold and is monotone") {
  SelectionRule rule;
  CHECK(select_terms(table_of({{0.004, 0.001}}), rule) == std::vector<std::size_t>{0});
  CHECK(select_terms(table_of({{0.0035, 0.0035}}), rule).empty());

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(0.0, 0.01);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 200; ++i) rows.push_back({unit(rng), unit(rng)});
  const auto t = table_of(rows);
  std::size_t previous = rows.size() + 1;
  for (double threshold = 0.0; threshold <= 0.011; threshold += 0.0005) {
    rule.threshold_bits = threshold;
    const auto selected = select_terms(t, rule);
    CHECK(selected.size() <= previous);
    CHECK(std::is_sorted(selected.begin(), selected.end()));
    previous = selected.size();
  }
}

TEST_CASE("compute_mi_table on a two-category corpus") {
  const Eigen::MatrixXd a{{0.5, 0.5, 0.0}, {0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.0, 0.5, 0.5}};
  const auto m = testing::from_dense(a);
  const std::vector<std::string> labels{"A", "A", "B", "B"};
  const Vocabulary vocab({"x", "y", "z"});
  const auto t = compute_mi_table(m, labels, vocab, SelectionRule{});
  CHECK(t.categories == std::vector<std::string>{"A", "B"});
  CHECK(t.terms == vocab.terms());
  CHECK(t.values(0, 0) == doctest::Approx(1.0));
  CHECK(t.values(0, 1) == doctest::Approx(1.0));
  CHECK(t.values(1, 0) == 0.0);
  CHECK(t.values(1, 1) == 0.0);
  CHECK(select_terms(t, SelectionRule{}) == std::vector<std::size_t>{0, 2});

  const std::vector<std::string> one{"A"};
  CHECK_THROWS(compute_mi_table(m.select_rows(std::vector<std::size_t>{0}), one, vocab, SelectionRule{}));
  CHECK_THROWS(compute_mi_table(build_tfm({}, vocab), {}, vocab, SelectionRule{}));
}

TEST_CASE("compute_mi_table is identical across thread counts") {
  std::mt19937_64 rng(33);
  const auto a = testing::sparse_probability_matrix(60, 80, 0.1, rng);
  std::vector<std::string> labels;
  for (int i = 0; i < 60; ++i) labels.push_back("c" + std::to_string(i % 4));
  std::vector<std::string> terms;
  for (int j = 0; j < 80; ++j) terms.push_back("t" + std::to_string(100 + j));
  const Vocabulary vocab(terms);
  const auto m = testing::from_dense(a);
  const auto serial = compute_mi_table(m, labels, vocab, SelectionRule{}, 1);
  const auto parallel = compute_mi_table(m, labels, vocab, SelectionRule{}, 4);
  CHECK(serial.values == parallel.values);
}

TEST_CASE("filter_vocabulary") {
  const Vocabulary v({"a", "b", "c"});
  const std::vector<std::size_t> ac{0, 2};
  const auto f = filter_vocabulary(v, ac);
  CHECK(f.terms() == std::vector<std::string>{"a", "c"});
  CHECK(f.index_of("c") == 1u);
  const std::vector<std::size_t> all{0, 1, 2};
  CHECK(filter_vocabulary(v, all) == v);
  CHECK_THROWS_AS(filter_vocabulary(v, {}), DataError);
  const std::vector<std::size_t> bad{2, 0};
  CHECK_THROWS_AS(filter_vocabulary(v, bad), InvalidArgument);
}

TEST_CASE("mi csv lists every term and category") {
  std::ostringstream out;
  write_mi_csv(out, table_of({{0.25, 0.5}}));
  CHECK(out.str() == "term,category,mi_bits\nt0,a,0.25\nt0,b,0.5\n");
}
