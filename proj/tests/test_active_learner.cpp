#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "dprog/active_learner.hpp"
#include "dprog/error.hpp"
#include "dprog/io.hpp"
#include "fixtures.hpp"

using namespace dprog;
using doctest::Approx;

namespace {

ErrorRecord record(const std::string& id, double mean, std::size_t M = 40) {
  return {id, M, {mean}, mean};
}

DamageCurve high(std::vector<double> v) {
  auto c = fixtures::make_curve(std::move(v), "t");
  c.fidelity = Fidelity::High;
  return c;
}

}  // namespace

TEST_CASE("mse_error") {
  PartialObservation obs{"x", {1.0, 2.0, 3.0}, 0.5};
  CHECK(mse_error(std::vector<double>{1.0, 2.0, 3.0, 99.0}, obs) == 0.0);
  CHECK(mse_error(std::vector<double>{1.5, 2.5, 3.5}, obs) == Approx(0.25));
  CHECK(mse_error(std::vector<double>{2.0, 4.0, 6.0}, obs) == Approx(14.0 / 3.0));
  CHECK_THROWS_AS(mse_error(std::vector<double>{1.0, 2.0}, obs), Error);

  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  for (int i = 0; i < 50; ++i) {
    std::vector<double> p{z(rng), z(rng), z(rng)};
    CHECK(mse_error(p, obs) > 0.0);
  }
}

TEST_CASE("error_record per draw") {
  const auto m = fit_fpca(fixtures::table1().curves, FixedComponents{1});
  PosteriorSamples s;
  s.draws = {{0.4}, {0.4}, {0.4}};
  const auto exact = reconstruct(m, std::vector<double>{0.4});
  PartialObservation obs{"x", {exact.begin(), exact.begin() + 20}, 0.5};
  const auto r = error_record(s, m, obs);
  CHECK(r.M == 20);
  CHECK(r.per_draw_errors.size() == 3);
  for (double e : r.per_draw_errors) CHECK(e < 1e-24);

  s.draws = {{1.0}, {1.0}};
  const auto r2 = error_record(s, m, obs);
  CHECK(r2.per_draw_errors[0] == r2.per_draw_errors[1]);
  CHECK(r2.mean_error == r2.per_draw_errors[0]);
}

TEST_CASE("median of an error record") {
  ErrorRecord odd{"a", 1, {5, 1, 3}, 3};
  ErrorRecord even{"a", 1, {4, 1, 3, 2}, 2.5};
  CHECK(odd.median_error() == 3);
  CHECK(even.median_error() == 2.5);
}

TEST_CASE("select_structure") {
  std::vector<ErrorRecord> one{record("red", 1)};
  CHECK(select_structure(one).selected_structure_id == "red");

  std::vector<ErrorRecord> four{record("red", 1), record("purple", 5), record("brown", 1), record("pink", 9)};
  const auto d = select_structure(four);
  CHECK(d.selected_structure_id == "pink");
  CHECK(d.decision_step == 40);
  CHECK(d.candidate_errors.at("purple") == 5);

  std::vector<ErrorRecord> tied{record("zeta", 2), record("alpha", 2), record("mid", 1)};
  CHECK(select_structure(tied).selected_structure_id == "alpha");

  CHECK_THROWS_AS(select_structure(std::vector<ErrorRecord>{}), Error);
  std::vector<ErrorRecord> mixed{record("a", 1, 10), record("b", 2, 20)};
  CHECK_THROWS_AS(select_structure(mixed), Error);
}

TEST_CASE("selection is invariant under increasing transforms") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ErrorRecord> a, b;
    for (const char* id : {"a", "b", "c", "d"}) {
      const double e = u(rng);
      a.push_back(record(id, e));
      b.push_back(record(id, std::exp(e) + 3 * e));
    }
    CHECK(select_structure(a).selected_structure_id == select_structure(b).selected_structure_id);
  }
}

TEST_CASE("splice_curve copies both regions") {
  const std::vector<double> interp{1, 2, 3, 4, 5};
  const auto tail = high({10, 20, 30, 40, 50});

  const auto last = splice_curve(interp, tail, 4);
  CHECK(last.values == std::vector<double>{1, 2, 3, 4, 50});
  CHECK(last.splice_index == std::optional<std::size_t>(4));
  CHECK(last.fidelity == Fidelity::High);

  CHECK(splice_curve(tail.values, tail, 2).values == tail.values);

  const auto s = splice_curve(interp, tail, 2);
  CHECK(s.values == std::vector<double>{1, 2, 30, 40, 50});
  CHECK(splice_curve(s.values, tail, 2).values == s.values);

  CHECK_THROWS_AS(splice_curve(interp, tail, 0), Error);
  CHECK_THROWS_AS(splice_curve(interp, tail, 5), Error);
  auto low = tail;
  low.fidelity = Fidelity::Low;
  CHECK_THROWS_AS(splice_curve(interp, low, 2), Error);
  CHECK_THROWS_AS(splice_curve(std::vector<double>{1, 2}, tail, 1), Error);
}

TEST_CASE("update with a duplicate training curve") {
  const auto& curves = fixtures::table1().curves;
  const auto base = build_prognosis_model(curves, VarianceThreshold{0.95});
  for (const auto& c : curves) {
    const auto upd = update_model(curves, c, VarianceThreshold{0.95});
    CHECK(upd.training_scores.size() == 4);
    CHECK(std::abs(upd.prior.mu[0] - base.prior.mu[0]) < 1e-8);
    CHECK(upd.prior.sigma[0] <= base.prior.sigma[0]);
  }
}

TEST_CASE("update with the population mean curve keeps the prior centred") {
  const auto& curves = fixtures::table1().curves;
  const auto base = build_prognosis_model(curves, VarianceThreshold{0.95});
  auto mean = curves[0];
  mean.values = base.fpca.mean;
  const auto upd = update_model(curves, mean, VarianceThreshold{0.95});
  CHECK(std::abs(upd.prior.mu[0]) < 1e-12);
  CHECK(std::abs(project(upd.fpca, mean.values)[0]) < 1e-12);
}

TEST_CASE("update rejects a curve on another grid") {
  const auto& curves = fixtures::table1().curves;
  CHECK_THROWS_AS(update_model(curves, fixtures::make_curve({1, 2, 3}), FixedComponents{1}), Error);
}

TEST_CASE("decision and error record files") {
  const auto dir = std::filesystem::temp_directory_path() / "dprog_test_al";
  std::filesystem::remove_all(dir);
  std::vector<ErrorRecord> recs{{"red", 40, {0.5, 0.25}, 0.375}, {"pink", 40, {1.0, 2.0}, 1.5}};
  write_error_records(recs, dir / "e.csv");
  const auto t = io::CsvTable::parse(io::read_file(dir / "e.csv"));
  CHECK(t.header == std::vector<std::string>{"structure_id", "M", "draw_index", "error"});
  CHECK(t.rows.size() == 4);
  CHECK(t.rows[3] == std::vector<std::string>{"pink", "40", "1", "2"});

  const auto d = select_structure(recs, SelectionStatistic::Median);
  write_decision(d, dir / "d.json");
  const auto r = read_decision(dir / "d.json");
  CHECK(r.selected_structure_id == "pink");
  CHECK(r.statistic == SelectionStatistic::Median);
  CHECK(r.candidate_errors == d.candidate_errors);
  std::filesystem::remove_all(dir);
}
