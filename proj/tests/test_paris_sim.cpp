#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "dprog/error.hpp"
#include "dprog/paris_sim.hpp"
#include "fixtures.hpp"

using namespace dprog;

namespace {

const ParisParams kBlue{2.65, 6e-13, 300.0, 3.0};

bool throws_kind(ErrorKind kind, auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind() == kind;
  }
  return false;
}

}  // namespace

TEST_CASE("make_grid spacing") {
  CHECK(make_grid(2, 100).cycles == std::vector<double>{0, 100});
  CHECK(make_grid(5, 8).cycles == std::vector<double>{0, 2, 4, 6, 8});
  const auto g = make_grid(100, 990);
  REQUIRE(g.size() == 100);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g.cycles[i] - g.cycles[i - 1] == doctest::Approx(10.0));
  CHECK(throws_kind(ErrorKind::InvalidArgument, [] { make_grid(1, 10); }));
  CHECK(throws_kind(ErrorKind::InvalidArgument, [] { make_grid(5, 0); }));
}

TEST_CASE("simulate_curve rejects a degenerate grid and bad parameters") {
  TimeGrid flat{{0.0, 0.0}};
  CHECK(throws_kind(ErrorKind::InvalidArgument, [&] { simulate_curve(kBlue, flat); }));
  TimeGrid uneven{{0.0, 1.0, 3.0}};
  CHECK(throws_kind(ErrorKind::InvalidArgument, [&] { simulate_curve(kBlue, uneven); }));
  auto bad = kBlue;
  bad.C = -1;
  CHECK(throws_kind(ErrorKind::InvalidArgument, [&] { simulate_curve(bad, make_grid(3, 10)); }));
}

TEST_CASE("simulate_curve agrees with a fine-step Euler integration at the first grid step") {
  const auto& t = fixtures::table1();
  const auto c = simulate_curve(kBlue, t.grid);
  CHECK(c.values[0] == kBlue.a0);

  const double dN = t.grid.cycles[1] / 1e6;
  double a = kBlue.a0;
  for (int i = 0; i < 1000000; ++i)
    a += dN * kBlue.C * std::pow(kBlue.delta_sigma * std::sqrt(M_PI * a), kBlue.m);
  CHECK(std::abs(c.values[1] - a) / a < 1e-3);
}

TEST_CASE("integration converges once substeps reach 64") {
  const auto& t = fixtures::table1();
  for (std::size_t s : {64, 128, 256}) {
    const auto a = simulate_curve(kBlue, t.grid, {s, 1000.0}).values.back();
    const auto b = simulate_curve(kBlue, t.grid, {2 * s, 1000.0}).values.back();
    CHECK(std::abs(a - b) / b < 1e-4);
  }
}

TEST_CASE("noiseless curves are increasing and convex") {
  for (const auto& c : fixtures::table1().curves) {
    for (std::size_t j = 1; j < c.values.size(); ++j) CHECK(c.values[j] > c.values[j - 1]);
    for (std::size_t j = 2; j < c.values.size(); ++j)
      CHECK(c.values[j] - 2 * c.values[j - 1] + c.values[j - 2] >= 0.0);
  }
}

TEST_CASE("curves increase with m and with C") {
  const auto& g = fixtures::table1().grid;
  const auto base = simulate_curve(kBlue, g);
  auto more_m = kBlue;
  more_m.m *= 1.002;
  auto more_c = kBlue;
  more_c.C *= 1.05;
  const auto vm = simulate_curve(more_m, g).values;
  const auto vc = simulate_curve(more_c, g).values;
  for (std::size_t j = 1; j < g.size(); ++j) {
    CHECK(vm[j] > base.values[j]);
    CHECK(vc[j] > base.values[j]);
  }
}

TEST_CASE("runaway growth names the grid index") {
  auto fast = kBlue;
  fast.C *= 50;
  try {
    simulate_curve(fast, fixtures::table1().grid);
    FAIL("expected a numerical error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Numerical);
    CHECK(std::string(e.what()).find("index") != std::string::npos);
  }
}

TEST_CASE("calibration hits the requested terminal length") {
  const ParisParams green{2.65 * 1.001, 6.72e-13, 300, 3};
  const double n = calibrate_cycle_extent(green, 20.0, 100);
  const auto c = simulate_curve(green, make_grid(100, n));
  CHECK(c.values.back() == doctest::Approx(20.0).epsilon(1e-9));
}

TEST_CASE("degrade") {
  const auto blue = simulate_curve(kBlue, fixtures::table1().grid, {}, "blue");

  SUBCASE("zero noise is the identity") {
    const auto d = degrade(blue, 0.0, 7, Fidelity::High);
    CHECK(d.values == blue.values);
    CHECK(d.fidelity == Fidelity::High);
  }
  SUBCASE("same seed, same output") {
    CHECK(degrade(blue, 0.5, 1, Fidelity::Low).values == degrade(blue, 0.5, 1, Fidelity::Low).values);
    CHECK(degrade(blue, 0.5, 1, Fidelity::Low).values != degrade(blue, 0.5, 2, Fidelity::Low).values);
  }
  SUBCASE("standard deviation over seeds") {
    // With 1000 seeds a single point's sample sd has about 2.2% standard
    // error, so a 5% band fails a few of 100 points by chance. The pooled
    // check uses 1000 seeds; the per-point check uses 10000 (0.7% error).
    const std::size_t n = blue.values.size();
    auto sds = [&](std::uint64_t seeds) {
      std::vector<double> s1(n, 0.0), s2(n, 0.0);
      for (std::uint64_t k = 1; k <= seeds; ++k) {
        const auto d = degrade(blue, 0.5, k, Fidelity::Low);
        for (std::size_t j = 0; j < n; ++j) {
          const double r = d.values[j] - blue.values[j];
          s1[j] += r;
          s2[j] += r * r;
        }
      }
      std::vector<double> out(n);
      const double N = static_cast<double>(seeds);
      for (std::size_t j = 0; j < n; ++j)
        out[j] = std::sqrt((s2[j] - s1[j] * s1[j] / N) / (N - 1));
      return out;
    };
    double pooled = 0.0;
    for (double sd : sds(1000)) pooled += sd * sd / static_cast<double>(n);
    CHECK(std::abs(std::sqrt(pooled) - 0.5) / 0.5 < 0.05);
    for (double sd : sds(10000)) CHECK(std::abs(sd - 0.5) / 0.5 < 0.05);
  }
  SUBCASE("only truth curves can be degraded") {
    const auto d = degrade(blue, 0.5, 1, Fidelity::Low);
    CHECK(throws_kind(ErrorKind::InvalidArgument, [&] { degrade(d, 0.5, 1, Fidelity::Low); }));
    CHECK(throws_kind(ErrorKind::InvalidArgument, [&] { degrade(blue, -1.0, 1, Fidelity::Low); }));
  }
}

TEST_CASE("curve files round-trip exactly") {
  auto c = degrade(simulate_curve(kBlue, fixtures::table1().grid, {}, "blue"), 0.5, 3, Fidelity::Low);
  c.splice_index = 40;
  const auto dir = std::filesystem::temp_directory_path() / "dprog_test_curve";
  std::filesystem::remove_all(dir);
  write_curve(c, dir / "blue_low.csv");
  const auto r = read_curve(dir / "blue_low.csv");
  CHECK(r.structure_id == "blue");
  CHECK(r.fidelity == Fidelity::Low);
  CHECK(r.values == c.values);
  CHECK(r.grid == c.grid);
  CHECK(r.splice_index == std::optional<std::size_t>(40));
  std::filesystem::remove_all(dir);
}
