#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "oracles.hpp"
#include "sjl/equidist.hpp"
#include "sjl/errors.hpp"
#include "sjl/rng.hpp"

using namespace sjl;

namespace {

constexpr double kPi = std::numbers::pi;

double uniform(CounterRng& rng) { return static_cast<double>(rng.next() >> 11) * 0x1.0p-53; }

SpectralConfig reference_config() {
  SpectralConfig config;
  config.coupling = ConstantCoupling{0.5};
  config.energy = EnergyPoint::from_lambda(0.7);
  config.disorder.seed = 77;
  return config;
}

}  // namespace

TEST_CASE("weyl sums") {
  const std::vector<double> constant(100, 0.4);
  CHECK(std::abs(weyl_sum(constant, 3)) == doctest::Approx(1.0));

  std::vector<double> quarter;
  for (int n = 1; n <= 100; ++n) quarter.push_back(n * kPi / 2);
  CHECK(std::abs(weyl_sum(quarter, 1)) < 1e-14);

  const double phi = std::acos(0.35);
  std::vector<double> rotation;
  for (int n = 1; n <= 10000; ++n) rotation.push_back(n * phi);
  const auto s = weyl_sum(rotation, 1);
  const std::complex<double> z = std::polar(1.0, 2 * phi);
  const auto closed = z * (1.0 - std::pow(z, 10000)) / (10000.0 * (1.0 - z));
  CHECK(std::abs(s) < 0.02);
  CHECK(std::abs(s - closed) < 1e-10);

  CounterRng rng(1, 1, 1);
  std::vector<double> random;
  for (int i = 0; i < 500; ++i) random.push_back(kPi * uniform(rng));
  for (std::int64_t h : {1, 2, 7}) {
    CHECK(std::abs(weyl_sum(random, h)) <= 1.0);
    CHECK(std::abs(weyl_sum(random, -h) - std::conj(weyl_sum(random, h))) < 1e-15);
  }
  const auto prefix = weyl_sum_prefix_abs2(random, 2);
  CHECK(prefix.back() == doctest::Approx(std::norm(weyl_sum(random, 2))).epsilon(1e-12));
  CHECK_THROWS_AS(weyl_sum(random, 0), PreconditionError);
}

TEST_CASE("dirichlet kernel bound") {
  const auto at_half_pi = dirichlet_bound(1, 1, kPi / 2);
  CHECK(at_half_pi.value == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(at_half_pi.cap == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(dirichlet_bound(5, 2, kPi / 2).value == doctest::Approx(1.0).epsilon(1e-12));
  CounterRng rng(2, 2, 2);
  for (int i = 0; i < 1000; ++i) {
    const auto n = static_cast<std::int64_t>(1 + rng.uniform_below(1000));
    const auto h = static_cast<std::int64_t>(1 + rng.uniform_below(20));
    const double phi = kPi * uniform(rng);
    const auto b = dirichlet_bound(n, h, phi);
    CHECK(b.value <= b.cap * (1 + 1e-12));
    CHECK(b.value <= 1.0);
  }
}

TEST_CASE("star discrepancy") {
  for (std::size_t n : {1u, 7u, 100u}) {
    std::vector<double> grid;
    for (std::size_t i = 1; i <= n; ++i) grid.push_back((2.0 * i - 1) / (2.0 * n));
    CHECK(star_discrepancy_unit(grid) == doctest::Approx(0.5 / n).epsilon(1e-14));
  }
  CHECK(star_discrepancy_unit({0.0}) == 1.0);
  CHECK(star_discrepancy_unit({0.1, 0.5, 0.9}) == doctest::Approx(7.0 / 30.0).epsilon(1e-15));
  CHECK_THROWS_AS(star_discrepancy_unit({}), PreconditionError);

  CounterRng rng(3, 3, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.uniform_below(200);
    std::vector<double> u;
    for (std::size_t i = 0; i < n; ++i) {
      // Some repeated values on a coarse lattice to exercise ties.
      u.push_back(trial % 3 == 0 ? static_cast<double>(rng.uniform_below(17)) / 17.0 : uniform(rng));
    }
    const double fast = star_discrepancy_unit(u);
    CHECK(fast == oracle::brute_force_star_discrepancy(u));
    CHECK(fast >= 0.5 / static_cast<double>(n));
    CHECK(fast <= 1.0);
  }
}

TEST_CASE("koksma factor") {
  CHECK(koksma_factor(0.0, 3.0, 100).c_n == 1.0);
  CHECK(koksma_factor(0.2, 0.0, 100).c_n == 1.0);
  double prev = 0.0;
  for (double d : {0.1, 0.01, 0.001, 1e-5}) {
    const auto k = koksma_factor(d, 5.0, 1000);
    CHECK(k.c_n > 0.0);
    CHECK(k.c_n <= 1.0);
    CHECK(k.c_n_root > prev);
    prev = k.c_n_root;
  }
  CHECK(prev == doctest::Approx(1.0).epsilon(1e-4));
  const auto report = star_discrepancy(std::vector<double>{0.3, 1.2, 2.5}, 2.0);
  CHECK(report.koksma_c_n == doctest::Approx(std::exp(-3 * report.d_star * 2.0 / kPi)));
}

TEST_CASE("identical ensemble members give the single trajectory value") {
  auto config = reference_config();
  config.depth = 64;
  const auto realization = realize(config, 0);
  const auto t = run_trajectory(config, realization);
  const std::vector<PrueferTrajectory> ensemble(5, t);
  const std::vector<std::size_t> ns{16, 64};
  const auto report = weyl_report(ensemble, config.energy, 2, ns);
  for (const auto& p : report.points) {
    CHECK(p.i_h == doctest::Approx(std::norm(weyl_sum(std::span(t.theta).first(p.n), 2))).epsilon(1e-12));
    CHECK(p.standard_error == 0.0);
  }
}

TEST_CASE("Weyl averages respect the Dirichlet-type bound at an irrational energy") {
  const std::vector<std::int64_t> hs{1, 2, 3, 5, 8};
  const std::vector<std::size_t> ns{128, 512};
  const auto report = del_series_diagnostic(reference_config(), 64, hs, ns, 2);
  CHECK(report.all_within_bound());
  for (const auto& r : report.per_h) {
    CHECK_FALSE(r.resonant);
    CHECK(r.verdict == TrendVerdict::ConvergentTrend);
    CHECK(r.points.back().partial_sum > r.points.front().partial_sum);
  }
  REQUIRE(report.discrepancy.size() == 2);
  CHECK(report.discrepancy[1].median_d_star < report.discrepancy[0].median_d_star);
}

TEST_CASE("a rational energy at resonance stagnates") {
  auto config = reference_config();
  config.energy = EnergyPoint::rational_multiple(1, 3);
  const std::vector<std::int64_t> hs{3};
  const std::vector<std::size_t> ns{64, 256, 1024};
  const auto report = del_series_diagnostic(config, 16, hs, ns, 1);
  REQUIRE(report.per_h.size() == 1);
  CHECK(report.per_h[0].resonant);
  CHECK(report.per_h[0].verdict == TrendVerdict::DivergentTrend);
  CHECK(report.per_h[0].points.back().i_h > 0.1);
}

TEST_CASE("undersized ensembles are refused") {
  const std::vector<std::int64_t> hs{1};
  const std::vector<std::size_t> ns{32};
  CHECK_THROWS_AS(del_series_diagnostic(reference_config(), 1, hs, ns), PreconditionError);
  CHECK_THROWS_AS(del_series_diagnostic(reference_config(), 15, hs, ns), PreconditionError);
}

TEST_CASE("median") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK_THROWS_AS(median({}), PreconditionError);
}
