#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "sjl/equidist.hpp"
#include "sjl/errors.hpp"
#include "sjl/pruefer.hpp"
#include "sjl/rng.hpp"
#include "sjl/transfer.hpp"

using namespace sjl;

namespace {

constexpr double kPi = std::numbers::pi;

double uniform(CounterRng& rng) { return static_cast<double>(rng.next() >> 11) * 0x1.0p-53; }

// Distance on the circle R / pi Z.
double circle_distance(double a, double b) {
  const double d = std::fmod(std::abs(a - b), kPi);
  return std::min(d, kPi - d);
}

SpectralConfig reference_config(std::size_t depth) {
  SpectralConfig config;
  config.sparsity = ExponentialSparsity{2};
  config.coupling = ConstantCoupling{0.5};
  config.energy = EnergyPoint::from_lambda(0.7);
  config.depth = depth;
  config.disorder.seed = 20240611;
  return config;
}

}  // namespace

TEST_CASE("reduce_angle basics") {
  const double phi = std::acos(0.35);
  const auto one = reduce_angle(BigInt(1), phi, 128);
  CHECK(one.angle == phi);
  CHECK_FALSE(one.odd);

  const PhaseReducer half(EnergyPoint::rational_multiple(1, 2), 128);
  const auto five = half.reduce(BigInt(5));
  CHECK(five.angle == doctest::Approx(kPi / 2).epsilon(1e-16));
  CHECK_FALSE(five.odd);
  const auto six = half.reduce(BigInt(6));
  CHECK(six.angle == 0.0);
  CHECK(six.odd);

  // The double nearest pi/2 lies just below it, so 5 phi/pi is just below 5/2.
  const auto five_double = reduce_angle(BigInt(5), kPi / 2, 128);
  CHECK(five_double.angle == doctest::Approx(kPi / 2).epsilon(1e-15));
  CHECK_FALSE(five_double.odd);

  CHECK_THROWS_AS(reduce_angle(BigInt(-1), phi, 128), PreconditionError);
  BigInt huge;
  mpz_ui_pow_ui(huge.get_mpz_t(), 2, 200);
  CHECK_THROWS_AS(reduce_angle(huge, phi, 200), PrecisionError);
  // 2^200 has bit length 201.
  CHECK(reduce_angle(huge, phi, 201 + 4 + 48).certified_bits == 48);
}

TEST_CASE("reduce_angle matches an independent 400-bit computation") {
  const double phi = std::acos(0.35);
  BigInt a;
  mpz_ui_pow_ui(a.get_mpz_t(), 2, 100);
  a += 1;
  const auto r = reduce_angle(a, phi, bit_length(a) + 96);
  const auto o = oracle::reduce_400(a, phi);
  CHECK(std::abs(r.angle - o.angle) < kPi * 0x1.0p-48);
  CHECK(r.odd == o.odd);
  CHECK(r.certified_bits >= 48);

  CounterRng rng(21, 22, 23);
  gmp_randclass gmp_rng(gmp_randinit_default);
  gmp_rng.seed(42);
  for (int i = 0; i < 300; ++i) {
    const unsigned bits = 1 + static_cast<unsigned>(rng.uniform_below(250));
    const BigInt m = gmp_rng.get_z_bits(bits);
    const double angle = 0.001 + (kPi - 0.002) * uniform(rng);
    const auto got = reduce_angle(m, angle, bits + 96);
    const auto want = oracle::reduce_400(m, angle);
    const double d = circle_distance(got.angle, want.angle);
    CHECK(d < kPi * 0x1.0p-48);
    // Parity is only meaningful away from the wrap point.
    if (std::min(want.angle, kPi - want.angle) > 1e-9) CHECK(got.odd == want.odd);
  }
}

TEST_CASE("vector step agrees with the literal arctan recursion") {
  CounterRng rng(31, 32, 33);
  for (int i = 0; i < 10000; ++i) {
    const double theta = kPi * uniform(rng);
    const double phi = 0.05 + (kPi - 0.1) * uniform(rng);
    const double q = 0.05 + 0.95 * uniform(rng);
    const double gap_angle = kPi * uniform(rng);
    if (std::abs(std::cos(theta)) < 1e-6) continue;
    const double v = pruefer_step(theta, ReducedAngle{gap_angle, false, 64}, phi, q);
    const double l = oracle::literal_pruefer_step(theta, gap_angle, phi, q);
    CHECK(v >= 0.0);
    CHECK(v < kPi);
    CHECK(circle_distance(v, l) < 1e-12);
  }
}

TEST_CASE("pruefer step special cases") {
  const double phi = std::acos(0.35);
  const PhaseReducer reducer(phi, 256);
  const BigInt gap(12345);
  const auto rot = reducer.reduce(gap);
  CHECK(circle_distance(pruefer_step(1.0, gap, reducer, phi, 1.0), 1.0 - rot.angle) < 1e-15);

  // lambda = 0: the image of (cos, sin)(pi/4) under diag(0.5, 2) has angle arctan 4.
  const double half_pi = std::acos(0.0);
  const auto rot2 = reduce_angle(BigInt(7), half_pi, 128);
  CHECK(circle_distance(pruefer_step(kPi / 4, rot2, half_pi, 0.5), std::atan(4.0) - rot2.angle) < 1e-15);
  CHECK_THROWS_AS(pruefer_step(1.0, BigInt(1), reducer, phi, 0.5), PreconditionError);
}

TEST_CASE("f and its coefficient form") {
  for (double t : {0.0, 0.3, 1.2, 2.9}) CHECK(std::abs(f_eval(t, 1.0, 0.8)) < 1e-15);

  const auto k = f_coefficients(0.5, kPi / 4);
  CHECK(k.a == doctest::Approx(0.8125).epsilon(1e-15));
  CHECK(k.b == doctest::Approx(-0.1875).epsilon(1e-15));
  CHECK(k.c == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(k.a * k.a == doctest::Approx(0.66015625).epsilon(1e-15));
  CHECK(k.b * k.b + k.c * k.c + 0.0625 == doctest::Approx(0.66015625).epsilon(1e-15));

  CounterRng rng(41, 42, 43);
  for (int i = 0; i < 1000; ++i) {
    const double t = kPi * uniform(rng);
    const double q = 0.05 + 0.95 * uniform(rng);
    const double phi = 0.05 + (kPi - 0.1) * uniform(rng);
    const auto c = f_coefficients(q, phi);
    CHECK(f_eval(t, c) == doctest::Approx(f_eval(t, q, phi)).epsilon(1e-9));
    CHECK(c.a * c.a == doctest::Approx(c.b * c.b + c.c * c.c + std::pow(q, 4)).epsilon(1e-12));
  }

  const double phi = std::acos(0.35);
  const auto e = ergodic_constants(0.5, phi);
  CHECK(std::abs(oracle::midpoint_mean_f(0.5, phi, 1000000) - e.log_integral) < 1e-6);
  CHECK(std::abs(oracle::midpoint_mean_f(0.3, 0.4, 1000000) - ergodic_constants(0.3, 0.4).log_integral) < 1e-6);
}

TEST_CASE("ergodic constants") {
  const auto free = ergodic_constants(1.0, 1.1);
  CHECK(free.r == 1.0);
  CHECK(free.log_integral == 0.0);
  CHECK(free.total_variation == 0.0);

  const auto centre = ergodic_constants(0.5, kPi / 2);
  CHECK(centre.r == doctest::Approx(1.5625).epsilon(1e-15));
  CHECK(centre.log_integral == doctest::Approx(std::log(1.5625 * 0.25)).epsilon(1e-15));

  CHECK(ergodic_constants(0.5, 1e-3).r > 1e5);
  CHECK(ergodic_constants(0.5, kPi - 1e-3).r > 1e5);

  CounterRng rng(51, 52, 53);
  for (int i = 0; i < 200; ++i) {
    const double q = 0.05 + 0.95 * uniform(rng);
    const double phi = 0.05 + (kPi - 0.1) * uniform(rng);
    const auto e = ergodic_constants(q, phi);
    CHECK(e.r >= 1.0);
    CHECK(e.log_integral == doctest::Approx(std::log(e.r) + 2 * std::log(q)).epsilon(1e-14));
    CHECK(std::abs(e.total_variation - oracle::total_variation_closed_form(q, phi)) < 1e-9);
  }
  CHECK_THROWS_AS(ergodic_constants(0.5, 0.0), PreconditionError);
}

TEST_CASE("free evolution keeps the radius") {
  auto config = reference_config(300);
  config.coupling = ConstantCoupling{1.0};
  const auto t = run_trajectory(config, realize(config, 0));
  for (double x : t.log_R2) CHECK(std::abs(x) < 1e-12);
}

TEST_CASE("trajectory invariants") {
  const auto config = reference_config(500);
  const auto t = run_trajectory(config, realize(config, 3));
  double sum = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    CHECK(t.theta[k] >= 0.0);
    CHECK(t.theta[k] < kPi);
    CHECK(t.certified_bits[k] >= 48);
    sum += t.f_values[k] - 2.0 * std::log(0.5);
    CHECK(t.log_R2[k] == doctest::Approx(sum).epsilon(1e-12));
  }
  CHECK_FALSE(t.excluded_energy);
}

TEST_CASE("radius equals the conjugated product applied to v0") {
  const auto config = reference_config(8);
  CounterRng rng(61, 62, 63);
  for (std::uint64_t sample = 0; sample < 16; ++sample) {
    const auto realization = realize(config, sample);
    const auto naive = oracle::naive_block_products(config, realization);
    const double theta0 = kPi * uniform(rng);
    const auto t = run_trajectory(config, realization, theta0);
    for (std::size_t n = 0; n < 8; ++n) {
      const Vec2 w = naive.conjugated[n] * Vec2{std::cos(theta0), std::sin(theta0)};
      const double ref = std::log(w.x * w.x + w.y * w.y);
      CHECK(std::abs(t.log_R2[n] - ref) / std::max(1.0, std::abs(ref)) < 1e-8);
    }
  }
}

TEST_CASE("boundary phase maps to the angle of U v") {
  const double phi = std::acos(0.35);
  CHECK(theta0_from_boundary(0.0, phi) == doctest::Approx(kPi / 2));
  const double t0 = theta0_from_boundary(0.7, phi);
  const auto uc = conjugator(phi);
  const Vec2 v = uc.u.m * Vec2{std::cos(0.7), std::sin(0.7)};
  CHECK(std::abs(std::sin(t0) * v.x - std::cos(t0) * v.y) < 1e-14);
}

TEST_CASE("angles are stable under extra precision") {
  auto config = reference_config(400);
  const auto realization = realize(config, 1);
  const auto base = run_trajectory(config, realization);
  config.precision_bits = required_precision_bits(realization) + 64;
  const auto more = run_trajectory(config, realization);
  for (std::size_t k = 0; k < base.size(); ++k)
    CHECK(circle_distance(base.theta[k], more.theta[k]) <= 0x1.0p-48);
}

TEST_CASE("ergodic limit and the Koksma bound") {
  const auto config = reference_config(2000);
  const auto e = ergodic_constants(0.5, config.energy.varphi());
  const auto trajectories = run_ensemble(config, 32, 2);
  double mean = 0.0, growth = 0.0;
  for (const auto& t : trajectories) {
    mean += t.mean_f();
    growth += std::exp(t.log_R2.back() / 2000.0);
    // Koksma: |mean - integral| <= D* V with D* measured on [0, 1).
    const auto d = star_discrepancy(t.theta, e.total_variation);
    CHECK(std::abs(t.mean_f() - e.log_integral) <= d.d_star * e.total_variation);
  }
  mean /= 32.0;
  growth /= 32.0;
  CHECK(std::abs(mean - e.log_integral) < 0.1 * std::abs(e.log_integral));
  CHECK(std::abs(growth - e.r) < 0.1 * e.r);
}

TEST_CASE("ensembles do not depend on the worker count") {
  const auto config = reference_config(300);
  const auto a = run_ensemble(config, 6, 1);
  const auto b = run_ensemble(config, 6, 3);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].theta == b[i].theta);
    CHECK(a[i].log_R2 == b[i].log_R2);
  }
}

TEST_CASE("the radius never exceeds the block norm") {
  // R_n = |M v_0| <= ||M|| = t_n. The reverse bound does not hold: v_0 can sit
  // near the contracting direction of M, so R_n may be far below t_n.
  auto config = reference_config(50);
  for (std::uint64_t sample = 0; sample < 16; ++sample) {
    const auto realization = realize(config, sample);
    const auto norms = block_norms(config, realization);
    const auto t = run_trajectory(config, realization);
    for (std::size_t n = 0; n < 50; ++n) CHECK(t.log_R2[n] <= norms.log_t2[n] + 1e-9);
  }
}
