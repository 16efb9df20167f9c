#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "sjl/errors.hpp"
#include "sjl/model.hpp"

using namespace sjl;

namespace {

std::vector<long> as_longs(const std::vector<BigInt>& v) {
  std::vector<long> out;
  for (const auto& x : v) out.push_back(x.get_si());
  return out;
}

}  // namespace

TEST_CASE("exponential positions start at beta - 1 and add beta^j") {
  CHECK(as_longs(generate_positions(ExponentialSparsity{2}, 3)) == std::vector<long>{1, 5, 13});
  CHECK(as_longs(generate_positions(ExponentialSparsity{2}, 1)) == std::vector<long>{1});
  CHECK(as_longs(generate_positions(ExponentialSparsity{3}, 3)) == std::vector<long>{2, 11, 38});

  const auto big = generate_positions(ExponentialSparsity{2}, 2000);
  // a_j = 2^{j+1} - 3 exactly.
  BigInt expected;
  mpz_ui_pow_ui(expected.get_mpz_t(), 2, 2001);
  CHECK(big.back() == expected - 3);
}

TEST_CASE("stretched positions accumulate floor(exp(c n^gamma)) from a_0 = 0") {
  CHECK(as_longs(generate_positions(StretchedSparsity{1.0, 2.0}, 3)) == std::vector<long>{2, 56, 8159});
  CHECK(as_longs(generate_positions(StretchedSparsity{1.0, 0.5}, 3)) ==
        std::vector<long>{2, 2 + 4, 2 + 4 + 5});
}

TEST_CASE("position generation rejects bad requests") {
  CHECK_THROWS_AS(generate_positions(ExponentialSparsity{2}, 0), PreconditionError);
  CHECK_THROWS_AS(generate_positions(ExponentialSparsity{1}, 3), ConfigError);
  CHECK_THROWS_AS(generate_positions(StretchedSparsity{0.1, 1.0}, 3), ConfigError);  // e^0.1 -> gap 1
  CHECK_THROWS_AS(generate_positions(StretchedSparsity{1.0, 5.0}, 20), PrecisionError);
  CHECK_THROWS_AS(generate_positions(StretchedSparsity{-1.0, 1.0}, 3), ConfigError);
}

TEST_CASE("sparsity ratios") {
  DisorderLaw law;
  law.seed = 11;
  const auto pos = generate_positions(ExponentialSparsity{2}, 41);
  const auto real = sample_disorder(law, pos, 41, 0);
  const double ratio = mpf_class(real.positions[39]).get_d() / mpf_class(real.positions[40]).get_d();
  CHECK(std::abs(ratio - 0.5) < 0.005);

  const auto st = generate_positions(StretchedSparsity{1.0, 2.0}, 6);
  const auto st_real = sample_disorder(law, st, 6, 0);
  for (int n = 3; n < 6; ++n) {
    const double r = mpf_class(st_real.positions[n - 1]).get_d() / mpf_class(st_real.positions[n]).get_d();
    CHECK(r < 0.01);
  }
}

TEST_CASE("support half widths") {
  DisorderLaw linear;
  CHECK(support_half_width(linear, 1) == 1);
  CHECK(support_half_width(linear, 17) == 17);
  DisorderLaw power{PowerEnvelope{0.5}, 0};
  CHECK(support_half_width(power, 4) == 2);
  CHECK(support_half_width(power, 8) == 2);
  DisorderLaw cube{PowerEnvelope{1.0 / 3.0}, 0};
  CHECK(support_half_width(cube, 8) == 2);
  CHECK(support_half_width(cube, 27) == 3);
  CHECK_THROWS_AS(validate(DisorderLaw{PowerEnvelope{0.0}, 0}), ConfigError);
}

TEST_CASE("first disorder variable is uniform on {-1, 0, 1}") {
  DisorderLaw law;
  law.seed = 2024;
  const auto pos = generate_positions(ExponentialSparsity{2}, 1);
  std::map<long, int> counts;
  constexpr int kSamples = 30000;
  for (int i = 0; i < kSamples; ++i) counts[sample_disorder(law, pos, 1, i).omega[0]]++;
  REQUIRE(counts.size() == 3);
  for (long w : {-1L, 0L, 1L}) CHECK(std::abs(counts[w] / double(kSamples) - 1.0 / 3.0) < 0.015);
}

TEST_CASE("power envelope draws stay in the support and hit both ends") {
  DisorderLaw law{PowerEnvelope{0.5}, 7};
  const auto pos = generate_positions(ExponentialSparsity{2}, 4);
  long lo = 0, hi = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto w = sample_disorder(law, pos, 4, i).omega[3];
    CHECK(std::abs(w) <= 2);
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  CHECK(lo == -2);
  CHECK(hi == 2);
}

TEST_CASE("sampling is deterministic in seed and sample index") {
  DisorderLaw law;
  law.seed = 99;
  const auto pos = generate_positions(ExponentialSparsity{2}, 64);
  const auto a = sample_disorder(law, pos, 64, 5);
  const auto b = sample_disorder(law, pos, 64, 5);
  const auto c = sample_disorder(law, pos, 64, 6);
  CHECK(a.omega == b.omega);
  CHECK(a.positions == b.positions);
  CHECK(a.omega != c.omega);
}

TEST_CASE("every realization is admissible") {
  DisorderLaw law;
  law.seed = 3;
  const auto pos = generate_positions(ExponentialSparsity{2}, 30);
  std::size_t rejections = 0;
  for (int s = 0; s < 500; ++s) {
    const auto r = sample_disorder(law, pos, 30, s);
    CHECK(r.positions[0] >= 0);
    CHECK(r.gaps[0] == r.positions[0]);
    for (std::size_t j = 1; j < r.positions.size(); ++j) {
      CHECK(r.gaps[j] >= 2);
      CHECK(r.positions[j] - r.positions[j - 1] == r.gaps[j]);
    }
    rejections += r.rejections;
  }
  // a_2 - a_1 = 4 with omega_1, omega_2 in +-1, +-2 can give gap 1; those get redrawn.
  CHECK(rejections > 0);
}

TEST_CASE("sampling fails loudly when the gap budget is too tight") {
  DisorderLaw law;
  law.seed = 1;
  // Gaps of 2 with a linear window: only w_j = w_{j-1} + ... keeps the sites apart.
  const auto pos = generate_positions(StretchedSparsity{std::log(2.5), 0.01}, 400);
  CHECK_THROWS_AS(
      {
        for (int s = 0; s < 50; ++s) (void)sample_disorder(law, pos, 400, s);
      },
      PreconditionError);
  CHECK_THROWS_AS(sample_disorder(law, pos, 500, 0), PreconditionError);
}

TEST_CASE("coupling laws") {
  CHECK(coupling_at(ConstantCoupling{0.5}, 7) == 0.5);
  CHECK(coupling_at(DecayingCoupling{}, 1) == doctest::Approx(std::exp(-0.25)).epsilon(1e-15));
  double prev = coupling_at(DecayingCoupling{}, 2);
  for (std::size_t k = 3; k < 200; ++k) {
    const double q = coupling_at(DecayingCoupling{}, k);
    CHECK(q > 0.0);
    CHECK(q < prev);
    prev = q;
  }
  CHECK_THROWS_AS(coupling_at(ConstantCoupling{0.5}, 0), PreconditionError);
  CHECK_THROWS_AS(validate(CouplingLaw{ConstantCoupling{1.5}}), ConfigError);
  CHECK_THROWS_AS(validate(CouplingLaw{DecayingCoupling{1.0, 3.0, 1.0, 1.5}}), ConfigError);
  CHECK_THROWS_AS(validate(CouplingLaw{DecayingCoupling{1.0, 2.0, 1.0, 2.5}}), ConfigError);
  CHECK_THROWS_AS(validate(CouplingLaw{DecayingCoupling{0.1, 2.0, 5.0, 1.5}}), ConfigError);
  CHECK_NOTHROW(validate(CouplingLaw{DecayingCoupling{1.0, 1.5, 1.0, 1.0}}));
}

TEST_CASE("decaying coupling product is bracketed with a positive lower coefficient") {
  const auto bracket = verify_product_bracket(DecayingCoupling{}, 500);
  CHECK(bracket.c_lower > 0.0);
  CHECK(bracket.c_upper >= bracket.c_lower);
  CHECK(std::isfinite(bracket.c_upper));
}

TEST_CASE("rationality detection") {
  CHECK(EnergyPoint::from_lambda(0.7).is_irrational_certified());
  const auto sqrt2 = EnergyPoint::from_lambda(2.0 * std::cos(std::numbers::pi / 4));
  REQUIRE(sqrt2.is_rational_multiple());
  const auto r = std::get<RationalMultiple>(sqrt2.rationality()).ratio;
  CHECK(r.num == 1);
  CHECK(r.den == 4);
  CHECK(EnergyPoint::from_lambda(0.0).is_rational_multiple());
  CHECK(EnergyPoint::from_lambda(1.0).is_rational_multiple());
  CHECK(EnergyPoint::from_varphi(std::numbers::pi / 3).is_rational_multiple());
  CHECK(EnergyPoint::from_lambda(0.35).is_irrational_certified());
  // Only points built from an exact ratio reduce exactly.
  CHECK_FALSE(EnergyPoint::from_lambda(0.0).exact_ratio().has_value());
  const auto third = EnergyPoint::rational_multiple(2, 6);
  REQUIRE(third.exact_ratio().has_value());
  CHECK(third.exact_ratio()->num == 1);
  CHECK(third.exact_ratio()->den == 3);
  CHECK(third.lambda() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("energy points keep lambda = 2 cos varphi") {
  for (double lambda : {-1.9, -0.3, 0.0, 0.7, 1.99}) {
    const auto e = EnergyPoint::from_lambda(lambda);
    CHECK(2.0 * std::cos(e.varphi()) == doctest::Approx(lambda).epsilon(1e-14));
  }
  CHECK_THROWS_AS(EnergyPoint::from_lambda(2.0), PreconditionError);
  CHECK_THROWS_AS(EnergyPoint::from_varphi(0.0), PreconditionError);
  CHECK_THROWS_AS(EnergyPoint::rational_multiple(3, 3), PreconditionError);
}

TEST_CASE("precision policy") {
  SpectralConfig config;
  config.depth = 100;
  const auto r = realize(config, 0);
  CHECK(required_precision_bits(r) == bit_length(r.positions.back() + 1) + 96);
  CHECK(effective_precision_bits(config, r) == required_precision_bits(r));
  config.precision_bits = 64;
  CHECK_THROWS_AS(effective_precision_bits(config, r), PrecisionError);
  config.precision_bits = 1000;
  CHECK(effective_precision_bits(config, r) == 1000);
}
