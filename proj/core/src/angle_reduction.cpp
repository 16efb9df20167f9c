#include "sjl/angle_reduction.hpp"

#include <mpfr.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "sjl/errors.hpp"

namespace sjl {

// Slack between the working precision and the certified bits: one bit for the
// rounding of varphi / pi, one for the product, two spare.
namespace {
constexpr std::size_t kReductionSlackBits = 4;
}

struct PhaseReducer::Mp {
  mpfr_t ratio;  // varphi / pi
  mpfr_t pi;

  Mp(double varphi, mpfr_prec_t prec) {
    mpfr_init2(ratio, prec);
    mpfr_init2(pi, prec + 8);
    mpfr_const_pi(pi, MPFR_RNDN);
    mpfr_set_d(ratio, varphi, MPFR_RNDN);  // exact: 53 bits fit
    mpfr_div(ratio, ratio, pi, MPFR_RNDN);
  }
  ~Mp() {
    mpfr_clear(ratio);
    mpfr_clear(pi);
  }
  Mp(const Mp&) = delete;
  Mp& operator=(const Mp&) = delete;
};

PhaseReducer::PhaseReducer(const EnergyPoint& energy, std::size_t precision_bits)
    : precision_bits_(precision_bits), exact_(energy.exact_ratio()) {
  if (!exact_) mp_ = std::make_unique<Mp>(energy.varphi(), static_cast<mpfr_prec_t>(precision_bits));
}

PhaseReducer::PhaseReducer(double varphi, std::size_t precision_bits)
    : precision_bits_(precision_bits) {
  if (!(varphi > 0.0 && varphi < std::numbers::pi))
    throw PreconditionError("PhaseReducer: varphi must lie in (0, pi)");
  if (precision_bits < MPFR_PREC_MIN) throw PreconditionError("PhaseReducer: precision too small");
  mp_ = std::make_unique<Mp>(varphi, static_cast<mpfr_prec_t>(precision_bits));
}

PhaseReducer::~PhaseReducer() = default;
PhaseReducer::PhaseReducer(PhaseReducer&&) noexcept = default;
PhaseReducer& PhaseReducer::operator=(PhaseReducer&&) noexcept = default;

ReducedAngle PhaseReducer::reduce(const BigInt& a) const {
  if (a < 0) throw PreconditionError("reduce_angle: multiplier must be >= 0");
  ReducedAngle out;

  if (exact_) {
    const BigInt scaled = a * BigInt(static_cast<long>(exact_->num));
    const BigInt den(static_cast<long>(exact_->den));
    BigInt quotient, remainder;
    mpz_fdiv_qr(quotient.get_mpz_t(), remainder.get_mpz_t(), scaled.get_mpz_t(), den.get_mpz_t());
    out.angle = static_cast<double>(std::numbers::pi_v<long double> * remainder.get_si() /
                                    static_cast<long double>(exact_->den));
    out.odd = mpz_odd_p(quotient.get_mpz_t()) != 0;
    out.certified_bits = precision_bits_;
    return out;
  }

  const std::size_t bits = bit_length(a);
  if (precision_bits_ < bits + kReductionSlackBits + kMinCertifiedBits) {
    std::ostringstream msg;
    msg << "reduce_angle: " << precision_bits_ << " bits cannot certify " << kMinCertifiedBits
        << " bits for a multiplier of bit length " << bits;
    throw PrecisionError(msg.str());
  }
  out.certified_bits = precision_bits_ - bits - kReductionSlackBits;

  const auto prec = static_cast<mpfr_prec_t>(precision_bits_);
  mpfr_t x, whole;
  mpfr_init2(x, prec);
  mpfr_init2(whole, prec);
  mpfr_mul_z(x, mp_->ratio, a.get_mpz_t(), MPFR_RNDN);
  mpfr_floor(whole, x);
  mpfr_sub(x, x, whole, MPFR_RNDN);  // exact
  mpfr_mul(x, x, mp_->pi, MPFR_RNDN);
  out.angle = mpfr_get_d(x, MPFR_RNDN);
  BigInt floor_value;
  mpfr_get_z(floor_value.get_mpz_t(), whole, MPFR_RNDN);
  out.odd = mpz_odd_p(floor_value.get_mpz_t()) != 0;
  mpfr_clear(x);
  mpfr_clear(whole);

  // A fractional part within half an ulp of 1 rounds to pi itself.
  if (out.angle >= std::numbers::pi) {
    out.angle = 0.0;
    out.odd = !out.odd;
  }
  return out;
}

ReducedAngle reduce_angle(const BigInt& a, double varphi, std::size_t precision_bits) {
  return PhaseReducer(varphi, precision_bits).reduce(a);
}

RotationSchedule rotation_schedule(const EnergyPoint& energy, const DisorderRealization& realization,
                                   std::size_t precision_bits) {
  if (realization.gaps.empty()) throw PreconditionError("rotation_schedule: empty realization");
  if (precision_bits == 0) precision_bits = required_precision_bits(realization);
  const PhaseReducer reducer(energy, precision_bits);

  RotationSchedule out;
  out.precision_bits = precision_bits;
  out.rotations.reserve(realization.gaps.size());
  out.rotations.push_back(reducer.reduce(realization.gaps[0] + 1));
  for (std::size_t k = 1; k < realization.gaps.size(); ++k)
    out.rotations.push_back(reducer.reduce(realization.gaps[k]));
  out.min_certified_bits = out.rotations.front().certified_bits;
  for (const auto& r : out.rotations)
    out.min_certified_bits = std::min(out.min_certified_bits, r.certified_bits);
  return out;
}

RotationSchedule rotation_schedule(const SpectralConfig& config,
                                   const DisorderRealization& realization) {
  return rotation_schedule(config.energy, realization, effective_precision_bits(config, realization));
}

}  // namespace sjl
