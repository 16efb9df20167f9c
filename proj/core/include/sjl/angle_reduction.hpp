#pragma once

// Reduction of a * varphi modulo pi for huge integers a.
//
// With a around 2^2000 the product a * varphi has to be formed with more than
// 2000 bits of varphi / pi before the fractional part means anything. The
// reducer stores varphi / pi once at the requested precision and, for every
// a, reports how many bits of the reduced angle survive the multiplication.

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "sjl/bigint.hpp"
#include "sjl/model.hpp"

namespace sjl {

// Reductions certifying fewer bits than this abort the computation.
inline constexpr std::size_t kMinCertifiedBits = 48;

struct ReducedAngle {
  double angle = 0.0;  // a * varphi mod pi, in [0, pi)
  bool odd = false;    // parity of floor(a * varphi / pi)
  std::size_t certified_bits = 0;
};

class PhaseReducer {
 public:
  // Uses exact integer arithmetic when the energy carries an exact rational
  // ratio varphi / pi, and MPFR at `precision_bits` otherwise.
  PhaseReducer(const EnergyPoint& energy, std::size_t precision_bits);
  // Reduction of multiples of the given double varphi in (0, pi).
  PhaseReducer(double varphi, std::size_t precision_bits);
  ~PhaseReducer();

  PhaseReducer(PhaseReducer&&) noexcept;
  PhaseReducer& operator=(PhaseReducer&&) noexcept;
  PhaseReducer(const PhaseReducer&) = delete;
  PhaseReducer& operator=(const PhaseReducer&) = delete;

  // Throws PreconditionError for a < 0 and PrecisionError when fewer than
  // kMinCertifiedBits remain.
  ReducedAngle reduce(const BigInt& a) const;

  std::size_t precision_bits() const { return precision_bits_; }
  bool exact() const { return exact_.has_value(); }

 private:
  struct Mp;
  std::size_t precision_bits_;
  std::optional<Rational> exact_;
  std::unique_ptr<Mp> mp_;
};

ReducedAngle reduce_angle(const BigInt& a, double varphi, std::size_t precision_bits);

// Every rotation a transfer product or Prüfer trajectory needs for one
// realization: rotations[0] is (a_1^w + 1) * varphi, rotations[k] is
// gaps[k] * varphi for k >= 1.
struct RotationSchedule {
  std::vector<ReducedAngle> rotations;
  std::size_t precision_bits = 0;
  std::size_t min_certified_bits = 0;
};

RotationSchedule rotation_schedule(const SpectralConfig& config,
                                   const DisorderRealization& realization);
RotationSchedule rotation_schedule(const EnergyPoint& energy, const DisorderRealization& realization,
                                   std::size_t precision_bits);

}  // namespace sjl
