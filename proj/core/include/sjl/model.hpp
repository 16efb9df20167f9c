#pragma once

// Parameter objects of the sparse Jacobi family and the disorder generator.
//
// The off-diagonal entries are p_n = q_k at the perturbed sites n = a_k^w and
// 1 elsewhere. Sites are a_k^w = a_k + w_k where a_k follows a sparsity law and
// w_k is drawn uniformly from a symmetric integer window whose half-width grows
// with k. Positions are exact big integers: the rotation angle accumulated over
// a gap of length g is g * varphi mod pi, and for g ~ 2^2000 no floating-point
// position could represent it.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sjl/bigint.hpp"

namespace sjl {

// ---------------------------------------------------------------------------
// Sparsity laws
// ---------------------------------------------------------------------------

// a_1 = beta - 1 and a_j - a_{j-1} = beta^j.
struct ExponentialSparsity {
  std::uint64_t beta = 2;
};

// a_0 = 0 and a_n - a_{n-1} = floor(exp(c * n^gamma)). gamma = 1 with
// c = ln(beta) reproduces the exponential gaps beta^n, but not the exponential
// law's base point a_1 = beta - 1.
struct StretchedSparsity {
  double c = 1.0;
  double gamma = 1.0;
};

using SparsityLaw = std::variant<ExponentialSparsity, StretchedSparsity>;

void validate(const SparsityLaw& law);
std::string describe(const SparsityLaw& law);

// Largest bit length a stretched gap may have before generation is refused.
inline constexpr std::size_t kMaxGapBits = std::size_t{1} << 20;

// Unperturbed positions (a_1, ..., a_N).
std::vector<BigInt> generate_positions(const SparsityLaw& law, std::size_t n);

// ---------------------------------------------------------------------------
// Disorder
// ---------------------------------------------------------------------------

// w_j uniform on {-j, ..., j}.
struct LinearEnvelope {};

// w_j uniform on [-j^eps, j^eps] intersected with the integers.
struct PowerEnvelope {
  double epsilon = 1.0;
};

struct DisorderLaw {
  std::variant<LinearEnvelope, PowerEnvelope> envelope = LinearEnvelope{};
  std::uint64_t seed = 0;
};

void validate(const DisorderLaw& law);

// Half-width w of the support {-w, ..., w} of w_j.
std::uint64_t support_half_width(const DisorderLaw& law, std::size_t j);

// Number of times a single w_j may be redrawn before sampling gives up.
inline constexpr int kMaxResamples = 100;

struct DisorderRealization {
  std::vector<std::int64_t> omega;  // w_1 .. w_N
  std::vector<BigInt> positions;    // a_j^w
  std::vector<BigInt> gaps;         // gaps[0] = a_1^w, gaps[j] = a_{j+1}^w - a_j^w
  std::size_t rejections = 0;       // redraws needed to keep every gap >= 2
  std::uint64_t seed = 0;
  std::uint64_t sample_index = 0;

  std::size_t depth() const { return positions.size(); }
};

// Draws w_1..w_N for the given sample index. Deterministic in
// (law.seed, sample_index). Every delivered realization has a_1^w >= 0 and all
// later gaps >= 2; a draw violating that is redrawn (each redraw counted).
DisorderRealization sample_disorder(const DisorderLaw& law,
                                    std::span<const BigInt> positions,
                                    std::size_t n, std::uint64_t sample_index);

// ---------------------------------------------------------------------------
// Coupling
// ---------------------------------------------------------------------------

struct ConstantCoupling {
  double p = 0.5;
};

// q_k^{-2} = exp(c*gamma*k^{gamma-1} - c1*delta*k^{delta-1}); requires
// gamma > delta >= 1, delta > gamma - 1 and c*gamma >= c1*delta (so q_k <= 1).
// delta == 1 is the split-band variant; it only needs gamma > 1.
struct DecayingCoupling {
  double c = 1.0;
  double gamma = 2.0;
  double c1 = 1.0;
  double delta = 1.5;
};

using CouplingLaw = std::variant<ConstantCoupling, DecayingCoupling>;

void validate(const CouplingLaw& law);
std::string describe(const CouplingLaw& law);

// q_k for k >= 1. Throws PrecisionError once q_k underflows a double.
double coupling_at(const CouplingLaw& law, std::size_t k);
// ln q_k, finite for every k.
double log_coupling_at(const CouplingLaw& law, std::size_t k);

// ln of prod_{k=1}^{n} q_k^{-2} written as c n^gamma - C(n) n^delta. The
// bracket reports min and max of C(n) over n = 1..K; the product stays between
// exp(c n^gamma - c_upper n^delta) and exp(c n^gamma - c_lower n^delta), and a
// positive c_lower is what the super-exponential decay condition asks for.
struct ProductBracket {
  double c_lower = 0.0;
  double c_upper = 0.0;
};
ProductBracket verify_product_bracket(const DecayingCoupling& law, std::size_t k_max);

// ---------------------------------------------------------------------------
// Energy
// ---------------------------------------------------------------------------

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

struct IrrationalCertified {
  std::int64_t denominator_bound = 0;
};
struct RationalMultiple {
  Rational ratio;
};
struct UnknownRationality {};

using Rationality = std::variant<IrrationalCertified, RationalMultiple, UnknownRationality>;

inline constexpr std::int64_t kRationalityDenominatorBound = 1'000'000;
inline constexpr double kRationalityTolerance = 1e-15;

// Continued-fraction test of varphi/pi: a convergent with denominator at most
// `denominator_bound` within `tolerance` marks a rational multiple of pi.
Rationality detect_rationality(double varphi,
                               std::int64_t denominator_bound = kRationalityDenominatorBound,
                               double tolerance = kRationalityTolerance);

// A point lambda = 2 cos(varphi) of the open band.
//
// Points built from lambda or varphi evolve with the exact binary value of the
// double varphi; their rationality tag says whether that value is numerically
// indistinguishable from a rational multiple of pi. Points built with
// rational_multiple() carry the exact ratio and all angle reductions use exact
// integer arithmetic, which is how the excluded set is actually exercised.
class EnergyPoint {
 public:
  static EnergyPoint from_lambda(double lambda);
  static EnergyPoint from_varphi(double varphi);
  static EnergyPoint rational_multiple(std::int64_t num, std::int64_t den);

  double lambda() const { return lambda_; }
  double varphi() const { return varphi_; }
  const Rationality& rationality() const { return rationality_; }
  const std::optional<Rational>& exact_ratio() const { return exact_; }

  bool is_rational_multiple() const {
    return std::holds_alternative<RationalMultiple>(rationality_);
  }
  bool is_irrational_certified() const {
    return std::holds_alternative<IrrationalCertified>(rationality_);
  }

 private:
  EnergyPoint() = default;
  double lambda_ = 0.0;
  double varphi_ = 0.0;
  Rationality rationality_ = UnknownRationality{};
  std::optional<Rational> exact_;
};

std::string describe(const Rationality& r);

// ---------------------------------------------------------------------------
// Full experiment description
// ---------------------------------------------------------------------------

inline constexpr std::size_t kPrecisionHeadroomBits = 96;

struct SpectralConfig {
  SparsityLaw sparsity = ExponentialSparsity{};
  DisorderLaw disorder;
  CouplingLaw coupling = ConstantCoupling{};
  EnergyPoint energy = EnergyPoint::from_lambda(0.7);
  double boundary_phase = 0.0;  // in [0, pi)
  std::size_t depth = 8;
  std::size_t precision_bits = 0;  // 0: derive from the realization
};

void validate(const SpectralConfig& config);

// bit_length(a_N^w) + headroom.
std::size_t required_precision_bits(const DisorderRealization& realization);

// The configured precision, or the required one when the config leaves it at
// 0. Throws PrecisionError if the configured value is below the requirement.
std::size_t effective_precision_bits(const SpectralConfig& config,
                                     const DisorderRealization& realization);

// Positions for config.depth followed by sample_disorder.
DisorderRealization realize(const SpectralConfig& config, std::uint64_t sample_index);

}  // namespace sjl
