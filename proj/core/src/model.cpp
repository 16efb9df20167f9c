#include "sjl/model.hpp"

#include <mpfr.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "sjl/errors.hpp"
#include "sjl/rng.hpp"

namespace sjl {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// floor(exp(c * n^gamma)) as an exact integer.
BigInt stretched_gap(double c, double gamma, std::size_t n) {
  const double exponent = c * std::pow(static_cast<double>(n), gamma);
  const double bits = exponent / std::numbers::ln2;
  if (!std::isfinite(bits) || bits > static_cast<double>(kMaxGapBits)) {
    std::ostringstream msg;
    msg << "stretched gap exp(" << c << " * " << n << "^" << gamma
        << ") needs more than " << kMaxGapBits << " bits";
    throw PrecisionError(msg.str());
  }
  const auto prec = static_cast<mpfr_prec_t>(std::max(bits, 0.0)) + 128;

  mpfr_t x, g;
  mpfr_init2(x, prec);
  mpfr_init2(g, 64);
  mpfr_set_ui(x, static_cast<unsigned long>(n), MPFR_RNDN);
  mpfr_set_d(g, gamma, MPFR_RNDN);
  mpfr_pow(x, x, g, MPFR_RNDN);
  mpfr_mul_d(x, x, c, MPFR_RNDN);
  mpfr_exp(x, x, MPFR_RNDN);
  BigInt out;
  mpfr_get_z(out.get_mpz_t(), x, MPFR_RNDD);
  mpfr_clear(x);
  mpfr_clear(g);
  return out;
}

std::uint64_t half_width_power(double epsilon, std::size_t j) {
  const double w = std::pow(static_cast<double>(j), epsilon);
  const double nearest = std::round(w);
  // pow(8, 1/3) comes back as 1.999...; snap values that are integers up to rounding.
  if (std::abs(w - nearest) < 1e-9 * std::max(1.0, nearest)) {
    return static_cast<std::uint64_t>(nearest);
  }
  return static_cast<std::uint64_t>(std::floor(w));
}

}  // namespace

// ---------------------------------------------------------------------------

void validate(const SparsityLaw& law) {
  std::visit(Overloaded{
                 [](const ExponentialSparsity& e) {
                   if (e.beta < 2) throw ConfigError("exponential sparsity needs beta >= 2");
                 },
                 [](const StretchedSparsity& s) {
                   if (!(s.c > 0.0) || !std::isfinite(s.c))
                     throw ConfigError("stretched sparsity needs c > 0");
                   if (!(s.gamma > 0.0) || !std::isfinite(s.gamma))
                     throw ConfigError("stretched sparsity needs gamma > 0");
                 }},
             law);
}

std::string describe(const SparsityLaw& law) {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{[&](const ExponentialSparsity& e) { os << "exponential(beta=" << e.beta << ")"; },
                        [&](const StretchedSparsity& s) {
                          os << "stretched(c=" << s.c << ",gamma=" << s.gamma << ")";
                        }},
             law);
  return os.str();
}

std::vector<BigInt> generate_positions(const SparsityLaw& law, std::size_t n) {
  if (n == 0) throw PreconditionError("generate_positions: depth must be >= 1");
  validate(law);
  std::vector<BigInt> out;
  out.reserve(n);
  std::visit(Overloaded{
                 [&](const ExponentialSparsity& e) {
                   const BigInt beta(static_cast<unsigned long>(e.beta));
                   BigInt power = beta;
                   out.emplace_back(beta - 1);
                   for (std::size_t j = 2; j <= n; ++j) {
                     power *= beta;
                     out.emplace_back(out.back() + power);
                   }
                 },
                 [&](const StretchedSparsity& s) {
                   BigInt position = 0;
                   for (std::size_t j = 1; j <= n; ++j) {
                     BigInt gap = stretched_gap(s.c, s.gamma, j);
                     if (gap < 2) {
                       std::ostringstream msg;
                       msg << "stretched sparsity " << describe(law) << " has gap " << gap.get_str()
                           << " < 2 at n=" << j;
                       throw ConfigError(msg.str());
                     }
                     position += gap;
                     out.push_back(position);
                   }
                 }},
             law);
  return out;
}

// ---------------------------------------------------------------------------

void validate(const DisorderLaw& law) {
  if (const auto* p = std::get_if<PowerEnvelope>(&law.envelope)) {
    if (!(p->epsilon > 0.0) || !std::isfinite(p->epsilon))
      throw ConfigError("power envelope needs epsilon > 0");
  }
}

std::uint64_t support_half_width(const DisorderLaw& law, std::size_t j) {
  if (j == 0) throw PreconditionError("support_half_width: index starts at 1");
  return std::visit(Overloaded{[&](const LinearEnvelope&) { return static_cast<std::uint64_t>(j); },
                               [&](const PowerEnvelope& p) { return half_width_power(p.epsilon, j); }},
                    law.envelope);
}

DisorderRealization sample_disorder(const DisorderLaw& law, std::span<const BigInt> positions,
                                    std::size_t n, std::uint64_t sample_index) {
  if (n == 0) throw PreconditionError("sample_disorder: depth must be >= 1");
  if (positions.size() < n) throw PreconditionError("sample_disorder: fewer positions than depth");
  validate(law);

  DisorderRealization out;
  out.seed = law.seed;
  out.sample_index = sample_index;
  out.omega.reserve(n);
  out.positions.reserve(n);
  out.gaps.reserve(n);

  for (std::size_t j = 1; j <= n; ++j) {
    const std::uint64_t w = support_half_width(law, j);
    const BigInt& base = positions[j - 1];
    // Smallest admissible site: 0 for the first perturbation, previous + 2 afterwards.
    const BigInt lowest = (j == 1) ? BigInt(0) : BigInt(out.positions.back() + 2);
    if (base + BigInt(static_cast<unsigned long>(w)) < lowest) {
      std::ostringstream msg;
      msg << "sample_disorder: no admissible w_" << j << " in {-" << w << ",...," << w
          << "}: gap budget exhausted";
      throw PreconditionError(msg.str());
    }

    CounterRng rng(law.seed, sample_index, j);
    std::int64_t omega = rng.uniform_symmetric(w);
    BigInt site = base + BigInt(static_cast<long>(omega));
    int redraws = 0;
    while (site < lowest) {
      if (++redraws > kMaxResamples) {
        std::ostringstream msg;
        msg << "sample_disorder: w_" << j << " still inadmissible after " << kMaxResamples
            << " redraws";
        throw PreconditionError(msg.str());
      }
      omega = rng.uniform_symmetric(w);
      site = base + BigInt(static_cast<long>(omega));
    }
    out.rejections += static_cast<std::size_t>(redraws);

    out.gaps.push_back(j == 1 ? site : BigInt(site - out.positions.back()));
    out.omega.push_back(omega);
    out.positions.push_back(std::move(site));
  }
  return out;
}

// ---------------------------------------------------------------------------

void validate(const CouplingLaw& law) {
  std::visit(Overloaded{
                 [](const ConstantCoupling& c) {
                   // p = 1 is the free operator, kept as the reference case.
                   if (!(c.p > 0.0 && c.p <= 1.0))
                     throw ConfigError("constant coupling needs 0 < p <= 1");
                 },
                 [](const DecayingCoupling& d) {
                   if (!(d.c > 0.0) || !(d.c1 > 0.0))
                     throw ConfigError("decaying coupling needs c > 0 and c1 > 0");
                   if (!(d.gamma > d.delta && d.delta >= 1.0))
                     throw ConfigError("decaying coupling needs gamma > delta >= 1");
                   // delta == 1 is the split-band variant and drops the second condition.
                   if (d.delta > 1.0 && !(d.delta > d.gamma - 1.0))
                     throw ConfigError("decaying coupling needs delta > gamma - 1");
                   if (d.c * d.gamma < d.c1 * d.delta)
                     throw ConfigError("decaying coupling needs c*gamma >= c1*delta so that q_k <= 1");
                 }},
             law);
}

std::string describe(const CouplingLaw& law) {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{[&](const ConstantCoupling& c) { os << "constant(p=" << c.p << ")"; },
                        [&](const DecayingCoupling& d) {
                          os << "decaying(c=" << d.c << ",gamma=" << d.gamma << ",c1=" << d.c1
                             << ",delta=" << d.delta << ")";
                        }},
             law);
  return os.str();
}

double log_coupling_at(const CouplingLaw& law, std::size_t k) {
  if (k == 0) throw PreconditionError("coupling_at: index starts at 1");
  validate(law);
  return std::visit(
      Overloaded{[](const ConstantCoupling& c) { return std::log(c.p); },
                 [k](const DecayingCoupling& d) {
                   const double kk = static_cast<double>(k);
                   const double exponent = d.c * d.gamma * std::pow(kk, d.gamma - 1.0) -
                                           d.c1 * d.delta * std::pow(kk, d.delta - 1.0);
                   return -0.5 * exponent;
                 }},
      law);
}

double coupling_at(const CouplingLaw& law, std::size_t k) {
  const double q = std::exp(log_coupling_at(law, k));
  if (!(q > 0.0) || !std::isnormal(q)) {
    std::ostringstream msg;
    msg << "coupling_at: q_" << k << " underflows a double";
    throw PrecisionError(msg.str());
  }
  return q;
}

ProductBracket verify_product_bracket(const DecayingCoupling& law, std::size_t k_max) {
  validate(CouplingLaw{law});
  if (k_max == 0) throw PreconditionError("verify_product_bracket: k_max must be >= 1");
  ProductBracket out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  double log_product = 0.0;  // sum_{k=1}^{n} ln q_k^{-2}
  for (std::size_t n = 1; n <= k_max; ++n) {
    log_product -= 2.0 * log_coupling_at(CouplingLaw{law}, n);
    const double nn = static_cast<double>(n);
    const double coefficient = (law.c * std::pow(nn, law.gamma) - log_product) / std::pow(nn, law.delta);
    out.c_lower = std::min(out.c_lower, coefficient);
    out.c_upper = std::max(out.c_upper, coefficient);
  }
  return out;
}

// ---------------------------------------------------------------------------

Rationality detect_rationality(double varphi, std::int64_t denominator_bound, double tolerance) {
  if (!(varphi > 0.0 && varphi < std::numbers::pi))
    throw PreconditionError("detect_rationality: varphi must lie in (0, pi)");
  const long double x = static_cast<long double>(varphi) / std::numbers::pi_v<long double>;

  // Convergents h/k of the continued fraction of x.
  long double y = x;
  std::int64_t h_prev = 1, h_prev2 = 0, k_prev = 0, k_prev2 = 1;
  for (int step = 0; step < 64; ++step) {
    const long double a_real = std::floor(y);
    if (a_real > static_cast<long double>(denominator_bound) * 4) break;
    const auto a = static_cast<std::int64_t>(a_real);
    const std::int64_t h = a * h_prev + h_prev2;
    const std::int64_t k = a * k_prev + k_prev2;
    if (k > denominator_bound) break;
    if (std::abs(x - static_cast<long double>(h) / static_cast<long double>(k)) <
        static_cast<long double>(tolerance)) {
      return RationalMultiple{Rational{h, k}};
    }
    h_prev2 = h_prev;
    h_prev = h;
    k_prev2 = k_prev;
    k_prev = k;
    const long double frac = y - a_real;
    if (frac <= 0.0L) break;
    y = 1.0L / frac;
  }
  return IrrationalCertified{denominator_bound};
}

EnergyPoint EnergyPoint::from_lambda(double lambda) {
  if (!(lambda > -2.0 && lambda < 2.0))
    throw PreconditionError("EnergyPoint: lambda must lie in the open band (-2, 2)");
  EnergyPoint e;
  e.lambda_ = lambda;
  e.varphi_ = std::acos(0.5 * lambda);
  e.rationality_ = detect_rationality(e.varphi_);
  return e;
}

EnergyPoint EnergyPoint::from_varphi(double varphi) {
  if (!(varphi > 0.0 && varphi < std::numbers::pi))
    throw PreconditionError("EnergyPoint: varphi must lie in (0, pi)");
  EnergyPoint e;
  e.varphi_ = varphi;
  e.lambda_ = 2.0 * std::cos(varphi);
  e.rationality_ = detect_rationality(varphi);
  return e;
}

EnergyPoint EnergyPoint::rational_multiple(std::int64_t num, std::int64_t den) {
  if (den <= 0 || num <= 0 || num >= den)
    throw PreconditionError("EnergyPoint: rational multiple needs 0 < num/den < 1");
  const std::int64_t g = std::gcd(num, den);
  num /= g;
  den /= g;
  EnergyPoint e;
  e.varphi_ = static_cast<double>(std::numbers::pi_v<long double> * num / den);
  e.lambda_ = 2.0 * std::cos(e.varphi_);
  e.rationality_ = RationalMultiple{Rational{num, den}};
  e.exact_ = Rational{num, den};
  return e;
}

std::string describe(const Rationality& r) {
  std::ostringstream os;
  std::visit(Overloaded{[&](const IrrationalCertified& c) {
                          os << "irrational_certified(q<=" << c.denominator_bound << ")";
                        },
                        [&](const RationalMultiple& m) {
                          os << "rational_multiple(" << m.ratio.num << "/" << m.ratio.den << ")";
                        },
                        [&](const UnknownRationality&) { os << "unknown"; }},
             r);
  return os.str();
}

// ---------------------------------------------------------------------------

void validate(const SpectralConfig& config) {
  validate(config.sparsity);
  validate(config.disorder);
  validate(config.coupling);
  if (config.depth == 0) throw ConfigError("depth must be >= 1");
  if (!(config.boundary_phase >= 0.0 && config.boundary_phase < std::numbers::pi))
    throw ConfigError("boundary_phase must lie in [0, pi)");
}

std::size_t required_precision_bits(const DisorderRealization& realization) {
  if (realization.positions.empty()) return kPrecisionHeadroomBits;
  return bit_length(realization.positions.back() + 1) + kPrecisionHeadroomBits;
}

std::size_t effective_precision_bits(const SpectralConfig& config,
                                     const DisorderRealization& realization) {
  const std::size_t required = required_precision_bits(realization);
  if (config.precision_bits == 0) return required;
  if (config.precision_bits < required) {
    std::ostringstream msg;
    msg << "precision_bits=" << config.precision_bits << " below the required " << required
        << " (bit length of a_N plus " << kPrecisionHeadroomBits << ")";
    throw PrecisionError(msg.str());
  }
  return config.precision_bits;
}

DisorderRealization realize(const SpectralConfig& config, std::uint64_t sample_index) {
  validate(config);
  const auto positions = generate_positions(config.sparsity, config.depth);
  return sample_disorder(config.disorder, positions, config.depth, sample_index);
}

}  // namespace sjl
