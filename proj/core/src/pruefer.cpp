#include "sjl/pruefer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "sjl/errors.hpp"
#include "sjl/parallel.hpp"
#include "sjl/transfer.hpp"

namespace sjl {
namespace {

constexpr double kPi = std::numbers::pi;

double cot(double varphi) { return std::cos(varphi) / std::sin(varphi); }

// Sign changes of f' on [0, pi], located on a coarse grid and refined by bisection.
std::vector<double> derivative_zeros(const FCoefficients& k) {
  constexpr int kCells = 256;
  std::vector<double> zeros;
  auto d = [&](double t) { return f_derivative(t, k); };
  double lo = 0.0;
  double d_lo = d(lo);
  for (int i = 1; i <= kCells; ++i) {
    const double hi = kPi * i / kCells;
    const double d_hi = d(hi);
    if (d_lo == 0.0) {
      zeros.push_back(lo);
    } else if ((d_lo < 0.0) != (d_hi < 0.0) && d_hi != 0.0) {
      double a = lo, b = hi, da = d_lo;
      for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        const double m = 0.5 * (a + b);
        const double dm = d(m);
        if ((dm < 0.0) == (da < 0.0)) {
          a = m;
          da = dm;
        } else {
          b = m;
        }
      }
      zeros.push_back(0.5 * (a + b));
    }
    lo = hi;
    d_lo = d_hi;
  }
  return zeros;
}

}  // namespace

double mod_pi(double x) {
  double r = std::fmod(x, kPi);
  if (r < 0.0) r += kPi;
  if (r >= kPi) r = 0.0;
  return r;
}

FCoefficients f_coefficients(double q, double varphi) {
  if (!(q > 0.0 && q <= 1.0)) throw PreconditionError("f: coupling must lie in (0, 1]");
  if (!(varphi > 0.0 && varphi < kPi)) throw PreconditionError("f: varphi must lie in (0, pi)");
  const double ct = cot(varphi);
  const double q2 = q * q;
  const double q4 = q2 * q2;
  const double s = (1.0 - q2) * (1.0 - q2) * ct * ct;
  return {0.5 * (s + 1.0 + q4), 0.5 * (s - 1.0 + q4), (1.0 - q2) * ct};
}

double f_eval(double theta, const FCoefficients& k) {
  const double arg = k.a + k.b * std::cos(2.0 * theta) + k.c * std::sin(2.0 * theta);
  if (!(arg > 0.0)) throw PrecisionError("f: argument of the logarithm underflowed to zero");
  return std::log(arg);
}

double f_eval(double theta, double q, double varphi) {
  if (!(q > 0.0 && q <= 1.0)) throw PreconditionError("f: coupling must lie in (0, 1]");
  if (!(varphi > 0.0 && varphi < kPi)) throw PreconditionError("f: varphi must lie in (0, pi)");
  // P is the identity at q = 1 and the radius is untouched.
  if (q == 1.0) return 0.0;
  // The product form avoids the cancellation a + b cos 2 theta suffers near its minimum.
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double q2 = q * q;
  const double inner = s + (1.0 - q2) * cot(varphi) * c;
  const double arg = q2 * q2 * c * c + inner * inner;
  if (!(arg > 0.0)) throw PrecisionError("f: argument of the logarithm underflowed to zero");
  return std::log(arg);
}

double f_derivative(double theta, const FCoefficients& k) {
  const double c2 = std::cos(2.0 * theta);
  const double s2 = std::sin(2.0 * theta);
  return 2.0 * (k.c * c2 - k.b * s2) / (k.a + k.b * c2 + k.c * s2);
}

ErgodicConstants ergodic_constants(double p, double varphi) {
  if (!(p > 0.0 && p <= 1.0)) throw PreconditionError("ergodic_constants: p must lie in (0, 1]");
  if (!(varphi > 0.0 && varphi < kPi))
    throw PreconditionError("ergodic_constants: varphi must lie in (0, pi)");
  ErgodicConstants out;
  const double s = std::sin(varphi);
  const double v = (1.0 - p * p) / p;
  out.r = 1.0 + v * v / (4.0 * s * s);
  out.log_integral = std::log(out.r) + 2.0 * std::log(p);
  if (p == 1.0) return out;

  const FCoefficients k = f_coefficients(p, varphi);
  std::vector<double> cuts{0.0};
  for (double z : derivative_zeros(k))
    if (z > cuts.back()) cuts.push_back(z);
  if (cuts.back() < kPi) cuts.push_back(kPi);
  // f is monotone between consecutive zeros of f', so int |f'| is a sum of |f(b) - f(a)|.
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    out.total_variation += std::abs(f_eval(cuts[i + 1], p, varphi) - f_eval(cuts[i], p, varphi));
  return out;
}

double theta0_from_boundary(double boundary_phase, double varphi) {
  const Conjugator uc = conjugator(varphi);
  const Vec2 v = uc.u.m * Vec2{std::cos(boundary_phase), std::sin(boundary_phase)};
  return mod_pi(std::atan2(v.y, v.x));
}

double pruefer_step(double theta_prev, const ReducedAngle& gap_rotation, double varphi, double q) {
  const Mat2 p = p_plus_minus_at(varphi, q).m;
  const Vec2 w = p * Vec2{std::cos(theta_prev), std::sin(theta_prev)};
  return mod_pi(mod_pi(std::atan2(w.y, w.x)) - gap_rotation.angle);
}

double pruefer_step(double theta_prev, const BigInt& gap, const PhaseReducer& reducer, double varphi,
                    double q) {
  if (gap < 2) throw PreconditionError("pruefer_step: gap must be >= 2");
  return pruefer_step(theta_prev, reducer.reduce(gap), varphi, q);
}

std::size_t PrueferTrajectory::min_certified_bits() const {
  if (certified_bits.empty()) return 0;
  return *std::min_element(certified_bits.begin(), certified_bits.end());
}

double PrueferTrajectory::mean_f() const {
  if (f_values.empty()) return 0.0;
  return std::accumulate(f_values.begin(), f_values.end(), 0.0) /
         static_cast<double>(f_values.size());
}

PrueferTrajectory run_trajectory(const SpectralConfig& config, const DisorderRealization& realization,
                                 double theta0, const RotationSchedule& schedule) {
  const std::size_t n = realization.depth();
  if (n == 0) throw PreconditionError("run_trajectory: empty realization");
  if (schedule.rotations.size() != n)
    throw PreconditionError("run_trajectory: rotation schedule does not match the realization");
  const double varphi = config.energy.varphi();

  PrueferTrajectory out;
  out.theta0 = theta0;
  out.precision_bits = schedule.precision_bits;
  out.excluded_energy = config.energy.is_rational_multiple();
  out.theta.reserve(n);
  out.log_R2.reserve(n);
  out.f_values.reserve(n);
  out.certified_bits.reserve(n);

  double theta = mod_pi(mod_pi(theta0) - schedule.rotations[0].angle);
  double log_r2 = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double q = coupling_at(config.coupling, k);
    const double f = f_eval(theta, q, varphi);
    log_r2 += f - 2.0 * std::log(q);
    out.theta.push_back(theta);
    out.f_values.push_back(f);
    out.log_R2.push_back(log_r2);
    out.certified_bits.push_back(schedule.rotations[k - 1].certified_bits);
    if (k < n) theta = pruefer_step(theta, schedule.rotations[k], varphi, q);
  }
  return out;
}

PrueferTrajectory run_trajectory(const SpectralConfig& config, const DisorderRealization& realization,
                                 double theta0) {
  return run_trajectory(config, realization, theta0, rotation_schedule(config, realization));
}

PrueferTrajectory run_trajectory(const SpectralConfig& config,
                                 const DisorderRealization& realization) {
  return run_trajectory(config, realization,
                        theta0_from_boundary(config.boundary_phase, config.energy.varphi()));
}

std::vector<PrueferTrajectory> run_ensemble(const SpectralConfig& config, std::size_t count,
                                            std::size_t workers) {
  validate(config);
  const auto positions = generate_positions(config.sparsity, config.depth);
  const double theta0 = theta0_from_boundary(config.boundary_phase, config.energy.varphi());
  return parallel_map(count, workers, [&](std::size_t i) {
    const auto realization = sample_disorder(config.disorder, positions, config.depth, i);
    return run_trajectory(config, realization, theta0);
  });
}

}  // namespace sjl
