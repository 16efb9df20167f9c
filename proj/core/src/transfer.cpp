#include "sjl/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sjl/errors.hpp"

namespace sjl {

double Mat2::max_abs() const {
  return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
}

Mat2 operator*(const Mat2& l, const Mat2& r) {
  return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d, l.c * r.a + l.d * r.c,
          l.c * r.b + l.d * r.d};
}

Vec2 operator*(const Mat2& m, const Vec2& v) {
  return {m.a * v.x + m.b * v.y, m.c * v.x + m.d * v.y};
}

Mat2 operator*(double s, const Mat2& m) { return {s * m.a, s * m.b, s * m.c, s * m.d}; }

Mat2 operator-(const Mat2& l, const Mat2& r) {
  return {l.a - r.a, l.b - r.b, l.c - r.c, l.d - r.d};
}

Mat2 inverse(const Mat2& m) {
  const double det = m.det();
  if (det == 0.0 || !std::isfinite(det)) throw PreconditionError("inverse: singular matrix");
  return {m.d / det, -m.b / det, -m.c / det, m.a / det};
}

double spectral_norm_2x2(const Mat2& m) {
  if (!std::isfinite(m.a) || !std::isfinite(m.b) || !std::isfinite(m.c) || !std::isfinite(m.d))
    throw PreconditionError("spectral_norm_2x2: non-finite entry");
  // sigma_1 +- sigma_2 are the two hypotenuses below, so no cancellation occurs.
  return 0.5 * (std::hypot(m.a + m.d, m.b - m.c) + std::hypot(m.a - m.d, m.b + m.c));
}

double spectral_norm_2x2(const TransferBlock& block) { return spectral_norm_2x2(block.m); }

double TransferBlock::det_residual() const {
  return std::abs(det() - det_expected) / std::abs(det_expected);
}

LocalMatrices local_matrices(double lambda, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw PreconditionError("local_matrices: p must lie in (0, 1]");
  if (!(lambda >= -2.0 && lambda <= 2.0))
    throw PreconditionError("local_matrices: lambda must lie in [-2, 2]");
  LocalMatrices out;
  out.minus = {{lambda / p, -1.0 / p, 1.0, 0.0}, 1.0 / p};
  out.plus = {{lambda, -p, 1.0, 0.0}, p};
  out.zero = {{lambda, -1.0, 1.0, 0.0}, 1.0};
  return out;
}

Mat2 site_matrix(double lambda, double p_here, double p_before) {
  return {lambda / p_here, -p_before / p_here, 1.0, 0.0};
}

Conjugator conjugator(double varphi) {
  if (!(varphi > 0.0 && varphi < std::numbers::pi))
    throw PreconditionError("conjugator: varphi must lie in (0, pi)");
  const double s = std::sin(varphi);
  const double c = std::cos(varphi);
  Conjugator out;
  out.u = {{0.0, s, 1.0, -c}, -s};
  out.u_inv = {{c / s, 1.0, 1.0 / s, 0.0}, -1.0 / s};
  return out;
}

Mat2 rotation(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c, s, -s, c};
}

TransferBlock rotation_power(double angle_mod_pi, bool odd) {
  const Mat2 r = rotation(angle_mod_pi);
  return {odd ? -1.0 * r : r, 1.0};
}

TransferBlock rotation_power(const ReducedAngle& reduced) {
  return rotation_power(reduced.angle, reduced.odd);
}

TransferBlock p_plus_minus_at(double varphi, double q) {
  if (!(q > 0.0 && q <= 1.0)) throw PreconditionError("p_plus_minus: coupling must lie in (0, 1]");
  if (!(varphi > 0.0 && varphi < std::numbers::pi))
    throw PreconditionError("p_plus_minus: varphi must lie in (0, pi)");
  const double cot = std::cos(varphi) / std::sin(varphi);
  return {{q, 0.0, (1.0 - q * q) / q * cot, 1.0 / q}, 1.0};
}

TransferBlock p_plus_minus(double lambda, double q) {
  if (!(lambda > -2.0 && lambda < 2.0))
    throw PreconditionError("p_plus_minus: lambda must lie in (-2, 2)");
  return p_plus_minus_at(std::acos(0.5 * lambda), q);
}

double conjugation_constant(double varphi) {
  const double c = std::abs(std::cos(varphi));
  return (1.0 + c) / (1.0 - c);
}

NormSequence block_norms(const SpectralConfig& config, const DisorderRealization& realization) {
  return block_norms(config, realization, rotation_schedule(config, realization));
}

NormSequence block_norms(const SpectralConfig& config, const DisorderRealization& realization,
                         const RotationSchedule& schedule) {
  const std::size_t n_blocks = realization.depth();
  if (n_blocks == 0) throw PreconditionError("block_norms: empty realization");
  if (schedule.rotations.size() != n_blocks)
    throw PreconditionError("block_norms: rotation schedule does not match the realization");

  const double varphi = config.energy.varphi();
  const Conjugator uc = conjugator(varphi);
  const Mat2 left = rotation(varphi);

  NormSequence out;
  out.conjugation_constant = conjugation_constant(varphi);
  out.precision_bits = schedule.precision_bits;
  out.min_certified_bits = schedule.min_certified_bits;
  out.log_t2.reserve(n_blocks);
  out.t.reserve(n_blocks);
  out.log_t2_unconjugated.reserve(n_blocks);
  out.det_residual.reserve(n_blocks);
  out.products.reserve(n_blocks);

  // Q_n = P_n R(g_n varphi) Q_{n-1}, Q_0 = R((a_1 + 1) varphi); kept at unit
  // norm with the squared scale in log_scale.
  Mat2 q = rotation_power(schedule.rotations[0]).m;
  double log_scale = 0.0;
  double log_det = std::log(std::abs(q.det()));

  for (std::size_t n = 1; n <= n_blocks; ++n) {
    const TransferBlock p = p_plus_minus_at(varphi, coupling_at(config.coupling, n));
    log_det += std::log(std::abs(p.det()));
    if (n > 1) {
      const Mat2 r = rotation_power(schedule.rotations[n - 1]).m;
      log_det += std::log(std::abs(r.det()));
      q = r * q;
    }
    q = p.m * q;
    const double s = spectral_norm_2x2(q);
    q = (1.0 / s) * q;
    log_scale += 2.0 * std::log(s);

    const Mat2 full = left * q;
    const Mat2 plain = uc.u_inv.m * full * uc.u.m;
    out.log_t2.push_back(log_scale);
    out.t.push_back(std::exp(0.5 * log_scale));
    out.log_t2_unconjugated.push_back(log_scale + 2.0 * std::log(spectral_norm_2x2(plain)));
    out.det_residual.push_back(std::abs(std::expm1(log_det)));
    out.products.push_back({full, log_scale});
  }
  return out;
}

}  // namespace sjl
