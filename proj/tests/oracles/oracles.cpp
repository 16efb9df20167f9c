#include "oracles.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sjl::oracle {

namespace mp = boost::multiprecision;
using Float400 = mp::number<mp::cpp_bin_float<400, mp::digit_base_2>>;

NaiveProducts naive_block_products(const SpectralConfig& config, const DisorderRealization& realization) {
  const double varphi = config.energy.varphi();
  const double lambda = 2.0 * std::cos(varphi);
  const double s = std::sin(varphi);
  const double c = std::cos(varphi);
  const Mat2 u{0.0, s, 1.0, -c};
  const Mat2 u_inv{c / s, 1.0, 1.0 / s, 0.0};

  const std::size_t n_blocks = realization.depth();
  const long last = realization.positions.back().get_si() + 1;
  std::vector<double> p(static_cast<std::size_t>(last) + 2, 1.0);
  std::vector<long> ends;
  for (std::size_t k = 0; k < n_blocks; ++k) {
    const long site = realization.positions[k].get_si();
    p[static_cast<std::size_t>(site)] = coupling_at(config.coupling, k + 1);
    ends.push_back(site + 1);
  }

  NaiveProducts out;
  Mat2 t = Mat2::identity();
  std::size_t next = 0;
  for (long n = 0; n <= last; ++n) {
    const double here = p[static_cast<std::size_t>(n)];
    const double before = n == 0 ? 1.0 : p[static_cast<std::size_t>(n - 1)];
    const Mat2 step{lambda / here, -before / here, 1.0, 0.0};
    t = step * t;
    if (next < ends.size() && n == ends[next]) {
      const Mat2 conj = u * t * u_inv;
      out.conjugated.push_back(conj);
      const double sigma = spectral_norm_2x2(conj);
      out.log_t2.push_back(2.0 * std::log(sigma));
      ++next;
    }
  }
  return out;
}

OracleAngle reduce_400(const BigInt& a, double varphi) {
  const Float400 pi = mp::default_ops::get_constant_pi<Float400::backend_type>();
  const mp::cpp_int big(a.get_str());
  const Float400 x = Float400(big) * Float400(varphi) / Float400(pi);
  const Float400 whole = mp::floor(x);
  const Float400 frac = x - whole;
  const mp::cpp_int w = whole.convert_to<mp::cpp_int>();
  OracleAngle out{static_cast<double>(frac * pi), mp::bit_test(w, 0)};
  if (out.angle >= std::numbers::pi) {
    out.angle = 0.0;
    out.odd = !out.odd;
  }
  return out;
}

double literal_pruefer_step(double theta, double gap_angle, double varphi, double q) {
  const double cot = std::cos(varphi) / std::sin(varphi);
  double t = std::atan((std::tan(theta) + cot) / (q * q) - cot) - gap_angle;
  t = std::fmod(t, std::numbers::pi);
  if (t < 0.0) t += std::numbers::pi;
  return t;
}

double brute_force_star_discrepancy(std::span<const double> u) {
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (double x : u) {
    std::size_t less = 0, less_equal = 0;
    for (double y : u) {
      less += y < x;
      less_equal += y <= x;
    }
    d = std::max({d, static_cast<double>(less_equal) / n - x, x - static_cast<double>(less) / n});
  }
  return d;
}

double total_variation_closed_form(double q, double varphi) {
  const double cot = std::cos(varphi) / std::sin(varphi);
  const double q2 = q * q;
  const double a = 0.5 * ((1 - q2) * (1 - q2) * cot * cot + 1 + q2 * q2);
  const double b = 0.5 * ((1 - q2) * (1 - q2) * cot * cot - 1 + q2 * q2);
  const double c = (1 - q2) * cot;
  const double rho = std::hypot(b, c);
  // a - rho loses digits; a^2 - rho^2 = q^4 gives it back.
  return 2.0 * std::log((a + rho) * (a + rho) / (q2 * q2));
}

double midpoint_mean_f(double q, double varphi, std::size_t m) {
  const double cot = std::cos(varphi) / std::sin(varphi);
  const double q2 = q * q;
  double sum = 0.0;
  for (std::size_t i = 1; i <= m; ++i) {
    const double t = (2.0 * static_cast<double>(i) - 1.0) * std::numbers::pi / (2.0 * static_cast<double>(m));
    const double inner = std::sin(t) + (1 - q2) * cot * std::cos(t);
    sum += std::log(q2 * q2 * std::cos(t) * std::cos(t) + inner * inner);
  }
  return sum / static_cast<double>(m);
}

Mat2 rotation_by_squaring(std::uint64_t m, double varphi) {
  Mat2 result = Mat2::identity();
  Mat2 base{std::cos(varphi), std::sin(varphi), -std::sin(varphi), std::cos(varphi)};
  while (m > 0) {
    if (m & 1U) result = base * result;
    base = base * base;
    m >>= 1U;
  }
  return result;
}

}  // namespace sjl::oracle
