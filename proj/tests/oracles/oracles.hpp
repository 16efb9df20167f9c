#pragma once

// Independent reference computations used only by the tests. None of them
// shares code paths with the library beyond the parameter objects.

#include <cstdint>
#include <span>
#include <vector>

#include "sjl/bigint.hpp"
#include "sjl/model.hpp"
#include "sjl/transfer.hpp"

namespace sjl::oracle {

// Site-by-site product of the one-site transfer matrices up to a_n^w + 1 for
// every block n, conjugated by U. Entry n - 1 is ln ||U T(a_n^w + 1) U^-1||^2.
struct NaiveProducts {
  std::vector<double> log_t2;
  std::vector<Mat2> conjugated;
};
NaiveProducts naive_block_products(const SpectralConfig& config, const DisorderRealization& realization);

// a * varphi mod pi and the parity of floor(a varphi / pi), in 400-bit binary
// floating point (Boost.Multiprecision).
struct OracleAngle {
  double angle;
  bool odd;
};
OracleAngle reduce_400(const BigInt& a, double varphi);

// The literal recursion: arctan(q^-2 (tan theta + cot varphi) - cot varphi) - gap_angle.
double literal_pruefer_step(double theta, double gap_angle, double varphi, double q);

// sup_x |#{u_i < x} / N - x| by a double loop.
double brute_force_star_discrepancy(std::span<const double> u);

// int_0^pi |f'| = 2 ln((a + rho) / (a - rho)), rho = sqrt(b^2 + c^2).
double total_variation_closed_form(double q, double varphi);

// Mean of f over the midpoint grid theta_i = (2i - 1) pi / (2 m).
double midpoint_mean_f(double q, double varphi, std::size_t m);

// R(m varphi) by repeated squaring of R(varphi).
Mat2 rotation_by_squaring(std::uint64_t m, double varphi);

}  // namespace sjl::oracle
