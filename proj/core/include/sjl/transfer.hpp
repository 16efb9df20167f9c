#pragma once

// 2x2 transfer matrices of the eigenvalue equation
//   p_n u_{n+1} + p_{n-1} u_{n-1} = lambda u_n
// acting on (u_n, u_{n-1}), and the blockwise product over sparse stretches.
//
// In the frame conjugated by U the free matrix T_0 becomes the clockwise
// rotation R(varphi), and the pair T_+ T_- at a perturbed site becomes
// R(varphi) P R(varphi). A whole stretch of free sites therefore collapses to
// a single rotation whose angle comes from the certified reducer.

#include <cstddef>
#include <vector>

#include "sjl/angle_reduction.hpp"
#include "sjl/model.hpp"

namespace sjl {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// [[a, b], [c, d]]
struct Mat2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  static Mat2 identity() { return {}; }
  double det() const { return a * d - b * c; }
  double frobenius2() const { return a * a + b * b + c * c + d * d; }
  double max_abs() const;
};

Mat2 operator*(const Mat2& l, const Mat2& r);
Vec2 operator*(const Mat2& m, const Vec2& v);
Mat2 operator*(double s, const Mat2& m);
Mat2 operator-(const Mat2& l, const Mat2& r);
Mat2 inverse(const Mat2& m);

// Largest singular value, from the Frobenius norm and the determinant.
double spectral_norm_2x2(const Mat2& m);

// A matrix together with the determinant it is supposed to have.
struct TransferBlock {
  Mat2 m;
  double det_expected = 1.0;

  double det() const { return m.det(); }
  double det_residual() const;  // |det - det_expected| / |det_expected|
  double norm() const { return spectral_norm_2x2(m); }
};

double spectral_norm_2x2(const TransferBlock& block);

struct LocalMatrices {
  TransferBlock minus;  // site carrying p: [[lambda/p, -1/p], [1, 0]]
  TransferBlock plus;   // site after it:   [[lambda, -p], [1, 0]]
  TransferBlock zero;   // free site:       [[lambda, -1], [1, 0]]
};

LocalMatrices local_matrices(double lambda, double p);

// Transfer matrix of one site for arbitrary neighbouring couplings.
Mat2 site_matrix(double lambda, double p_here, double p_before);

struct Conjugator {
  TransferBlock u;      // [[0, sin], [1, -cos]]
  TransferBlock u_inv;
};

Conjugator conjugator(double varphi);

// Clockwise rotation [[cos, sin], [-sin, cos]].
Mat2 rotation(double angle);

// R(m varphi) from the reduced angle and the parity of the multiple of pi.
TransferBlock rotation_power(double angle_mod_pi, bool odd);
TransferBlock rotation_power(const ReducedAngle& reduced);

// [[q, 0], [((1-q^2)/q) cot varphi, 1/q]] with varphi = arccos(lambda / 2).
TransferBlock p_plus_minus(double lambda, double q);
TransferBlock p_plus_minus_at(double varphi, double q);

// (1 + |cos varphi|) / (1 - |cos varphi|): squared condition number of U, the
// factor between conjugated and plain squared norms.
double conjugation_constant(double varphi);

// A matrix stored as exp(log_scale / 2) * m, with m of order one.
struct ScaledMatrix {
  Mat2 m;
  double log_scale = 0.0;  // natural log of the squared scale factor
};

struct NormSequence {
  // Block n = 1..N is stored at index n - 1.
  std::vector<double> log_t2;               // ln ||U T(a_n^w + 1) U^-1||^2
  std::vector<double> t;                    // t_n, +inf once it overflows a double
  std::vector<double> log_t2_unconjugated;  // ln ||T(a_n^w + 1)||^2
  std::vector<double> det_residual;         // |prod det(block factors) - 1|
  std::vector<ScaledMatrix> products;       // U T(a_n^w + 1) U^-1
  double conjugation_constant = 1.0;
  std::size_t precision_bits = 0;
  std::size_t min_certified_bits = 0;
};

NormSequence block_norms(const SpectralConfig& config, const DisorderRealization& realization);
NormSequence block_norms(const SpectralConfig& config, const DisorderRealization& realization,
                         const RotationSchedule& schedule);

}  // namespace sjl
