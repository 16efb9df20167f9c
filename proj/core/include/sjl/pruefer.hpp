#pragma once

// Prüfer variables at the perturbed sites.
//
// With v_0 = (cos theta_0, sin theta_0) the conjugated solution vector after
// block k is R(varphi) P_k R(g_k varphi) ... P_1 R((a_1^w + 1) varphi) v_0.
// Writing it in polar form gives the angle recursion
//   theta_1     = theta_0 - (a_1^w + 1) varphi
//   theta_{k+1} = arg(P_k (cos theta_k, sin theta_k)) - g_{k+1} varphi
// (everything mod pi) and the radius recursion
//   ln R_k^2 = ln R_{k-1}^2 + f_k(theta_k) - 2 ln q_k.

#include <cstddef>
#include <vector>

#include "sjl/angle_reduction.hpp"
#include "sjl/model.hpp"

namespace sjl {

// x mod pi in [0, pi).
double mod_pi(double x);

// f(theta) = ln(a + b cos 2 theta + c sin 2 theta)
//          = ln(q^4 cos^2 theta + (sin theta + (1 - q^2) cot varphi cos theta)^2)
struct FCoefficients {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
};

FCoefficients f_coefficients(double q, double varphi);
double f_eval(double theta, double q, double varphi);
double f_eval(double theta, const FCoefficients& k);
double f_derivative(double theta, const FCoefficients& k);

struct ErgodicConstants {
  double r = 1.0;
  double log_integral = 0.0;     // (1/pi) int_0^pi f = ln(r p^2)
  double total_variation = 0.0;  // int_0^pi |f'|
};

ErgodicConstants ergodic_constants(double p, double varphi);

// Angle of v_0 = U (cos phi_bc, sin phi_bc), mod pi.
double theta0_from_boundary(double boundary_phase, double varphi);

// One step of the angle recursion by the vector method.
double pruefer_step(double theta_prev, const ReducedAngle& gap_rotation, double varphi, double q);
double pruefer_step(double theta_prev, const BigInt& gap, const PhaseReducer& reducer, double varphi,
                    double q);

struct PrueferTrajectory {
  // Index k - 1 holds step k = 1..N.
  std::vector<double> theta;                // theta_k mod pi
  std::vector<double> log_R2;               // ln R_k^2
  std::vector<double> f_values;             // f_k(theta_k)
  std::vector<std::size_t> certified_bits;  // bits certified for theta_k
  double theta0 = 0.0;
  std::size_t precision_bits = 0;
  bool excluded_energy = false;  // rational multiple of pi: u.d. is not expected

  std::size_t size() const { return theta.size(); }
  std::size_t min_certified_bits() const;
  double mean_f() const;
};

PrueferTrajectory run_trajectory(const SpectralConfig& config, const DisorderRealization& realization,
                                 double theta0);
PrueferTrajectory run_trajectory(const SpectralConfig& config, const DisorderRealization& realization,
                                 double theta0, const RotationSchedule& schedule);
// theta_0 taken from config.boundary_phase.
PrueferTrajectory run_trajectory(const SpectralConfig& config, const DisorderRealization& realization);

// Trajectories for disorder samples 0..count-1 of the same configuration, in
// sample order whatever the number of workers.
std::vector<PrueferTrajectory> run_ensemble(const SpectralConfig& config, std::size_t count,
                                            std::size_t workers = 1);

}  // namespace sjl
