#pragma once

// Uniform distribution mod pi of angle sequences.
//
// Angles are divided by pi and handled on [0, 1), so the usual discrepancy
// formulas apply; the exponentials e^{2 i h theta} are the characters of the
// circle R / pi Z.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sjl/model.hpp"
#include "sjl/pruefer.hpp"

namespace sjl {

// (1/N) sum_n e^{2 i h theta_n}.
std::complex<double> weyl_sum(std::span<const double> theta, std::int64_t h);

// |S_h(N)|^2 for every prefix N = 1..size.
std::vector<double> weyl_sum_prefix_abs2(std::span<const double> theta, std::int64_t h);

struct DirichletBound {
  double value = 1.0;  // |sin((2n+1) h varphi) / ((2n+1) sin(h varphi))|
  double cap = 1.0;    // 1 / ((2n+1) |sin(h varphi)|), +inf at resonance
};

DirichletBound dirichlet_bound(std::int64_t n, std::int64_t h, double varphi);

struct KoksmaFactor {
  double c_n = 1.0;       // exp(-N D* V / pi)
  double c_n_root = 1.0;  // exp(-D* V / pi)
};

KoksmaFactor koksma_factor(double d_star, double total_variation, std::size_t n);

struct DiscrepancyReport {
  double d_star = 1.0;
  std::size_t n = 0;
  double koksma_c_n = 1.0;
  double koksma_c_n_root = 1.0;
};

// Exact star discrepancy of points already scaled to [0, 1).
double star_discrepancy_unit(std::vector<double> u);

// Star discrepancy of {theta_n / pi}; the Koksma factor uses total_variation.
DiscrepancyReport star_discrepancy(std::span<const double> theta_mod_pi,
                                   double total_variation = 0.0);

enum class TrendVerdict { ConvergentTrend, DivergentTrend };
std::string to_string(TrendVerdict v);

struct WeylPoint {
  std::size_t n = 0;
  double i_h = 0.0;             // mean over samples of |S_h(N)|^2
  double standard_error = 0.0;
  double bound = 0.0;           // (1/N)(1 + 1/|sin h varphi|)
  bool within_bound = true;     // i_h <= bound + 3 standard errors
  double partial_sum = 0.0;     // sum over N' <= N of I_h(N') / N'
};

struct WeylReport {
  std::int64_t h = 1;
  bool resonant = false;        // h varphi is an exact multiple of pi
  std::vector<WeylPoint> points;
  double decay_slope = 0.0;     // least-squares slope of ln I_h against ln N
  TrendVerdict verdict = TrendVerdict::DivergentTrend;
};

// Slope of ln I_h(N) that separates a decaying from a stagnating average.
inline constexpr double kDecaySlopeThreshold = -0.5;

// I_h(N) over the given trajectories. The bound is the one that holds for
// irrational varphi / pi; a ConvergentTrend verdict needs every point within
// it and a decay slope below kDecaySlopeThreshold.
WeylReport weyl_report(std::span<const PrueferTrajectory> trajectories, const EnergyPoint& energy,
                       std::int64_t h, std::span<const std::size_t> n_list);

struct DiscrepancyPoint {
  std::size_t n = 0;
  double median_d_star = 1.0;
  double median_c_n_root = 1.0;
};

struct DelReport {
  std::vector<WeylReport> per_h;
  std::vector<DiscrepancyPoint> discrepancy;
  std::size_t ensemble_size = 0;
  std::string rationality;
  double total_variation = 0.0;
  std::size_t min_certified_bits = 0;

  bool all_within_bound() const;
};

inline constexpr std::size_t kMinEnsembleSize = 16;

// Runs ensemble_size trajectories of depth max(n_list) and tabulates I_h(N)
// for each h. Throws PreconditionError below kMinEnsembleSize samples.
DelReport del_series_diagnostic(SpectralConfig config, std::size_t ensemble_size,
                                std::span<const std::int64_t> h_list,
                                std::span<const std::size_t> n_list, std::size_t workers = 1);

double median(std::vector<double> values);

}  // namespace sjl
