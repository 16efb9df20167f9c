#include "sjl/equidist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sjl/errors.hpp"

namespace sjl {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// h * varphi is a multiple of pi, decided exactly when the ratio is known.
bool resonant(const EnergyPoint& energy, std::int64_t h) {
  if (const auto& ratio = energy.exact_ratio()) return (h * ratio->num) % ratio->den == 0;
  return std::sin(static_cast<double>(h) * energy.varphi()) == 0.0;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

}  // namespace

std::complex<double> weyl_sum(std::span<const double> theta, std::int64_t h) {
  if (h == 0) throw PreconditionError("weyl_sum: h must be nonzero");
  if (theta.empty()) throw PreconditionError("weyl_sum: empty sequence");
  std::complex<double> sum = 0.0;
  const double two_h = 2.0 * static_cast<double>(h);
  for (double t : theta) sum += std::polar(1.0, two_h * t);
  return sum / static_cast<double>(theta.size());
}

std::vector<double> weyl_sum_prefix_abs2(std::span<const double> theta, std::int64_t h) {
  if (h == 0) throw PreconditionError("weyl_sum: h must be nonzero");
  std::vector<double> out;
  out.reserve(theta.size());
  std::complex<double> sum = 0.0;
  const double two_h = 2.0 * static_cast<double>(h);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    sum += std::polar(1.0, two_h * theta[i]);
    out.push_back(std::min(1.0, std::norm(sum / static_cast<double>(i + 1))));
  }
  return out;
}

DirichletBound dirichlet_bound(std::int64_t n, std::int64_t h, double varphi) {
  if (n < 1) throw PreconditionError("dirichlet_bound: n must be >= 1");
  if (h == 0) throw PreconditionError("dirichlet_bound: h must be nonzero");
  const double x = static_cast<double>(h) * varphi;
  const double m = static_cast<double>(2 * n + 1);
  const double s = std::sin(x);
  if (s == 0.0) return {1.0, kInf};
  return {std::min(1.0, std::abs(std::sin(m * x) / (m * s))), 1.0 / (m * std::abs(s))};
}

KoksmaFactor koksma_factor(double d_star, double total_variation, std::size_t n) {
  if (d_star < 0.0 || total_variation < 0.0)
    throw PreconditionError("koksma_factor: inputs must be nonnegative");
  const double rate = d_star * total_variation / kPi;
  return {std::exp(-static_cast<double>(n) * rate), std::exp(-rate)};
}

double star_discrepancy_unit(std::vector<double> u) {
  if (u.empty()) throw PreconditionError("star_discrepancy: empty sequence");
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    d = std::max({d, k / n - u[i], u[i] - (k - 1.0) / n});
  }
  return d;
}

DiscrepancyReport star_discrepancy(std::span<const double> theta_mod_pi, double total_variation) {
  std::vector<double> u;
  u.reserve(theta_mod_pi.size());
  for (double t : theta_mod_pi) u.push_back(t / kPi);
  DiscrepancyReport out;
  out.n = u.size();
  out.d_star = star_discrepancy_unit(std::move(u));
  const KoksmaFactor k = koksma_factor(out.d_star, total_variation, out.n);
  out.koksma_c_n = k.c_n;
  out.koksma_c_n_root = k.c_n_root;
  return out;
}

std::string to_string(TrendVerdict v) {
  return v == TrendVerdict::ConvergentTrend ? "convergent-trend" : "divergent-trend";
}

WeylReport weyl_report(std::span<const PrueferTrajectory> trajectories, const EnergyPoint& energy,
                       std::int64_t h, std::span<const std::size_t> n_list) {
  if (trajectories.empty()) throw PreconditionError("weyl_report: empty ensemble");
  if (n_list.empty()) throw PreconditionError("weyl_report: empty N list");
  if (h == 0) throw PreconditionError("weyl_report: h must be nonzero");
  const std::size_t n_max = *std::max_element(n_list.begin(), n_list.end());
  for (const auto& t : trajectories)
    if (t.size() < n_max) throw PreconditionError("weyl_report: trajectory shorter than max N");

  // Mean and second moment of |S_h(N)|^2 for every N <= n_max.
  std::vector<double> sum(n_max, 0.0), sum_sq(n_max, 0.0);
  for (const auto& t : trajectories) {
    const auto prefix = weyl_sum_prefix_abs2(std::span(t.theta).first(n_max), h);
    for (std::size_t i = 0; i < n_max; ++i) {
      sum[i] += prefix[i];
      sum_sq[i] += prefix[i] * prefix[i];
    }
  }
  const double m = static_cast<double>(trajectories.size());

  WeylReport out;
  out.h = h;
  out.resonant = resonant(energy, h);
  const double s = std::abs(std::sin(static_cast<double>(h) * energy.varphi()));
  const double bound_numerator = out.resonant ? kInf : 1.0 + 1.0 / s;

  std::vector<double> partial(n_max);
  double running = 0.0;
  for (std::size_t i = 0; i < n_max; ++i) {
    running += sum[i] / m / static_cast<double>(i + 1);
    partial[i] = running;
  }

  std::vector<std::size_t> sorted(n_list.begin(), n_list.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> log_n, log_i;
  bool all_within = true;
  for (std::size_t n : sorted) {
    if (n == 0) throw PreconditionError("weyl_report: N must be >= 1");
    WeylPoint p;
    p.n = n;
    p.i_h = sum[n - 1] / m;
    const double var = m > 1.0 ? std::max(0.0, (sum_sq[n - 1] / m - p.i_h * p.i_h) * m / (m - 1.0)) : 0.0;
    p.standard_error = std::sqrt(var / m);
    p.bound = bound_numerator / static_cast<double>(n);
    p.within_bound = p.i_h <= p.bound + 3.0 * p.standard_error;
    p.partial_sum = partial[n - 1];
    all_within = all_within && p.within_bound;
    log_n.push_back(std::log(static_cast<double>(n)));
    log_i.push_back(std::log(std::max(p.i_h, std::numeric_limits<double>::min())));
    out.points.push_back(p);
  }
  out.decay_slope = log_n.size() >= 2 ? least_squares_slope(log_n, log_i) : -kInf;
  out.verdict = (all_within && out.decay_slope < kDecaySlopeThreshold) ? TrendVerdict::ConvergentTrend
                                                                       : TrendVerdict::DivergentTrend;
  return out;
}

bool DelReport::all_within_bound() const {
  for (const auto& r : per_h)
    for (const auto& p : r.points)
      if (!p.within_bound) return false;
  return true;
}

double median(std::vector<double> values) {
  if (values.empty()) throw PreconditionError("median: empty input");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

DelReport del_series_diagnostic(SpectralConfig config, std::size_t ensemble_size,
                                std::span<const std::int64_t> h_list,
                                std::span<const std::size_t> n_list, std::size_t workers) {
  if (ensemble_size < kMinEnsembleSize)
    throw PreconditionError("del_series_diagnostic: ensemble_size must be at least 16 (got " +
                            std::to_string(ensemble_size) + "); raise ensemble_size in the manifest");
  if (h_list.empty() || n_list.empty())
    throw PreconditionError("del_series_diagnostic: h list and N list must be nonempty");
  config.depth = *std::max_element(n_list.begin(), n_list.end());

  const auto trajectories = run_ensemble(config, ensemble_size, workers);

  DelReport out;
  out.ensemble_size = ensemble_size;
  out.rationality = describe(config.energy.rationality());
  out.min_certified_bits = trajectories.front().min_certified_bits();
  for (const auto& t : trajectories)
    out.min_certified_bits = std::min(out.min_certified_bits, t.min_certified_bits());

  const auto* constant = std::get_if<ConstantCoupling>(&config.coupling);
  out.total_variation =
      constant ? ergodic_constants(constant->p, config.energy.varphi()).total_variation : 0.0;

  for (std::int64_t h : h_list) out.per_h.push_back(weyl_report(trajectories, config.energy, h, n_list));

  std::vector<std::size_t> sorted(n_list.begin(), n_list.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t n : sorted) {
    std::vector<double> d, root;
    for (const auto& t : trajectories) {
      const auto rep = star_discrepancy(std::span(t.theta).first(n), out.total_variation);
      d.push_back(rep.d_star);
      root.push_back(rep.koksma_c_n_root);
    }
    out.discrepancy.push_back({n, median(std::move(d)), median(std::move(root))});
  }
  return out;
}

}  // namespace sjl
