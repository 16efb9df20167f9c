#include "sjl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "sjl/errors.hpp"
#include "sjl/logmath.hpp"

namespace sjl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
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

// Slope of y against the index 0..n-1.
double index_slope(std::span<const double> y) {
  std::vector<double> x(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
  return least_squares_slope(x, y);
}

void check_classify_inputs(double lambda, double v, double beta) {
  if (!(lambda > -2.0 && lambda < 2.0))
    throw PreconditionError("classify: lambda must lie strictly inside (-2, 2)");
  if (!(beta >= 2.0) || !std::isfinite(beta)) throw PreconditionError("classify: beta must be >= 2");
  if (!(v >= 0.0) || !std::isfinite(v)) throw PreconditionError("classify: intensity must be >= 0");
}

Phase tie_aware(double value) {
  if (std::abs(value - 1.0) <= kTieTolerance * std::max(1.0, std::abs(value))) return Phase::Excluded;
  return value > 1.0 ? Phase::SingularContinuous : Phase::PurePoint;
}

// A stretch of sites with a constant conjugated norm.
struct Stretch {
  double log_length;  // ln L
  double level;       // ln t^2
  BigInt length;
};

std::vector<Stretch> stretches(std::span<const double> log_t2, std::span<const BigInt> gaps) {
  if (log_t2.size() != gaps.size())
    throw PreconditionError("norm data and gaps have inconsistent lengths");
  if (gaps.empty()) throw PreconditionError("empty norm data");
  std::vector<Stretch> out;
  out.reserve(gaps.size());
  const BigInt first = gaps[0] + 1;
  out.push_back({log_big(first), 0.0, first});
  for (std::size_t m = 1; m < gaps.size(); ++m)
    out.push_back({log_big(gaps[m]), log_t2[m - 1], gaps[m]});
  return out;
}

// ln sum_{j >= N} e^{x_j} for the continuation of log terms x_0..x_{N-1}, or
// +inf when the fitted ratio is not below one.
double log_geometric_tail(std::span<const double> log_terms, double ratio) {
  if (!(ratio < 1.0)) return kInf;
  return log_terms.back() + std::log(ratio / (1.0 - ratio));
}

}  // namespace

// ---------------------------------------------------------------------------

double log_big(const BigInt& x) {
  if (x <= 0) throw PreconditionError("log_big: argument must be positive");
  long exponent = 0;
  const double mantissa = mpz_get_d_2exp(&exponent, x.get_mpz_t());
  return std::log(mantissa) + static_cast<double>(exponent) * std::numbers::ln2;
}

double intensity_from_p(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw PreconditionError("intensity: p must lie in (0, 1]");
  return (1.0 - p * p) / p;
}

double intensity(const Strength& s) {
  if (const auto* o = std::get_if<OffDiagonal>(&s)) return intensity_from_p(o->p);
  const double v = std::get<Diagonal>(s).v;
  if (!(v >= 0.0) || !std::isfinite(v)) throw PreconditionError("intensity: v must be >= 0");
  return v;
}

double growth_rate(double lambda, double v) { return 1.0 + v * v / (4.0 - lambda * lambda); }

std::string to_string(Phase p) {
  switch (p) {
    case Phase::SingularContinuous: return "SC";
    case Phase::PurePoint: return "PP";
    case Phase::Excluded: return "Excluded";
  }
  return "?";
}

std::string to_string(Exclusion e) {
  switch (e) {
    case Exclusion::None: return "";
    case Exclusion::RationalEnergy: return "RationalEnergy";
    case Exclusion::BandEdge: return "BandEdge";
    case Exclusion::BoundaryTie: return "BoundaryTie";
  }
  return "?";
}

Phase i1_form_phase(double lambda, double v, double beta) {
  check_classify_inputs(lambda, v, beta);
  if (v == 0.0) return Phase::SingularContinuous;
  return tie_aware((beta - 1.0) * (4.0 - lambda * lambda) / (v * v));
}

Phase ratio_form_phase(double lambda, double v, double beta) {
  check_classify_inputs(lambda, v, beta);
  return tie_aware(beta / growth_rate(lambda, v));
}

PhaseVerdict classify(const EnergyPoint& energy, const Strength& strength, double beta) {
  const double lambda = energy.lambda();
  const double v = intensity(strength);
  check_classify_inputs(lambda, v, beta);

  const double r = growth_rate(lambda, v);
  const double i1 = v == 0.0 ? kInf : (beta - 1.0) * (4.0 - lambda * lambda) / (v * v);
  const Phase i1_phase = i1_form_phase(lambda, v, beta);
  const Phase ratio_phase = ratio_form_phase(lambda, v, beta);

  PhaseVerdict out;
  out.forms_agree = i1_phase == ratio_phase;
  out.diagnostics = {{"lambda", lambda},
                     {"varphi", energy.varphi()},
                     {"v", v},
                     {"beta", beta},
                     {"r", r},
                     {"i1_value", i1},
                     {"beta_over_r", beta / r},
                     {"log_beta_over_r", std::log(beta) - std::log(r)},
                     {"forms_agree", out.forms_agree ? 1.0 : 0.0}};

  const bool tie = ratio_phase == Phase::Excluded;
  out.formula_phase = (tie || ratio_phase == Phase::SingularContinuous) ? Phase::SingularContinuous
                                                                         : Phase::PurePoint;
  out.formula_dimension =
      out.formula_phase == Phase::SingularContinuous ? (tie ? 0.0 : 1.0 - std::log(r) / std::log(beta))
                                                     : 0.0;

  if (energy.is_rational_multiple()) {
    out.phase = Phase::Excluded;
    out.reason = Exclusion::RationalEnergy;
  } else if (tie) {
    out.phase = Phase::Excluded;
    out.reason = Exclusion::BoundaryTie;
  } else {
    out.phase = out.formula_phase;
    out.dimension = out.formula_dimension;
  }
  return out;
}

PhaseVerdict classify(double lambda, const Strength& strength, double beta) {
  if (!(lambda > -2.0 && lambda < 2.0))
    throw PreconditionError("classify: lambda must lie strictly inside (-2, 2)");
  return classify(EnergyPoint::from_lambda(lambda), strength, beta);
}

double hausdorff_dimension(double lambda, double v, double beta) {
  check_classify_inputs(lambda, v, beta);
  if (!(v * v < 4.0 * (beta - 1.0)))
    throw PreconditionError("hausdorff_dimension: needs v^2 < 4 (beta - 1)");
  const double edge2 = 4.0 - v * v / (beta - 1.0);
  if (lambda * lambda > edge2 * (1.0 + kTieTolerance))
    throw PreconditionError("hausdorff_dimension: lambda lies outside the critical interval");
  return 1.0 - std::log(growth_rate(lambda, v)) / std::log(beta);
}

CriticalEnergies critical_energy(const Strength& strength, double beta) {
  const double v = intensity(strength);
  if (!(beta >= 2.0)) throw PreconditionError("critical_energy: beta must be >= 2");
  const double limit = 4.0 * (beta - 1.0);
  CriticalEnergies out;
  if (std::abs(v * v - limit) <= kTieTolerance * limit) return out;  // degenerate: lambda_c = 0
  if (v * v > limit) {
    out.empty = true;
    return out;
  }
  const double edge = std::sqrt(4.0 - v * v / (beta - 1.0));
  out.minus = -edge;
  out.plus = edge;
  return out;
}

// ---------------------------------------------------------------------------

std::string to_string(SeriesVerdict v) {
  switch (v) {
    case SeriesVerdict::Convergent: return "convergent";
    case SeriesVerdict::Divergent: return "divergent";
    case SeriesVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

SeriesVerdict ratio_verdict(double ratio) {
  if (ratio < 1.0 - kRatioDeadBand) return SeriesVerdict::Convergent;
  if (ratio > 1.0 + kRatioDeadBand) return SeriesVerdict::Divergent;
  return SeriesVerdict::Inconclusive;
}

double fitted_tail_ratio(std::span<const double> log_terms) {
  if (log_terms.size() < 4) throw PreconditionError("fitted_tail_ratio: needs at least 4 terms");
  const std::size_t window = std::max<std::size_t>(4, log_terms.size() / 4);
  return std::exp(index_slope(log_terms.last(window)));
}

SeriesDiagnostic series_diagnostic(std::vector<double> log_terms) {
  if (log_terms.size() < kMinSeriesTerms)
    throw PreconditionError("series diagnostic needs at least 8 usable terms");
  for (double x : log_terms)
    if (std::isnan(x)) throw PreconditionError("series diagnostic: NaN term");
  SeriesDiagnostic out;
  double acc = kNegInf;
  out.log_partial_sums.reserve(log_terms.size());
  for (double x : log_terms) {
    acc = log_add(acc, x);
    out.log_partial_sums.push_back(acc);
  }
  const std::size_t half = log_terms.size() / 2;
  out.ratio_estimate = std::exp(index_slope(std::span<const double>(log_terms).subspan(half)));
  out.verdict = ratio_verdict(out.ratio_estimate);
  out.log_terms = std::move(log_terms);
  return out;
}

LemmaL2Report lemma_l2_diagnostic(std::span<const double> log_t2, double beta) {
  if (!(beta > 1.0)) throw PreconditionError("lemma_l2_diagnostic: beta must exceed 1");
  std::size_t usable = 0;
  while (usable < log_t2.size() && std::isfinite(log_t2[usable])) ++usable;
  if (usable < kMinSeriesTerms)
    throw PreconditionError("lemma_l2_diagnostic: fewer than 8 usable terms");
  for (std::size_t i = 0; i < usable; ++i)
    if (log_t2[i] < -1e-9) throw PreconditionError("lemma_l2_diagnostic: t_n must be >= 1");
  const double log_beta = std::log(beta);

  std::vector<double> inverse(usable);  // ln t_m^-2
  for (std::size_t i = 0; i < usable; ++i) inverse[i] = -log_t2[i];

  LemmaL2Report out;
  std::vector<double> alpha_terms(usable);
  for (std::size_t i = 0; i < usable; ++i)
    alpha_terms[i] = static_cast<double>(i + 1) * log_beta + inverse[i];
  out.alpha = series_diagnostic(std::move(alpha_terms));

  out.tail_ratio = fitted_tail_ratio(inverse);
  const double tail = log_geometric_tail(inverse, out.tail_ratio);
  std::vector<double> inner(usable);
  double acc = std::isfinite(tail) ? tail : kNegInf;
  for (std::size_t i = usable; i-- > 0;) {
    acc = log_add(acc, inverse[i]);
    inner[i] = acc;
  }
  std::vector<double> beta_terms(usable);
  for (std::size_t i = 0; i < usable; ++i)
    beta_terms[i] = static_cast<double>(i + 1) * log_beta + log_t2[i] + 2.0 * inner[i];
  out.beta = series_diagnostic(std::move(beta_terms));
  if (!std::isfinite(tail)) {
    // The inner sums themselves diverge.
    out.beta.ratio_estimate = kInf;
    out.beta.verdict = SeriesVerdict::Divergent;
  }
  return out;
}

bool lemma_l2_predicts_pure_point(const LemmaL2Report& report) {
  return report.alpha.verdict == SeriesVerdict::Convergent &&
         report.beta.verdict == SeriesVerdict::Convergent;
}

LastSimonReport last_simon_diagnostics(std::span<const double> log_t2,
                                       std::span<const BigInt> gaps) {
  const auto parts = stretches(log_t2, gaps);
  const std::size_t n = parts.size();

  LastSimonReport out;
  double w = kNegInf, u = kNegInf;
  BigInt sites = 0;
  for (const auto& s : parts) {
    sites += s.length;
    const double log_sites = log_big(sites);
    w = log_add(w, s.log_length + s.level);
    u = log_add(u, s.log_length - s.level);
    out.log_site.push_back(log_sites);
    out.log_eac_average.push_back(w - log_sites);
    out.log_esc_partial.push_back(u);
  }

  // Inner sums S_m = sum over later stretches of L_j t_j^-2, completed geometrically.
  std::vector<double> contributions(n);
  for (std::size_t m = 0; m < n; ++m) contributions[m] = parts[m].log_length - parts[m].level;
  out.tail_ratio = n >= 4 ? fitted_tail_ratio(contributions) : kInf;
  const double tail = n >= 4 ? log_geometric_tail(contributions, out.tail_ratio) : kInf;

  std::vector<double> later(n);
  double acc = tail;
  for (std::size_t m = n; m-- > 0;) {
    later[m] = acc;
    acc = log_add(acc, contributions[m]);
  }

  double partial = kNegInf;
  for (std::size_t m = 0; m < n; ++m) {
    const auto& s = parts[m];
    double term = kInf;
    if (std::isfinite(later[m])) {
      // Sites i = 0..L-1 of the stretch see the inner sum S + (L - i) t^-2.
      const double l1 = log_big(s.length + 1);
      const double l2 = log_big(2 * s.length + 1);
      const double a = s.level + 2.0 * later[m] + s.log_length;
      const double b = later[m] + s.log_length + l1;
      const double c = s.log_length + l1 + l2 - std::log(6.0) - s.level;
      term = log_add(log_add(a, b), c);
    }
    partial = log_add(partial, term);
    out.log_npp_terms.push_back(term);
    out.log_npp_partial.push_back(partial);
    out.npp_relative_increment.push_back(std::isfinite(partial) ? std::exp(term - partial) : 1.0);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string to_string(Regime r) {
  switch (r) {
    case Regime::PurePointEverywhere: return "PP-everywhere";
    case Regime::SingularContinuousDim1: return "SC-dim-1";
    case Regime::SingularContinuousDim0: return "SC-dim-0";
    case Regime::SplitBand: return "split-band";
    case Regime::DeferToClassify: return "defer-to-classify";
    case Regime::Unsupported: return "Unsupported";
  }
  return "?";
}

RegimeVerdict regime_classify(const SparsityLaw& sparsity, const CouplingLaw& coupling) {
  validate(sparsity);
  validate(coupling);
  RegimeVerdict out;
  const auto* constant = std::get_if<ConstantCoupling>(&coupling);
  const auto* decaying = std::get_if<DecayingCoupling>(&coupling);

  if (std::holds_alternative<ExponentialSparsity>(sparsity)) {
    if (constant) {
      out.regime = Regime::DeferToClassify;
      out.detail = "exponential sparsity: the phase depends on the energy";
    } else {
      out.detail = "decaying coupling is only covered for stretched sparsity with gamma > 1";
    }
    return out;
  }

  const auto& st = std::get<StretchedSparsity>(sparsity);
  if (std::abs(st.gamma - 1.0) <= 1e-12) {
    if (constant) {
      out.regime = Regime::DeferToClassify;
      out.detail = "gamma = 1 is exponential sparsity with beta = e^c";
    } else {
      out.detail = "decaying coupling needs gamma > 1";
    }
    return out;
  }

  if (constant) {
    if (st.gamma < 1.0) {
      out.regime = Regime::PurePointEverywhere;
      out.detail = "sub-exponential sparsity: dense pure point spectrum on [-2, 2]";
    } else {
      out.regime = Regime::SingularContinuousDim1;
      out.dimension = 1.0;
      out.detail = "super-exponential sparsity: purely singular continuous, dimension 1 on (-2, 2)";
    }
    return out;
  }

  const auto& d = *decaying;
  if (st.gamma < 1.0) {
    out.detail = "decaying coupling with sub-exponential sparsity is outside the covered cases";
    return out;
  }
  if (std::abs(d.gamma - st.gamma) > 1e-12 || std::abs(d.c - st.c) > 1e-12) {
    out.detail = "decaying coupling must use the same c and gamma as the sparsity law";
    return out;
  }
  const ProductBracket bracket = verify_product_bracket(d, 1000);
  out.c_lower = bracket.c_lower;
  out.c_upper = bracket.c_upper;
  if (!(bracket.c_lower > 0.0)) {
    std::ostringstream msg;
    msg << "coupling product is not bracketed with a positive lower coefficient (c_lower = "
        << bracket.c_lower << ")";
    out.detail = msg.str();
    return out;
  }
  if (d.delta == 1.0) {
    out.regime = Regime::SplitBand;
    out.sc_edge = 2.0 * std::sqrt(1.0 - std::exp(-bracket.c_lower));
    out.pp_edge = 2.0 * std::sqrt(1.0 - std::exp(-bracket.c_upper));
    out.detail = "delta = 1: singular continuous of dimension 0 for |lambda| < sc_edge, pure point "
                 "for |lambda| > pp_edge";
    return out;
  }
  out.regime = Regime::SingularContinuousDim0;
  out.detail = "super-exponential sparsity with super-exponentially decaying coupling: purely "
               "singular continuous, dimension 0";
  return out;
}

Phase split_band_phase(const RegimeVerdict& verdict, double lambda) {
  if (verdict.regime != Regime::SplitBand)
    throw PreconditionError("split_band_phase: verdict is not a split-band verdict");
  const double a = std::abs(lambda);
  if (a < verdict.sc_edge) return Phase::SingularContinuous;
  if (a > verdict.pp_edge) return Phase::PurePoint;
  return Phase::Excluded;
}

// ---------------------------------------------------------------------------

ScalingReport scaling_exponents(std::span<const double> log_t2, std::span<const BigInt> gaps,
                                std::span<const double> alpha_grid) {
  const auto parts = stretches(log_t2, gaps);
  const std::size_t n = parts.size();
  if (n < 4) throw PreconditionError("scaling_exponents: needs at least 4 stretches");
  if (alpha_grid.empty()) throw PreconditionError("scaling_exponents: empty alpha grid");
  constexpr int kCheckpoints = 8;

  struct Checkpoint {
    double log_l, log_w, log_u;
  };
  std::vector<std::vector<Checkpoint>> points(n);
  double w = kNegInf, u = kNegInf, log_before = kNegInf;
  BigInt sites = 0;
  for (std::size_t m = 0; m < n; ++m) {
    const auto& s = parts[m];
    for (int i = 0; i < kCheckpoints; ++i) {
      const double log_k = s.log_length * i / (kCheckpoints - 1);
      points[m].push_back({log_add(log_before, log_k), log_add(w, log_k + s.level),
                           log_add(u, log_k - s.level)});
    }
    w = log_add(w, s.log_length + s.level);
    u = log_add(u, s.log_length - s.level);
    sites += s.length;
    log_before = log_big(sites);
  }

  const std::size_t first = n / 2;
  const double span_decades = (points[n - 1].back().log_l - points[first].front().log_l) / std::log(10.0);
  if (span_decades < 2.0)
    throw PreconditionError("scaling_exponents: data span less than two decades of l");

  ScalingReport out;
  {
    std::vector<double> x, yw, yu;
    for (std::size_t m = first; m < n; ++m) {
      x.push_back(points[m].back().log_l);
      yw.push_back(points[m].back().log_w);
      yu.push_back(points[m].back().log_u);
    }
    out.kappa_t = least_squares_slope(x, yw);
    out.kappa_u = least_squares_slope(x, yu);
    out.local_dimension = 2.0 - out.kappa_t;
  }

  for (double alpha : alpha_grid) {
    AlphaRow row;
    row.alpha = alpha;
    std::vector<double> ux, uy, lx, ly;
    for (std::size_t m = first; m < n; ++m) {
      const Checkpoint* hi = nullptr;
      const Checkpoint* lo = nullptr;
      double hi_v = -kInf, lo_v = kInf;
      for (const auto& c : points[m]) {
        const double g = c.log_w - (2.0 - alpha) * c.log_l;
        const double h = c.log_u - alpha * c.log_l;
        if (g > hi_v) {
          hi_v = g;
          hi = &c;
        }
        if (h < lo_v) {
          lo_v = h;
          lo = &c;
        }
      }
      ux.push_back(hi->log_l);
      uy.push_back(hi_v);
      lx.push_back(lo->log_l);
      ly.push_back(lo_v);
    }
    row.dnor_slope = least_squares_slope(ux, uy);
    row.dnor_bounded = row.dnor_slope <= kEnvelopeSlopeTolerance;
    row.c45_slope = least_squares_slope(lx, ly);
    row.c45_vanishing = row.c45_slope < -kEnvelopeSlopeTolerance;
    if (row.dnor_bounded && (!out.largest_continuous_alpha || alpha > *out.largest_continuous_alpha))
      out.largest_continuous_alpha = alpha;
    if (row.c45_vanishing && (!out.smallest_singular_alpha || alpha < *out.smallest_singular_alpha))
      out.smallest_singular_alpha = alpha;
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace sjl
